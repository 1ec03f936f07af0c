// Copyright 2026 The Semianchor Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "semianchor/text_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

#include "json.hpp"

namespace semianchor {
namespace {

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void parse_fail(const std::string& what, int line) {
  throw std::runtime_error("line " + std::to_string(line) + ": " + what);
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot replace " + path + ": " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string format_location_record(std::int64_t image, std::size_t location, const AnchorGrid& grid,
                                   const LocationTarget& t) {
  const AnchorGrid::Cell cell = grid.cell(location);
  std::string s = "L " + std::to_string(image) + " " + std::to_string(location) + " " +
                  std::to_string(cell.level) + " " + std::to_string(cell.row) + " " +
                  std::to_string(cell.col) + " " + std::to_string(t.label);
  for (double v : t.scores) s += " " + fmt6(v);
  return s + "\n";
}

std::string format_anchor_record(std::int64_t image, const AnchorTarget& t, double pre_iou) {
  return "A " + std::to_string(image) + " " + std::to_string(t.location) + " " + std::to_string(t.anchor) +
         " " + std::to_string(t.pre_label) + " " + fmt6(pre_iou) + " " + std::to_string(t.post_label) + " " +
         fmt6(t.iou) + " " + fmt6(t.soft_label) + " " + std::to_string(t.positive) + "\n";
}

std::string format_detections(const std::vector<EvalDetection>& dets) {
  std::string out;
  for (const EvalDetection& d : dets) {
    out += std::to_string(d.image_id) + " " + std::to_string(d.category) + " " + fmt6(d.box.x1) + " " +
           fmt6(d.box.y1) + " " + fmt6(d.box.width()) + " " + fmt6(d.box.height()) + " " + fmt6(d.score) + "\n";
  }
  return out;
}

std::vector<EvalDetection> parse_detections(const std::string& text) {
  std::vector<EvalDetection> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    EvalDetection d;
    double x = 0, y = 0, w = 0, h = 0;
    if (!(fields >> d.image_id >> d.category >> x >> y >> w >> h >> d.score)) {
      parse_fail("expected 'image_id category_id x y width height score'", number);
    }
    std::string extra;
    if (fields >> extra) parse_fail("trailing field '" + extra + "'", number);
    if (w < 0.0 || h < 0.0) parse_fail("negative box size", number);
    if (!(d.score >= 0.0 && d.score <= 1.0)) parse_fail("score outside [0, 1]", number);
    d.box = {x, y, x + w, y + h};
    out.push_back(d);
  }
  return out;
}

std::vector<EvalDetection> load_detections(const std::string& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '[') {
    try {
      return parse_detections(text);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(path + ": " + e.what());
    }
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": malformed JSON: " + e.what());
  }
  std::vector<EvalDetection> out;
  for (std::size_t n = 0; n < doc.size(); ++n) {
    const auto& r = doc[n];
    const std::string where = path + ": results[" + std::to_string(n) + "]";
    try {
      EvalDetection d;
      d.image_id = r.at("image_id").get<std::int64_t>();
      d.category = r.at("category_id").get<int>();
      const auto& b = r.at("bbox");
      if (!b.is_array() || b.size() != 4) throw std::runtime_error("bbox must have four numbers");
      const double x = b[0].get<double>(), y = b[1].get<double>();
      d.box = {x, y, x + b[2].get<double>(), y + b[3].get<double>()};
      d.score = r.at("score").get<double>();
      out.push_back(d);
    } catch (const std::exception& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
  }
  return out;
}

std::string format_head_file(const std::vector<HeadFileImage>& images) {
  std::string out = "# semianchor-heads v1\n";
  for (const HeadFileImage& im : images) {
    const HeadOutputs& h = im.heads;
    h.validate();
    out += "image " + std::to_string(im.image_id) + " locations " + std::to_string(h.num_locations) +
           " anchors " + std::to_string(h.anchors_per_location) + " classes " + std::to_string(h.num_classes) + "\n";
    const auto c = static_cast<std::size_t>(h.num_classes);
    const auto k = static_cast<std::size_t>(h.anchors_per_location);
    for (std::size_t i = 0; i < h.num_locations; ++i) {
      out += "loc " + std::to_string(i);
      for (std::size_t j = 0; j < c; ++j) out += " " + exact(h.location_probs[i * c + j]);
      out += "\n";
    }
    for (std::size_t i = 0; i < h.num_locations; ++i) {
      for (std::size_t a = 0; a < k; ++a) {
        const Box b = h.refined[i * k + a];
        out += "anchor " + std::to_string(i) + " " + std::to_string(a) + " " + exact(h.anchor_probs[i * k + a]) +
               " " + exact(b.x1) + " " + exact(b.y1) + " " + exact(b.x2) + " " + exact(b.y2) + "\n";
      }
    }
  }
  return out;
}

std::vector<HeadFileImage> parse_head_file(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int number = 1;
  if (!std::getline(in, line) || line != "# semianchor-heads v1") {
    throw std::runtime_error("not a head-output file (missing '# semianchor-heads v1' header)");
  }
  std::vector<HeadFileImage> out;
  auto next = [&](std::istringstream& fields) {
    while (std::getline(in, line)) {
      ++number;
      if (line.empty()) continue;
      fields.clear();
      fields.str(line);
      return true;
    }
    return false;
  };
  std::istringstream fields;
  while (next(fields)) {
    std::string tag, kw1, kw2, kw3;
    HeadFileImage im;
    std::size_t locations = 0;
    if (!(fields >> tag >> im.image_id >> kw1 >> locations >> kw2 >> im.heads.anchors_per_location >> kw3 >>
          im.heads.num_classes) ||
        tag != "image" || kw1 != "locations" || kw2 != "anchors" || kw3 != "classes") {
      parse_fail("expected 'image <id> locations <L> anchors <K> classes <C>'", number);
    }
    HeadOutputs& h = im.heads;
    if (h.anchors_per_location < 1 || h.num_classes < 1) parse_fail("anchors and classes must be positive", number);
    h.num_locations = locations;
    const auto c = static_cast<std::size_t>(h.num_classes);
    const auto k = static_cast<std::size_t>(h.anchors_per_location);
    h.location_probs.resize(locations * c);
    h.anchor_probs.resize(locations * k);
    h.refined = BoxArray(locations * k);
    for (std::size_t i = 0; i < locations; ++i) {
      std::size_t idx = 0;
      if (!next(fields) || !(fields >> tag >> idx) || tag != "loc" || idx != i) {
        parse_fail("expected 'loc " + std::to_string(i) + " ...'", number);
      }
      for (std::size_t j = 0; j < c; ++j) {
        if (!(fields >> h.location_probs[i * c + j])) parse_fail("missing class probability", number);
      }
    }
    for (std::size_t i = 0; i < locations; ++i) {
      for (std::size_t a = 0; a < k; ++a) {
        std::size_t li = 0, ai = 0;
        Box b;
        if (!next(fields) || !(fields >> tag >> li >> ai) || tag != "anchor" || li != i || ai != a) {
          parse_fail("expected 'anchor " + std::to_string(i) + " " + std::to_string(a) + " ...'", number);
        }
        if (!(fields >> h.anchor_probs[i * k + a] >> b.x1 >> b.y1 >> b.x2 >> b.y2)) {
          parse_fail("expected '<prob> <x1> <y1> <x2> <y2>'", number);
        }
        h.refined.set(i * k + a, b);
      }
    }
    try {
      h.validate();
    } catch (const std::exception& e) {
      parse_fail(std::string("image ") + std::to_string(im.image_id) + ": " + e.what(), number);
    }
    out.push_back(std::move(im));
  }
  return out;
}

}  // namespace semianchor
