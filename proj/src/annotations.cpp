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

#include "semianchor/annotations.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "semianchor/log.hpp"

namespace semianchor {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw AnnotationError(where + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

std::int64_t as_int(const json& v, const char* key, const std::string& where) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == static_cast<double>(static_cast<std::int64_t>(d))) return static_cast<std::int64_t>(d);
  }
  fail(where, std::string("field '") + key + "' must be an integer");
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "bbox entries must be numbers");
  return v.get<double>();
}

std::string record(const char* section, std::size_t index, const json& obj) {
  std::string s = std::string(section) + "[" + std::to_string(index) + "]";
  if (obj.is_object()) {
    auto it = obj.find("id");
    if (it != obj.end() && it->is_number_integer()) s += " (id " + std::to_string(it->get<std::int64_t>()) + ")";
  }
  return s;
}

}  // namespace

int AnnotationSet::label_of(int category_id) const {
  for (const Category& c : categories) {
    if (c.id == category_id) return c.label;
  }
  throw AnnotationError("unknown category id " + std::to_string(category_id));
}

int AnnotationSet::category_of(int label) const {
  if (label < 1 || label > num_classes()) {
    throw AnnotationError("label " + std::to_string(label) + " out of range");
  }
  return categories[static_cast<std::size_t>(label - 1)].id;
}

const ImageInfo& AnnotationSet::image(std::int64_t id) const {
  auto it = std::lower_bound(images.begin(), images.end(), id,
                             [](const ImageInfo& im, std::int64_t v) { return im.id < v; });
  if (it == images.end() || it->id != id) throw AnnotationError("unknown image id " + std::to_string(id));
  return *it;
}

GroundTruth AnnotationSet::ground_truth(std::int64_t image_id) const {
  GroundTruth gt;
  for (const Annotation& a : annotations) {
    if (a.image_id == image_id) gt.push_back({a.box, label_of(a.category_id)});
  }
  return gt;
}

std::vector<EvalGroundTruth> AnnotationSet::eval_ground_truth() const {
  std::vector<EvalGroundTruth> out;
  out.reserve(annotations.size());
  for (const Annotation& a : annotations) out.push_back({a.image_id, a.category_id, a.box});
  return out;
}

AnnotationSet parse_annotations(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw AnnotationError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("document", "top level must be an object");

  AnnotationSet set;
  const json& images = require(doc, "images", "document");
  const json& categories = require(doc, "categories", "document");
  const json& annotations = require(doc, "annotations", "document");
  if (!images.is_array() || !categories.is_array() || !annotations.is_array()) {
    fail("document", "images, annotations and categories must be arrays");
  }

  std::set<std::int64_t> image_ids;
  for (std::size_t n = 0; n < images.size(); ++n) {
    const json& im = images[n];
    const std::string where = record("images", n, im);
    ImageInfo info;
    info.id = as_int(require(im, "id", where), "id", where);
    info.width = static_cast<int>(as_int(require(im, "width", where), "width", where));
    info.height = static_cast<int>(as_int(require(im, "height", where), "height", where));
    if (info.width <= 0 || info.height <= 0) fail(where, "image size must be positive");
    if (!image_ids.insert(info.id).second) fail(where, "duplicate image id " + std::to_string(info.id));
    set.images.push_back(info);
  }

  std::set<int> category_ids;
  for (std::size_t n = 0; n < categories.size(); ++n) {
    const json& c = categories[n];
    const std::string where = record("categories", n, c);
    Category cat;
    cat.id = static_cast<int>(as_int(require(c, "id", where), "id", where));
    auto name = c.find("name");
    if (name != c.end()) {
      if (!name->is_string()) fail(where, "field 'name' must be a string");
      cat.name = name->get<std::string>();
    }
    if (!category_ids.insert(cat.id).second) fail(where, "duplicate category id " + std::to_string(cat.id));
    set.categories.push_back(cat);
  }

  for (std::size_t n = 0; n < annotations.size(); ++n) {
    const json& a = annotations[n];
    const std::string where = record("annotations", n, a);
    Annotation ann;
    ann.image_id = as_int(require(a, "image_id", where), "image_id", where);
    ann.category_id = static_cast<int>(as_int(require(a, "category_id", where), "category_id", where));
    if (!image_ids.count(ann.image_id)) {
      fail(where, "image_id " + std::to_string(ann.image_id) + " does not exist");
    }
    if (!category_ids.count(ann.category_id)) {
      fail(where, "category_id " + std::to_string(ann.category_id) + " does not exist");
    }
    const json& bbox = require(a, "bbox", where);
    if (!bbox.is_array() || bbox.size() != 4) fail(where, "bbox must be [x, y, width, height]");
    const double x = as_number(bbox[0], where);
    const double y = as_number(bbox[1], where);
    const double w = as_number(bbox[2], where);
    const double h = as_number(bbox[3], where);
    if (!(w > 0.0 && h > 0.0)) {
      ++set.dropped;
      continue;
    }
    ann.box = {x, y, x + w, y + h};
    set.annotations.push_back(ann);
  }
  if (set.dropped > 0) {
    log::warn("dropped " + std::to_string(set.dropped) + " annotation(s) with non-positive width or height");
  }

  std::sort(set.images.begin(), set.images.end(),
            [](const ImageInfo& a, const ImageInfo& b) { return a.id < b.id; });
  std::sort(set.categories.begin(), set.categories.end(),
            [](const Category& a, const Category& b) { return a.id < b.id; });
  for (std::size_t c = 0; c < set.categories.size(); ++c) set.categories[c].label = static_cast<int>(c) + 1;
  std::sort(set.annotations.begin(), set.annotations.end(), [](const Annotation& a, const Annotation& b) {
    return std::make_tuple(a.image_id, a.category_id, a.box.x1, a.box.y1, a.box.x2, a.box.y2) <
           std::make_tuple(b.image_id, b.category_id, b.box.x1, b.box.y1, b.box.x2, b.box.y2);
  });
  return set;
}

AnnotationSet load_annotations(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AnnotationError("cannot open annotation file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_annotations(buf.str());
  } catch (const AnnotationError& e) {
    throw AnnotationError(path + ": " + e.what());
  }
}

std::string annotations_to_json(const AnnotationSet& set) {
  json doc;
  doc["images"] = json::array();
  for (const ImageInfo& im : set.images) {
    doc["images"].push_back({{"id", im.id}, {"width", im.width}, {"height", im.height}});
  }
  doc["categories"] = json::array();
  for (const Category& c : set.categories) doc["categories"].push_back({{"id", c.id}, {"name", c.name}});
  doc["annotations"] = json::array();
  std::int64_t next_id = 1;
  for (const Annotation& a : set.annotations) {
    doc["annotations"].push_back({{"id", next_id++},
                                  {"image_id", a.image_id},
                                  {"category_id", a.category_id},
                                  {"bbox", {a.box.x1, a.box.y1, a.box.width(), a.box.height()}}});
  }
  return doc.dump(1) + "\n";
}

AnnotationSet annotations_from_scenes(const std::vector<SyntheticScene>& scenes, int num_classes) {
  AnnotationSet set;
  for (int c = 1; c <= num_classes; ++c) set.categories.push_back({c, "class" + std::to_string(c), c});
  for (std::size_t n = 0; n < scenes.size(); ++n) {
    const auto id = static_cast<std::int64_t>(n);
    set.images.push_back({id, scenes[n].width, scenes[n].height});
    for (const GtBox& g : scenes[n].gt) set.annotations.push_back({id, g.label, g.box});
  }
  std::sort(set.annotations.begin(), set.annotations.end(), [](const Annotation& a, const Annotation& b) {
    return std::make_tuple(a.image_id, a.category_id, a.box.x1, a.box.y1, a.box.x2, a.box.y2) <
           std::make_tuple(b.image_id, b.category_id, b.box.x1, b.box.y1, b.box.x2, b.box.y2);
  });
  return set;
}

}  // namespace semianchor
