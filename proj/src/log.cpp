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

#include "semianchor/log.hpp"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <optional>

namespace semianchor::log {
namespace {

std::optional<Level>& override_level() {
  static std::optional<Level> value;
  return value;
}

Level from_env() {
  const char* v = std::getenv("SEMIANCHOR_LOG");
  if (!v) return Level::kWarn;
  if (std::strcmp(v, "quiet") == 0) return Level::kQuiet;
  if (std::strcmp(v, "error") == 0) return Level::kError;
  if (std::strcmp(v, "warn") == 0) return Level::kWarn;
  if (std::strcmp(v, "info") == 0) return Level::kInfo;
  if (std::strcmp(v, "debug") == 0) return Level::kDebug;
  return Level::kWarn;
}

void emit(Level at, const char* tag, const std::string& msg) {
  if (static_cast<int>(level()) < static_cast<int>(at)) return;
  std::cerr << tag << msg << '\n';
}

}  // namespace

Level level() {
  static const Level env = from_env();
  return override_level().value_or(env);
}

void set_level(Level l) { override_level() = l; }

void error(const std::string& msg) { emit(Level::kError, "error: ", msg); }
void warn(const std::string& msg) { emit(Level::kWarn, "warning: ", msg); }
void info(const std::string& msg) { emit(Level::kInfo, "", msg); }
void debug(const std::string& msg) { emit(Level::kDebug, "debug: ", msg); }

}  // namespace semianchor::log
