// Copyright 2026 The HashProbe Authors.
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

#include "hashprobe/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>

#include <cstdlib>
#include <string_view>

namespace hashprobe {

void init_logging_from_env() {
  if (!spdlog::get("hashprobe")) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("hashprobe"));
  }
  spdlog::set_pattern("[%l] %v");
  auto level = spdlog::level::warn;
  if (const char* env = std::getenv("HASHPROBE_LOG")) {
    std::string_view name(env);
    if (name == "error") level = spdlog::level::err;
    else if (name == "warn") level = spdlog::level::warn;
    else if (name == "info") level = spdlog::level::info;
    else if (name == "debug") level = spdlog::level::debug;
  }
  spdlog::set_level(level);
}

}  // namespace hashprobe
