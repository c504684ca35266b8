// Copyright 2026 The dopplive Authors. All Rights Reserved.
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

#ifndef DOPPLIVE_TOOLS_CLI_HPP_
#define DOPPLIVE_TOOLS_CLI_HPP_

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dopplive/config.hpp"

namespace dopplive::cli {

inline constexpr int kExitLive = 0;
inline constexpr int kExitAttack = 1;
inline constexpr int kExitError = 2;
inline constexpr int kExitEnrollment = 3;

struct GlobalOptions {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> sample_rate;
  std::optional<double> f0;
  std::optional<std::string> feature_mode;
  std::optional<std::string> profiles;
  std::vector<std::string> settings;  // key=value
};

// Defaults, then the config file, then flags.
RunConfig resolve_config(const GlobalOptions& options);

// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dopplive::cli

#endif  // DOPPLIVE_TOOLS_CLI_HPP_
