// Copyright 2026 The Aerosim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AEROSIM_SCENARIO_IO_HPP_
#define AEROSIM_SCENARIO_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "aerosim/params.hpp"
#include "aerosim/scenario.hpp"

// Scenario documents are JSON with a top-level "version". Times are
// wall-clock "HH:MM[:SS]" strings (or plain numbers of seconds after the
// simulation start); lengths are metres, ventilation is ACH. Unknown keys
// are rejected with their JSON pointer.
namespace aerosim {

using Json = nlohmann::ordered_json;

Json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const Json& document);

// Parse errors report line and column.
Scenario parse_scenario(std::string_view text);
std::string dump_scenario(const Scenario& scenario);

Scenario load_scenario_file(const std::filesystem::path& path);
void save_scenario_file(const Scenario& scenario, const std::filesystem::path& path);

// Command-line and service overrides.
struct RunOverrides {
  std::optional<double> dt;
  std::optional<double> target_edge;
  std::optional<std::uint64_t> seed;  // supermarkets are regenerated
  std::optional<double> threshold;
  std::optional<double> frame_every;
};
Scenario apply_overrides(const Scenario& scenario, const RunOverrides& overrides);

// A document is either a full scenario or a preset reference:
//   {"version": 1, "preset": "care_home", "npi": "II",
//    "overrides": {"dt": 1, "target_edge": 0.25, "seed": 3,
//                  "threshold": 0.5, "frame_every": 60}}
Scenario resolve_document(const Json& document);
Scenario resolve_document(std::string_view text);

Json transport_params_to_json(const TransportParams& params);

// Parses JSON text, converting syntax errors to ValidationError with the
// line and column.
Json parse_json(std::string_view text);

}  // namespace aerosim

#endif  // AEROSIM_SCENARIO_IO_HPP_
