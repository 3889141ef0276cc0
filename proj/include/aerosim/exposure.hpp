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

#ifndef AEROSIM_EXPOSURE_HPP_
#define AEROSIM_EXPOSURE_HPP_

#include <string>
#include <vector>

namespace aerosim {

inline constexpr double kDefaultThreshold = 0.5;

// Dose and risk sampled at the frame cadence. Infectious agents keep an
// all-zero record.
struct ExposureRecord {
  std::string agent;
  bool infectious = false;
  std::vector<double> times;
  std::vector<double> dose;
  std::vector<double> risk;
  double final_dose = 0.0;
  double final_risk = 0.0;
  bool infected = false;
  double threshold = kDefaultThreshold;

  void sample(double t, double median_dose);
};

// d + (1 - eta) rho C dt, left-endpoint rule.
double accumulate_dose(double dose, double pass_fraction, double breathing_rate,
                       double concentration, double dt);

// 1 - exp(-ln2 d / d_m).
double infection_risk(double dose, double median_dose);

// Final risk >= threshold (inclusive).
bool classify(const ExposureRecord& record, double threshold);

}  // namespace aerosim

#endif  // AEROSIM_EXPOSURE_HPP_
