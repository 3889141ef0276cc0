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

#include "aerosim/exposure.hpp"

#include <cmath>
#include <numbers>

#include "aerosim/error.hpp"

namespace aerosim {

void ExposureRecord::sample(double t, double median_dose) {
  times.push_back(t);
  dose.push_back(final_dose);
  final_risk = infection_risk(final_dose, median_dose);
  risk.push_back(final_risk);
}

double accumulate_dose(double dose, double pass_fraction, double breathing_rate,
                       double concentration, double dt) {
  // Small FEM undershoot near sources must not make the dose decrease.
  const double c = concentration > 0.0 ? concentration : 0.0;
  return dose + pass_fraction * breathing_rate * c * dt;
}

double infection_risk(double dose, double median_dose) {
  if (!(dose >= 0.0)) throw ValidationError("dose", "must be non-negative");
  if (!(median_dose > 0.0)) {
    throw ValidationError("d_m", "median infectious dose must be positive");
  }
  return -std::expm1(-std::numbers::ln2 * (dose / median_dose));
}

bool classify(const ExposureRecord& record, double threshold) {
  return record.final_risk >= threshold;
}

}  // namespace aerosim
