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

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "aerosim/error.hpp"
#include "aerosim/exposure.hpp"
#include "aerosim/params.hpp"

using namespace aerosim;

TEST_CASE("dose accumulation") {
  const double rho = activity_profile(Activity::resting).breathing_rate;
  SUBCASE("constant concentration, unmasked, resting") {
    const double c = 37.0;
    double d = 0.0;
    for (int n = 0; n < 3600; ++n) d = accumulate_dose(d, 1.0, rho, c, 1.0);
    CHECK(d == doctest::Approx(1.8e-4 * c * 3600.0).epsilon(1e-12));
  }
  SUBCASE("a perfect mask or clean air gives no dose") {
    CHECK(accumulate_dose(0.0, 0.0, rho, 50.0, 1.0) == 0.0);
    CHECK(accumulate_dose(0.0, 1.0, rho, 0.0, 1.0) == 0.0);
  }
  SUBCASE("undershoot never lowers the dose") {
    CHECK(accumulate_dose(2.0, 1.0, rho, -1e-3, 1.0) == 2.0);
  }
  SUBCASE("dose is linear in the pass fraction") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
      const double pass = 0.5 * u(rng), c = 1e3 * u(rng), dt = 0.1 + u(rng);
      const double once = accumulate_dose(0.0, pass, rho, c, dt);
      CHECK(accumulate_dose(0.0, 2.0 * pass, rho, c, dt) == doctest::Approx(2.0 * once).epsilon(1e-15));
    }
  }
}

TEST_CASE("exponential dose response") {
  CHECK(infection_risk(0.0, 100.0) == 0.0);
  CHECK(infection_risk(100.0, 100.0) == 0.5);
  CHECK(infection_risk(250.0, 250.0) == 0.5);
  CHECK(infection_risk(200.0, 100.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(infection_risk(1e-9, 100.0) == doctest::Approx(std::numbers::ln2 * 1e-11).epsilon(1e-9));
  CHECK(infection_risk(1e6, 100.0) == 1.0);
  CHECK_THROWS_AS(infection_risk(-1.0, 100.0), ValidationError);
  CHECK_THROWS_AS(infection_risk(1.0, 0.0), ValidationError);
  // Nondecreasing in dose.
  double prev = 0.0;
  for (double d = 0.0; d < 1000.0; d += 0.5) {
    const double p = infection_risk(d, 100.0);
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("classification threshold is inclusive") {
  ExposureRecord r;
  r.final_risk = 0.49;
  CHECK_FALSE(classify(r, 0.5));
  r.final_risk = 0.5;
  CHECK(classify(r, 0.5));
  r.final_risk = 0.42;
  CHECK_FALSE(classify(r, 0.5));
  CHECK(classify(r, 0.35));
}

TEST_CASE("sampled record follows the dose") {
  ExposureRecord r;
  r.agent = "P7";
  const double rho = activity_profile(Activity::talking).breathing_rate;
  for (int n = 0; n < 10; ++n) {
    r.sample(60.0 * n, 100.0);
    for (int k = 0; k < 60; ++k) r.final_dose = accumulate_dose(r.final_dose, 1.0, rho, 500.0, 1.0);
  }
  REQUIRE(r.times.size() == 10);
  for (std::size_t i = 1; i < r.times.size(); ++i) {
    CHECK(r.times[i] > r.times[i - 1]);
    CHECK(r.dose[i] >= r.dose[i - 1]);
    CHECK(r.risk[i] >= r.risk[i - 1]);
    CHECK(r.risk[i] == infection_risk(r.dose[i], 100.0));
  }
  CHECK(r.final_risk == r.risk.back());
}
