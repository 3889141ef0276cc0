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

#include "doctest.h"

#include "aerosim/error.hpp"
#include "aerosim/params.hpp"

using namespace aerosim;

TEST_CASE("ventilation conversion and decay composition") {
  CHECK(ach_to_lambda(0.12) == doctest::Approx(3.336e-5).epsilon(1e-12));
  CHECK(ach_to_lambda(3.0) == doctest::Approx(8.34e-4).epsilon(1e-12));
  CHECK(ach_to_lambda(0.0) == 0.0);
  CHECK_THROWS_AS(ach_to_lambda(-0.1), ValidationError);
  CHECK(decay_rate(1.7e-4, 1.1e-4, 0.0) == doctest::Approx(2.8e-4));
  const TransportParams p = TransportParams::resolve(ParameterSet{}, 72.0);
  CHECK(p.kappa == doctest::Approx(p.beta + p.gamma + p.lambda).epsilon(1e-15));
}

TEST_CASE("eddy diffusivity of the three reference rooms") {
  // Courtroom 150 m^3 at 0.23 ACH, care-home common room 72 m^3 and
  // supermarket 588 m^3 at 0.12 ACH.
  CHECK(eddy_diffusivity(ach_to_lambda(0.23), 8.9 * 5.6 * 3.0) ==
        doctest::Approx(1.4e-3).epsilon(0.05));
  CHECK(eddy_diffusivity(ach_to_lambda(0.12), 72.0) == doctest::Approx(4.6e-4).epsilon(0.05));
  CHECK(eddy_diffusivity(ach_to_lambda(0.12), 14.0 * 14.0 * 3.0) ==
        doctest::Approx(1.9e-3).epsilon(0.05));
  CHECK_THROWS_AS(eddy_diffusivity(1e-4, 0.0), ValidationError);
  // D scales as V^(2/3): eight times the volume, four times D.
  CHECK(eddy_diffusivity(1e-4, 800.0) == doctest::Approx(4.0 * eddy_diffusivity(1e-4, 100.0)));
}

TEST_CASE("viral load from droplet diameter and copy concentration") {
  CHECK(viral_load(5e-6, 1e9) == doctest::Approx(0.065).epsilon(0.02));
  CHECK(viral_load(5e-6, 5e9) == doctest::Approx(0.325).epsilon(0.02));
  // Oracle: pi/6 (5 um)^3 = 6.545e-17 m^3 = 6.545e-11 mL.
  CHECK(viral_load(5e-6, 1e9) == doctest::Approx(std::numbers::pi / 6.0 * 125e-18 * 1e6 * 1e9));
  bool clamped = false;
  CHECK(viral_load(5e-6, 1e11, &clamped) == 1.0);
  CHECK(clamped);
  CHECK_THROWS_AS(viral_load(-1e-6, 1e9), ValidationError);
}

TEST_CASE("infectibility puts the median dose at one half") {
  for (double dm : {50.0, 100.0, 260.0}) {
    CHECK(infectibility(dm) * dm == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  }
  CHECK_THROWS_AS(infectibility(0.0), ValidationError);
}

TEST_CASE("activity and mask tables") {
  CHECK(activity_profile(Activity::resting).breathing_rate == 1.8e-4);
  CHECK(activity_profile(Activity::talking).breathing_rate == 2.2e-4);
  CHECK(activity_profile(Activity::talking_loudly).breathing_rate == 2.5e-4);
  CHECK(activity_profile(Activity::exercising).breathing_rate == 1.1e-3);
  CHECK(activity_profile(Activity::intensive_exercising).breathing_rate == 2.2e-3);
  CHECK(activity_profile(Activity::resting).emission_rate == 8.0);
  // Walking uses the exercising values.
  CHECK(activity_profile(Activity::walking).breathing_rate ==
        activity_profile(Activity::exercising).breathing_rate);
  CHECK(activity_profile(Activity::walking).emission_rate ==
        activity_profile(Activity::exercising).emission_rate);
  for (Activity a : all_activities()) {
    CHECK(parse_activity(to_string(a)) == a);
    CHECK(activity_profile(a).activity == a);
  }
  CHECK_THROWS_AS(parse_activity("dancing"), ValidationError);

  CHECK(MaskProfile::of(MaskKind::none).efficiency == 0.0);
  CHECK(MaskProfile::of(MaskKind::cotton).efficiency == 0.5);
  CHECK(MaskProfile::of(MaskKind::surgical).efficiency == 0.6);
  CHECK(MaskProfile::of(MaskKind::n95).efficiency == 0.95);
  CHECK(MaskProfile::of(MaskKind::surgical).pass_fraction() == doctest::Approx(0.4));
  CHECK(parse_mask("n95") == MaskKind::n95);
  CHECK_THROWS_AS(parse_mask("visor"), ValidationError);
  CHECK_THROWS_AS(MaskProfile::custom(MaskKind::cotton, 1.5), ValidationError);
}

TEST_CASE("resolving a parameter set") {
  ParameterSet set;
  set.ach = 3.0;
  const TransportParams good = TransportParams::resolve(set, 72.0);
  CHECK(good.lambda == doctest::Approx(8.3e-4).epsilon(0.01));
  CHECK(good.diffusion == doctest::Approx(eddy_diffusivity(good.lambda, 72.0)));
  CHECK(good.mu_normal == doctest::Approx(0.065).epsilon(0.02));
  CHECK(good.mu_superspreader == doctest::Approx(0.325).epsilon(0.02));
  CHECK(good.infectibility == doctest::Approx(std::log(2.0) / 100.0));
  CHECK(good.warnings.empty());

  SUBCASE("diffusion_volume wins over the largest room") {
    set.diffusion_volume = 150.0;
    CHECK(TransportParams::resolve(set, 72.0).diffusion_volume == 150.0);
  }
  SUBCASE("a manual diffusivity is not recomputed") {
    set.diffusion = 0.01;
    CHECK(TransportParams::resolve(set, 72.0).diffusion == 0.01);
  }
  SUBCASE("viral load overrides are range checked") {
    set.mu_superspreader = 1.2;
    CHECK_THROWS_AS(TransportParams::resolve(set, 72.0), ValidationError);
  }
  SUBCASE("an absurd copy concentration is clamped with a warning") {
    set.cv_superspreader = 1e13;
    const auto p = TransportParams::resolve(set, 72.0);
    CHECK(p.mu_superspreader == 1.0);
    CHECK(p.warnings.size() == 1);
  }
  SUBCASE("bad inputs") {
    set.height = 0.0;
    CHECK_THROWS_AS(TransportParams::resolve(set, 72.0), ValidationError);
  }
}
