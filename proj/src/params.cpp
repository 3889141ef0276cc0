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

#include "aerosim/params.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "aerosim/error.hpp"

namespace aerosim {
namespace {

constexpr double kCubicMetresPerMl = 1e-6;

// Walking shares the exercising row.
constexpr std::array<ActivityProfile, 6> kActivities = {{
    {Activity::resting, 1.8e-4, 8.0},
    {Activity::talking, 2.2e-4, 40.0},
    {Activity::talking_loudly, 2.5e-4, 80.0},
    {Activity::exercising, 1.1e-3, 145.0},
    {Activity::intensive_exercising, 2.2e-3, 625.0},
    {Activity::walking, 1.1e-3, 145.0},
}};

constexpr std::array<std::string_view, 6> kActivityNames = {
    "resting",    "talking",
    "talking_loudly", "exercising",
    "intensive_exercising", "walking"};

constexpr std::array<std::string_view, 4> kMaskNames = {"none", "cotton",
                                                        "surgical", "n95"};

void require_nonnegative(const char* name, double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ValidationError(name, "must be a finite non-negative number");
  }
}

}  // namespace

double ach_to_lambda(double ach) {
  require_nonnegative("ach", ach);
  return ach * kAchToPerSecond;
}

double eddy_diffusivity(double lambda, double volume) {
  require_nonnegative("lambda", lambda);
  if (!(volume > 0.0) || !std::isfinite(volume)) {
    throw ValidationError("volume", "must be positive");
  }
  return 0.8 * lambda * std::cbrt(volume * volume);
}

double viral_load(double diameter_m, double copies_per_ml, bool* clamped) {
  require_nonnegative("d_p", diameter_m);
  require_nonnegative("c_v", copies_per_ml);
  const double copies_per_m3 = copies_per_ml / kCubicMetresPerMl;
  const double mu = std::numbers::pi / 6.0 * diameter_m * diameter_m *
                    diameter_m * copies_per_m3;
  if (clamped != nullptr) *clamped = mu > 1.0;
  return mu > 1.0 ? 1.0 : mu;
}

double decay_rate(double beta, double gamma, double lambda) {
  require_nonnegative("beta", beta);
  require_nonnegative("gamma", gamma);
  require_nonnegative("lambda", lambda);
  return beta + gamma + lambda;
}

double infectibility(double median_dose) {
  if (!(median_dose > 0.0) || !std::isfinite(median_dose)) {
    throw ValidationError("d_m", "median infectious dose must be positive");
  }
  return -std::log(0.5) / median_dose;
}

Ventilation Ventilation::from_ach(double ach) {
  return Ventilation{ach, ach_to_lambda(ach)};
}

const ActivityProfile& activity_profile(Activity activity) {
  return kActivities.at(static_cast<std::size_t>(activity));
}

const std::vector<Activity>& all_activities() {
  static const std::vector<Activity> all = {
      Activity::resting,    Activity::talking,
      Activity::talking_loudly, Activity::exercising,
      Activity::intensive_exercising, Activity::walking};
  return all;
}

std::string_view to_string(Activity activity) {
  return kActivityNames.at(static_cast<std::size_t>(activity));
}

Activity parse_activity(std::string_view name) {
  for (std::size_t i = 0; i < kActivityNames.size(); ++i) {
    if (kActivityNames[i] == name) return static_cast<Activity>(i);
  }
  throw ValidationError("activity", "unknown activity '" + std::string(name) +
                                        "'");
}

MaskProfile MaskProfile::of(MaskKind kind) {
  switch (kind) {
    case MaskKind::none:
      return {kind, 0.0};
    case MaskKind::cotton:
      return {kind, 0.50};
    case MaskKind::surgical:
      return {kind, 0.60};
    case MaskKind::n95:
      return {kind, 0.95};
  }
  return {MaskKind::none, 0.0};
}

MaskProfile MaskProfile::custom(MaskKind kind, double efficiency) {
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
    throw ValidationError("mask_efficiency", "must lie in [0, 1]");
  }
  return {kind, efficiency};
}

std::string_view to_string(MaskKind kind) {
  return kMaskNames.at(static_cast<std::size_t>(kind));
}

MaskKind parse_mask(std::string_view name) {
  for (std::size_t i = 0; i < kMaskNames.size(); ++i) {
    if (kMaskNames[i] == name) return static_cast<MaskKind>(i);
  }
  throw ValidationError("mask", "unknown mask kind '" + std::string(name) +
                                    "'");
}

TransportParams TransportParams::resolve(const ParameterSet& set,
                                         double largest_room_volume) {
  TransportParams p;
  p.beta = set.beta;
  p.gamma = set.gamma;
  p.ach = set.ach;
  p.lambda = ach_to_lambda(set.ach);
  p.kappa = decay_rate(set.beta, set.gamma, p.lambda);
  if (!(set.height > 0.0)) throw ValidationError("height", "must be positive");
  p.height = set.height;
  p.diffusion_volume = set.diffusion_volume.value_or(largest_room_volume);
  if (set.diffusion) {
    require_nonnegative("diffusion", *set.diffusion);
    p.diffusion = *set.diffusion;
  } else {
    p.diffusion = eddy_diffusivity(p.lambda, p.diffusion_volume);
  }
  p.particle_diameter = set.particle_diameter;
  p.cv_normal = set.cv_normal;
  p.cv_superspreader = set.cv_superspreader;

  auto resolve_mu = [&](const std::optional<double>& given, double cv,
                        const char* label) {
    if (given) {
      if (!(*given >= 0.0 && *given <= 1.0)) {
        throw ValidationError(label, "must lie in [0, 1]");
      }
      return *given;
    }
    bool clamped = false;
    const double mu = viral_load(set.particle_diameter, cv, &clamped);
    if (clamped) {
      p.warnings.push_back(std::string(label) +
                           ": viral load exceeds 1 copy per aerosol; clamped");
    }
    return mu;
  };
  p.mu_normal = resolve_mu(set.mu_normal, set.cv_normal, "mu_normal");
  p.mu_superspreader =
      resolve_mu(set.mu_superspreader, set.cv_superspreader, "mu_superspreader");
  p.median_dose = set.median_dose;
  p.infectibility = aerosim::infectibility(set.median_dose);
  return p;
}

}  // namespace aerosim
