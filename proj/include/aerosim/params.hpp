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

#ifndef AEROSIM_PARAMS_HPP_
#define AEROSIM_PARAMS_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Physical parameters of the aerosol model. Everything here is SI: seconds,
// metres, m^3. Air changes per hour and copies/mL appear only at the input
// boundary (ach_to_lambda, viral_load) and are converted immediately.
namespace aerosim {

// 1 ACH expressed in air changes per second.
inline constexpr double kAchToPerSecond = 2.78e-4;

// Default walking speed between events (m/s).
inline constexpr double kDefaultWalkingSpeed = 1.5;

double ach_to_lambda(double ach);

// Turbulent eddy diffusivity D = 0.8 * lambda * V^(2/3).
double eddy_diffusivity(double lambda, double volume);

// Expected viral copies per aerosol, (pi/6) d^3 c_v with c_v in copies/mL.
// Values above 1 are clamped to 1; `clamped` (if given) reports whether that
// happened.
double viral_load(double diameter_m, double copies_per_ml,
                  bool* clamped = nullptr);

// Total first-order removal rate kappa = beta + gamma + lambda.
double decay_rate(double beta, double gamma, double lambda);

// I = -ln(0.5) / d_m.
double infectibility(double median_dose);

struct Ventilation {
  double ach = 0.0;     // 1/h
  double lambda = 0.0;  // 1/s

  static Ventilation from_ach(double ach);
};

enum class Activity {
  resting,
  talking,
  talking_loudly,
  exercising,
  intensive_exercising,
  walking,
};

struct ActivityProfile {
  Activity activity;
  double breathing_rate;  // m^3/s
  double emission_rate;   // aerosols/s before viral load and masks
};

const ActivityProfile& activity_profile(Activity activity);
const std::vector<Activity>& all_activities();
std::string_view to_string(Activity activity);
Activity parse_activity(std::string_view name);

enum class MaskKind { none, cotton, surgical, n95 };

struct MaskProfile {
  MaskKind kind = MaskKind::none;
  double efficiency = 0.0;  // eta in [0, 1]

  static MaskProfile of(MaskKind kind);
  // Custom efficiency, validated to lie in [0, 1].
  static MaskProfile custom(MaskKind kind, double efficiency);
  double pass_fraction() const { return 1.0 - efficiency; }

  friend bool operator==(const MaskProfile&, const MaskProfile&) = default;
};

std::string_view to_string(MaskKind kind);
MaskKind parse_mask(std::string_view name);

// User-adjustable inputs. Unset optionals are derived when resolved.
struct ParameterSet {
  double beta = 1.7e-4;   // virus deactivation, 1/s
  double gamma = 1.1e-4;  // gravitational settling, 1/s
  double ach = 0.12;      // ventilation, 1/h
  double height = 3.0;    // m
  // Volume fed to the eddy-diffusivity formula. Defaults to the largest room.
  std::optional<double> diffusion_volume;
  // Manual override of D; when set, ventilation changes do not touch D.
  std::optional<double> diffusion;
  double particle_diameter = 5e-6;      // m
  double cv_normal = 1e9;               // copies/mL
  double cv_superspreader = 5e9;        // copies/mL
  std::optional<double> mu_normal;      // overrides viral_load(d_p, cv_normal)
  std::optional<double> mu_superspreader;
  double median_dose = 100.0;           // particles

  friend bool operator==(const ParameterSet&, const ParameterSet&) = default;
};

// Fully resolved, immutable parameter bundle consumed by the solver.
struct TransportParams {
  double beta = 0.0;
  double gamma = 0.0;
  double ach = 0.0;
  double lambda = 0.0;
  double kappa = 0.0;
  double diffusion = 0.0;
  double diffusion_volume = 0.0;
  double height = 0.0;
  double particle_diameter = 0.0;
  double cv_normal = 0.0;
  double cv_superspreader = 0.0;
  double mu_normal = 0.0;
  double mu_superspreader = 0.0;
  double median_dose = 0.0;
  double infectibility = 0.0;
  std::vector<std::string> warnings;

  // `largest_room_volume` is used when the set carries no diffusion_volume.
  static TransportParams resolve(const ParameterSet& set,
                                 double largest_room_volume);
};

}  // namespace aerosim

#endif  // AEROSIM_PARAMS_HPP_
