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

#ifndef AEROSIM_TESTS_PDE_CHECKS_HPP_
#define AEROSIM_TESTS_PDE_CHECKS_HPP_

// Solver experiments shared by the transport unit tests and the acceptance
// suite. Each returns raw measurements; callers own the tolerances.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "aerosim/geometry.hpp"
#include "aerosim/mesh.hpp"
#include "aerosim/transport.hpp"

namespace aerosim::pde {

inline Mesh rectangle_mesh(double width, double length, double target_edge) {
  FloorPlanSpec s;
  s.rooms.push_back({"box", {0.0, 0.0, width, length}});
  return mesh_domain(FloorPlan::build(s), target_edge);
}

// Largest relative change of total mass over `steps` steps of pure
// diffusion from a nonuniform start.
inline double conservation_drift(const Mesh& mesh, double diffusion, double dt, int steps) {
  TransportSolver solver(mesh, diffusion, 0.0, 3.0, {.dt = dt});
  ConcentrationField f;
  for (const Point& p : mesh.vertices) {
    f.values.push_back(std::exp(-((p.x - 1.0) * (p.x - 1.0) + (p.y - 1.0) * (p.y - 1.0))));
  }
  solver.set_field(f);
  const double m0 = solver.total_mass();
  double drift = 0.0;
  for (int n = 0; n < steps; ++n) {
    solver.step({}, {});
    drift = std::max(drift, std::abs(solver.total_mass() - m0) / m0);
  }
  return drift;
}

struct DecayErrors {
  double vs_discrete = 0.0;     // max relative error against (1 + kappa dt)^-n
  double vs_exponential = 0.0;  // max |C/C0 - exp(-kappa t)|
  double spread = 0.0;          // max (max - min) / mean over the field
};

inline DecayErrors uniform_decay(const Mesh& mesh, double diffusion, double kappa, double dt,
                                 double duration) {
  TransportSolver solver(mesh, diffusion, kappa, 3.0, {.dt = dt});
  const double c0 = 250.0;
  solver.set_field({std::vector<double>(mesh.num_vertices(), c0), 0.0});
  DecayErrors e;
  const int steps = static_cast<int>(std::lround(duration / dt));
  for (int n = 1; n <= steps; ++n) {
    solver.step({}, {});
    const auto& v = solver.field().values;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    const double discrete = c0 * std::pow(1.0 + kappa * dt, -n);
    for (double x : v) {
      e.vs_discrete = std::max(e.vs_discrete, std::abs(x - discrete) / discrete);
      e.vs_exponential = std::max(e.vs_exponential, std::abs(x / c0 - std::exp(-kappa * n * dt)));
    }
    e.spread = std::max(e.spread, (*hi - *lo) / mean);
  }
  return e;
}

// Relative error of the measured decay rate of the first Neumann mode
// cos(pi x / L) against D pi^2 / L^2 + kappa. The amplitude is the lumped
// L2 projection onto the mode, and the rate is taken over the last half of
// the run so faster modes excited by interpolation have died out. With
// `spatial_only` the backward-Euler amplification 1 / (1 + k dt) is
// inverted exactly, which leaves only the mesh error in the rate.
inline double eigenmode_rate_error(double length, double width, double diffusion, double kappa,
                                   double target_edge, double dt, double duration,
                                   bool spatial_only = false) {
  const Mesh mesh = rectangle_mesh(length, width, target_edge);
  TransportSolver solver(mesh, diffusion, kappa, 3.0, {.dt = dt});
  std::vector<double> phi;
  for (const Point& p : mesh.vertices) phi.push_back(std::cos(std::numbers::pi * p.x / length));
  solver.set_field({phi, 0.0});
  const Eigen::VectorXd& w = solver.operators().lumped;
  auto amplitude = [&] {
    double num = 0.0, den = 0.0;
    const auto& c = solver.field().values;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      num += w[static_cast<Eigen::Index>(i)] * c[i] * phi[i];
      den += w[static_cast<Eigen::Index>(i)] * phi[i] * phi[i];
    }
    return num / den;
  };
  const int steps = static_cast<int>(std::lround(duration / dt));
  double a_half = 0.0, t_half = 0.0;
  for (int n = 1; n <= steps; ++n) {
    solver.step({}, {});
    if (n == steps / 2) a_half = amplitude(), t_half = n * dt;
  }
  const double ratio = a_half / amplitude();
  const double span = steps * dt - t_half;
  const double measured = spatial_only ? (std::pow(ratio, dt / span) - 1.0) / dt
                                       : std::log(ratio) / span;
  const double exact =
      diffusion * std::numbers::pi * std::numbers::pi / (length * length) + kappa;
  return std::abs(measured - exact) / exact;
}

struct WellMixed {
  double fem_dose = 0.0;
  double ode_dose = 0.0;
};

// One emitter and one breathing receptor in a closed room with very large
// D, against the 0-D balance
//   A dC/dt = S - kappa A C - (rho / h) C
// where S is the source strength per unit height, and dose = int rho C dt.
inline WellMixed well_mixed_dose(double width, double length, double height, double source,
                                 double rho, double kappa, double dt, double duration) {
  const Mesh mesh = rectangle_mesh(width, length, 0.25);
  const double area = width * length;
  const double diffusion = 2.0;  // mixing time L^2 / D of seconds
  TransportSolver solver(mesh, diffusion, kappa, height, {.dt = dt});
  const Point emitter{0.2 * width, 0.3 * length};
  const Point receptor{0.8 * width, 0.7 * length};
  const std::vector<PointLoad> sources{{solver.locate(emitter), source}};
  const std::vector<PointLoad> sinks{{solver.locate(receptor), rho}};
  WellMixed r;
  double c_ode = 0.0;
  const int steps = static_cast<int>(std::lround(duration / dt));
  // Fine explicit substeps make the ODE oracle independent of dt.
  const int sub = 100;
  const double h = dt / sub;
  for (int n = 0; n < steps; ++n) {
    r.fem_dose += dt * rho * std::max(0.0, solver.evaluate(receptor));
    solver.step(sources, sinks);
    for (int k = 0; k < sub; ++k) {
      r.ode_dose += h * rho * c_ode;
      c_ode += h * (source / area - kappa * c_ode - rho / height / area * c_ode);
    }
  }
  return r;
}

}  // namespace aerosim::pde

#endif  // AEROSIM_TESTS_PDE_CHECKS_HPP_
