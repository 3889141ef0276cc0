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

#include "aerosim/transport.hpp"

#include <cmath>

#include "aerosim/error.hpp"

namespace aerosim {

FemOperators assemble(const Mesh& mesh, double diffusion, double kappa,
                      double dt, bool lumped_mass) {
  if (!(diffusion >= 0.0) || !(kappa >= 0.0)) {
    throw AssemblyError("diffusion and decay rate must be non-negative");
  }
  if (!(dt > 0.0)) throw AssemblyError("time step must be positive");
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  std::vector<Eigen::Triplet<double>> m, k;
  m.reserve(mesh.num_triangles() * 9);
  k.reserve(mesh.num_triangles() * 9);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangles[t];
    const Point p[3] = {mesh.vertices[v[0]], mesh.vertices[v[1]],
                        mesh.vertices[v[2]]};
    const double area = 0.5 * orient(p[0], p[1], p[2]);
    if (!(area > 0.0)) {
      throw AssemblyError("triangle " + std::to_string(t) +
                          " is degenerate or clockwise");
    }
    double b[3], c[3];
    for (int i = 0; i < 3; ++i) {
      const Point& pj = p[(i + 1) % 3];
      const Point& pk = p[(i + 2) % 3];
      b[i] = pj.y - pk.y;
      c[i] = pk.x - pj.x;
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        m.emplace_back(v[i], v[j], area / 12.0 * (i == j ? 2.0 : 1.0));
        k.emplace_back(v[i], v[j], (b[i] * b[j] + c[i] * c[j]) / (4.0 * area));
      }
    }
  }
  FemOperators ops;
  ops.diffusion = diffusion;
  ops.kappa = kappa;
  ops.dt = dt;
  ops.mass.resize(n, n);
  ops.mass.setFromTriplets(m.begin(), m.end());
  ops.stiffness.resize(n, n);
  ops.stiffness.setFromTriplets(k.begin(), k.end());
  ops.lumped = ops.mass * Eigen::VectorXd::Ones(n);
  ops.lumped_mass = lumped_mass;
  if (lumped_mass) {
    SparseMatrix diag(n, n);
    std::vector<Eigen::Triplet<double>> d;
    d.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) d.emplace_back(i, i, ops.lumped[i]);
    diag.setFromTriplets(d.begin(), d.end());
    ops.implicit = (1.0 + dt * kappa) * diag + dt * diffusion * ops.stiffness;
  } else {
    ops.implicit = ops.mass + dt * (diffusion * ops.stiffness + kappa * ops.mass);
  }
  ops.implicit.makeCompressed();
  return ops;
}

double interpolate(const Mesh& mesh, const std::vector<double>& values,
                   const Location& where) {
  const auto& tv = mesh.triangles[static_cast<std::size_t>(where.triangle)];
  return where.bary[0] * values[tv[0]] + where.bary[1] * values[tv[1]] +
         where.bary[2] * values[tv[2]];
}

double evaluate(const Mesh& mesh, const PointLocator& locator,
                const ConcentrationField& field, Point p) {
  const auto loc = locator.locate(p);
  if (!loc) {
    throw PointLocationError("point (" + std::to_string(p.x) + ", " +
                             std::to_string(p.y) + ") is outside the mesh");
  }
  return interpolate(mesh, field.values, *loc);
}

double total_mass(const FemOperators& ops, const ConcentrationField& field,
                  double height) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < ops.lumped.size(); ++i) {
    s += ops.lumped[i] * field.values[static_cast<std::size_t>(i)];
  }
  return s * height;
}

TransportSolver::TransportSolver(const Mesh& mesh, double diffusion,
                                 double kappa, double height,
                                 SolverConfig config)
    : mesh_(&mesh),
      locator_(mesh),
      config_(config),
      height_(height),
      ops_(assemble(mesh, diffusion, kappa, config.dt, config.lumped_mass)) {
  if (!(height > 0.0)) throw AssemblyError("height must be positive");
  solver_.compute(ops_.implicit);
  if (solver_.info() != Eigen::Success) {
    throw AssemblyError("implicit operator is not positive definite");
  }
  field_.values.assign(mesh.num_vertices(), 0.0);
  rhs_.resize(static_cast<Eigen::Index>(mesh.num_vertices()));
}

void TransportSolver::set_field(ConcentrationField field) {
  if (field.values.size() != mesh_->num_vertices()) {
    throw ContractViolation("field size does not match the mesh");
  }
  field_ = std::move(field);
}

Location TransportSolver::locate(Point p) const {
  const auto loc = locator_.locate(p);
  if (!loc) {
    throw PointLocationError("point (" + std::to_string(p.x) + ", " +
                             std::to_string(p.y) + ") is outside the mesh");
  }
  return *loc;
}

void TransportSolver::step(const std::vector<PointLoad>& sources,
                           const std::vector<PointLoad>& sinks) {
  const auto n = static_cast<Eigen::Index>(field_.values.size());
  const Eigen::Map<const Eigen::VectorXd> c(field_.values.data(), n);
  if (ops_.lumped_mass) {
    rhs_ = ops_.lumped.cwiseProduct(c);
  } else {
    rhs_.noalias() = ops_.mass * c;
  }
  const double dt = config_.dt;
  const double sink_scale = config_.sink_per_height ? 1.0 / height_ : 1.0;
  for (const PointLoad& s : sources) {
    const auto& tv = mesh_->triangles[static_cast<std::size_t>(s.where.triangle)];
    for (int k = 0; k < 3; ++k) rhs_[tv[k]] += dt * s.strength * s.where.bary[k];
  }
  for (const PointLoad& s : sinks) {
    const auto& tv = mesh_->triangles[static_cast<std::size_t>(s.where.triangle)];
    const double removed =
        dt * s.strength * sink_scale * interpolate(*mesh_, field_.values, s.where);
    for (int k = 0; k < 3; ++k) rhs_[tv[k]] -= removed * s.where.bary[k];
  }
  const Eigen::VectorXd next = solver_.solve(rhs_);
  Eigen::Map<Eigen::VectorXd>(field_.values.data(), n) = next;
  field_.time += dt;
}

void TransportSolver::step_at(const std::vector<std::pair<Point, double>>& sources,
                              const std::vector<std::pair<Point, double>>& sinks) {
  std::vector<PointLoad> s, r;
  for (const auto& [p, q] : sources) s.push_back({locate(p), q});
  for (const auto& [p, q] : sinks) r.push_back({locate(p), q});
  step(s, r);
}

double TransportSolver::evaluate(Point p) const {
  return interpolate(*mesh_, field_.values, locate(p));
}

double TransportSolver::total_mass() const {
  return aerosim::total_mass(ops_, field_, height_);
}

}  // namespace aerosim
