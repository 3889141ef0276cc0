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

#ifndef AEROSIM_TRANSPORT_HPP_
#define AEROSIM_TRANSPORT_HPP_

#include <memory>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "aerosim/mesh.hpp"

// Linear finite elements for dC/dt = D lap C + S - (kappa + R_I) C with
// zero-flux walls, stepped by backward Euler:
//   (M + dt (D K + kappa M)) C_{n+1} = M C_n + dt (s - r_n).
// s and r_n are point loads distributed with the barycentric weights of the
// containing triangle; r_n uses C_n, so one factorization serves a run.
namespace aerosim {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct FemOperators {
  SparseMatrix mass;       // consistent mass matrix M
  SparseMatrix stiffness;  // K, rows sum to zero
  // M_t + dt (D K + kappa M_t), M_t the lumped or consistent mass.
  SparseMatrix implicit;
  Eigen::VectorXd lumped;  // row sums of M (nodal areas)
  bool lumped_mass = true;
  double diffusion = 0.0;
  double kappa = 0.0;
  double dt = 0.0;
};

// Throws AssemblyError on a degenerate triangle or negative coefficients.
// With `lumped_mass` the time and decay terms use diag(row sums of M). On a
// Delaunay mesh the implicit operator is then an M-matrix, so nonnegative
// data and sources give a nonnegative field; the consistent mass
// undershoots next to point sources.
FemOperators assemble(const Mesh& mesh, double diffusion, double kappa,
                      double dt, bool lumped_mass = true);

struct SolverConfig {
  double dt = 1.0;
  // Divide breathing sinks by the room height like the emission source.
  bool sink_per_height = true;
  bool lumped_mass = true;
};

struct ConcentrationField {
  std::vector<double> values;  // particles/m^3 at each mesh vertex
  double time = 0.0;           // s from simulation start
};

// A point source or sink already located in the mesh.
struct PointLoad {
  Location where;
  // Source: (1 - eta) R / h in particles/(m^2 s) per unit delta.
  // Sink: (1 - eta) rho in m^3/s; divided by h when sink_per_height.
  double strength = 0.0;
};

// Barycentric interpolation of nodal values.
double interpolate(const Mesh& mesh, const std::vector<double>& values,
                   const Location& where);

// Throws PointLocationError outside the mesh.
double evaluate(const Mesh& mesh, const PointLocator& locator,
                const ConcentrationField& field, Point p);

// h * integral of C over the domain.
double total_mass(const FemOperators& ops, const ConcentrationField& field,
                  double height);

class TransportSolver {
 public:
  TransportSolver(const Mesh& mesh, double diffusion, double kappa,
                  double height, SolverConfig config = {});
  TransportSolver(const TransportSolver&) = delete;
  TransportSolver& operator=(const TransportSolver&) = delete;

  void step(const std::vector<PointLoad>& sources,
            const std::vector<PointLoad>& sinks);
  // Unlocated variant; throws PointLocationError for points off the mesh.
  void step_at(const std::vector<std::pair<Point, double>>& sources,
               const std::vector<std::pair<Point, double>>& sinks);

  const ConcentrationField& field() const { return field_; }
  void set_field(ConcentrationField field);
  double evaluate(Point p) const;
  double total_mass() const;

  const Mesh& mesh() const { return *mesh_; }
  const PointLocator& locator() const { return locator_; }
  const FemOperators& operators() const { return ops_; }
  const SolverConfig& config() const { return config_; }
  double height() const { return height_; }
  Location locate(Point p) const;

 private:
  const Mesh* mesh_;
  PointLocator locator_;
  SolverConfig config_;
  double height_;
  FemOperators ops_;
  Eigen::SimplicialLDLT<SparseMatrix> solver_;
  ConcentrationField field_;
  Eigen::VectorXd rhs_;
};

}  // namespace aerosim

#endif  // AEROSIM_TRANSPORT_HPP_
