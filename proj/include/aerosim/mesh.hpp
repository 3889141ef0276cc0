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

#ifndef AEROSIM_MESH_HPP_
#define AEROSIM_MESH_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aerosim/geometry.hpp"

namespace aerosim {

inline constexpr double kDefaultTargetEdge = 0.25;

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  WallKind kind = WallKind::outer_wall;
};

// Linear triangle mesh of the aerosol domain. Interior walls are cracks:
// vertices on a wall are duplicated so the two sides share no degree of
// freedom, except at door jambs where the sides meet.
struct Mesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<BoundaryEdge> boundary_edges;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  double triangle_area(std::size_t t) const;
  double total_area() const;
  double min_angle_degrees() const;
  // Lengths of the distinct edges.
  std::vector<double> edge_lengths() const;
  double median_edge_length() const;
  // FNV-1a over the vertex and triangle arrays; identifies a mesh in exports.
  std::uint64_t content_hash() const;
};

// Constrained-Delaunay mesh of `plan` with edges close to `target_edge`.
// Throws MeshingError for degenerate geometry or if refinement fails.
Mesh mesh_domain(const FloorPlan& plan, double target_edge = kDefaultTargetEdge);

// Plain-text listing: "vertices N", N lines "x y", "triangles M", M lines
// "a b c", "boundary K", K lines "a b kind".
std::string mesh_to_text(const Mesh& mesh);

struct Location {
  int triangle = -1;
  std::array<double, 3> bary{};  // weights of the triangle's vertices
};

// Bucket grid over the mesh bounding box for point-in-triangle queries.
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh);

  std::optional<Location> locate(Point p) const;

 private:
  const Mesh* mesh_;
  double x0_ = 0.0, y0_ = 0.0, cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace aerosim

#endif  // AEROSIM_MESH_HPP_
