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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "aerosim/mesh.hpp"

namespace aerosim {

double Mesh::triangle_area(std::size_t t) const {
  const auto& v = triangles[t];
  return 0.5 * orient(vertices[v[0]], vertices[v[1]], vertices[v[2]]);
}

double Mesh::total_area() const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) a += triangle_area(t);
  return a;
}

double Mesh::min_angle_degrees() const {
  double best = 180.0;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      const Point p = vertices[t[k]];
      const Point u = vertices[t[(k + 1) % 3]] - p;
      const Point w = vertices[t[(k + 2) % 3]] - p;
      const double angle = std::atan2(std::abs(cross(u, w)), dot(u, w));
      best = std::min(best, angle * 180.0 / std::numbers::pi);
    }
  }
  return best;
}

std::vector<double> Mesh::edge_lengths() const {
  std::set<std::pair<int, int>> edges;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  std::vector<double> out;
  out.reserve(edges.size());
  for (const auto& [a, b] : edges) out.push_back(distance(vertices[a], vertices[b]));
  return out;
}

double Mesh::median_edge_length() const {
  auto lengths = edge_lengths();
  if (lengths.empty()) return 0.0;
  const auto mid = lengths.begin() + static_cast<long>(lengths.size() / 2);
  std::nth_element(lengths.begin(), mid, lengths.end());
  return *mid;
}

std::uint64_t Mesh::content_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& p : vertices) {
    mix(&p.x, sizeof p.x);
    mix(&p.y, sizeof p.y);
  }
  for (const auto& t : triangles) mix(t.data(), sizeof(int) * 3);
  return h;
}

std::string mesh_to_text(const Mesh& mesh) {
  std::ostringstream out;
  out.precision(17);
  out << "vertices " << mesh.vertices.size() << '\n';
  for (const auto& p : mesh.vertices) out << p.x << ' ' << p.y << '\n';
  out << "triangles " << mesh.triangles.size() << '\n';
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "boundary " << mesh.boundary_edges.size() << '\n';
  for (const auto& e : mesh.boundary_edges) {
    out << e.a << ' ' << e.b << ' ' << to_string(e.kind) << '\n';
  }
  return out.str();
}

PointLocator::PointLocator(const Mesh& mesh) : mesh_(&mesh) {
  double x1 = -std::numeric_limits<double>::infinity(), y1 = x1;
  x0_ = std::numeric_limits<double>::infinity();
  y0_ = x0_;
  for (const auto& p : mesh.vertices) {
    x0_ = std::min(x0_, p.x);
    y0_ = std::min(y0_, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  const double area = std::max((x1 - x0_) * (y1 - y0_), 1e-12);
  cell_ = std::sqrt(area / std::max<std::size_t>(mesh.triangles.size() / 2, 1));
  nx_ = std::max(1, static_cast<int>(std::ceil((x1 - x0_) / cell_)) + 1);
  ny_ = std::max(1, static_cast<int>(std::ceil((y1 - y0_) / cell_)) + 1);
  buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    double tx0 = std::numeric_limits<double>::infinity(), ty0 = tx0;
    double tx1 = -tx0, ty1 = -tx0;
    for (int v : mesh.triangles[t]) {
      tx0 = std::min(tx0, mesh.vertices[v].x);
      ty0 = std::min(ty0, mesh.vertices[v].y);
      tx1 = std::max(tx1, mesh.vertices[v].x);
      ty1 = std::max(ty1, mesh.vertices[v].y);
    }
    const int i0 = std::clamp(static_cast<int>((tx0 - x0_) / cell_), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((tx1 - x0_) / cell_), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((ty0 - y0_) / cell_), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((ty1 - y0_) / cell_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(t));
      }
    }
  }
}

std::optional<Location> PointLocator::locate(Point p) const {
  const int i = static_cast<int>(std::floor((p.x - x0_) / cell_));
  const int j = static_cast<int>(std::floor((p.y - y0_) / cell_));
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return std::nullopt;
  constexpr double kTol = -1e-10;
  std::optional<Location> best;
  double best_min = -std::numeric_limits<double>::infinity();
  for (int t : buckets_[static_cast<std::size_t>(j) * nx_ + i]) {
    const auto& tv = mesh_->triangles[t];
    const Point a = mesh_->vertices[tv[0]];
    const Point b = mesh_->vertices[tv[1]];
    const Point c = mesh_->vertices[tv[2]];
    const double area = orient(a, b, c);
    const double l0 = orient(p, b, c) / area;
    const double l1 = orient(a, p, c) / area;
    const double l2 = 1.0 - l0 - l1;
    const double m = std::min({l0, l1, l2});
    if (m >= kTol && m > best_min) {
      best_min = m;
      best = Location{t, {l0, l1, l2}};
      if (m > 0.0) break;
    }
  }
  return best;
}

}  // namespace aerosim
