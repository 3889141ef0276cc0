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

// Conforming Delaunay refinement (Ruppert) of the floor-plan boundary.
//
// Every boundary piece is pre-split to at most the target edge length and
// inserted into an unconstrained Delaunay triangulation. Subsegments that are
// missing or encroached are split at their midpoints until all of them are
// Delaunay edges; from then on triangles never straddle a wall, so a triangle
// is inside the domain iff its centroid is. Skinny or oversized interior
// triangles are removed by circumcentre insertion, deferring to segment
// splits whenever the circumcentre would encroach a subsegment.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "aerosim/error.hpp"
#include "aerosim/mesh.hpp"

namespace aerosim {
namespace {

// Radius-edge bound sqrt(2) gives a minimum angle of about 20.7 degrees.
constexpr double kQualityBound = 1.41421356237;

// Circumradius cap as a multiple of the target edge. 0.8 puts the median
// edge length at the target on open floor.
constexpr double kSizeFactor = 0.8;

long double incircle(Point a, Point b, Point c, Point d) {
  const long double adx = static_cast<long double>(a.x) - d.x;
  const long double ady = static_cast<long double>(a.y) - d.y;
  const long double bdx = static_cast<long double>(b.x) - d.x;
  const long double bdy = static_cast<long double>(b.y) - d.y;
  const long double cdx = static_cast<long double>(c.x) - d.x;
  const long double cdy = static_cast<long double>(c.y) - d.y;
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
         ad * (bdx * cdy - bdy * cdx);
}

long double orient_ld(Point a, Point b, Point c) {
  return (static_cast<long double>(b.x) - a.x) * (static_cast<long double>(c.y) - a.y) -
         (static_cast<long double>(b.y) - a.y) * (static_cast<long double>(c.x) - a.x);
}

Point circumcentre(Point a, Point b, Point c) {
  const double bx = b.x - a.x, by = b.y - a.y;
  const double cx = c.x - a.x, cy = c.y - a.y;
  const double d = 2.0 * (bx * cy - by * cx);
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  return {a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d};
}

struct Tri {
  std::array<int, 3> v{};
  std::array<int, 3> n{-1, -1, -1};  // n[i] lies across the edge opposite v[i]
  bool alive = false;
};

class Triangulation {
 public:
  explicit Triangulation(const Rect& box) {
    const Point c = box.centre();
    const double r = 50.0 * std::max({box.width, box.length, 1.0});
    pts_.push_back({c.x - 2.0 * r, c.y - r});
    pts_.push_back({c.x + 2.0 * r, c.y - r});
    pts_.push_back({c.x, c.y + 2.0 * r});
    Tri t;
    t.v = {0, 1, 2};
    t.alive = true;
    tris_.push_back(t);
    vert_tri_ = {0, 0, 0};
  }

  static constexpr int kSuperVertices = 3;

  const std::vector<Point>& points() const { return pts_; }
  const std::vector<Tri>& tris() const { return tris_; }

  // Inserts p; returns its vertex index (an existing one if p coincides with
  // a vertex). Newly created triangles are appended to `created`.
  int insert(Point p, std::vector<int>* created) {
    const int t0 = locate(p);
    for (int k = 0; k < 3; ++k) {
      const int v = tris_[t0].v[k];
      if (distance(pts_[v], p) < 1e-11) return v;
    }
    ++stamp_;
    if (mark_.size() < tris_.size()) mark_.resize(tris_.size(), 0);
    std::vector<int> cavity = {t0};
    mark_[t0] = stamp_;
    for (std::size_t k = 0; k < cavity.size(); ++k) {
      const Tri& t = tris_[cavity[k]];
      for (int i = 0; i < 3; ++i) {
        const int nb = t.n[i];
        if (nb < 0 || mark_[nb] == stamp_) continue;
        const Tri& u = tris_[nb];
        if (incircle(pts_[u.v[0]], pts_[u.v[1]], pts_[u.v[2]], p) > 0) {
          mark_[nb] = stamp_;
          cavity.push_back(nb);
        }
      }
    }
    // Shrink to a star-shaped cavity: every boundary edge must see p on its
    // left. Neighbours of t0 across an edge through p are forced in.
    for (int guard = 0; guard < 1000; ++guard) {
      bool changed = false;
      for (std::size_t k = 0; k < cavity.size() && !changed; ++k) {
        const Tri& t = tris_[cavity[k]];
        for (int i = 0; i < 3; ++i) {
          const int nb = t.n[i];
          if (nb >= 0 && mark_[nb] == stamp_) continue;
          const Point a = pts_[t.v[(i + 1) % 3]];
          const Point b = pts_[t.v[(i + 2) % 3]];
          if (orient_ld(a, b, p) > 0) continue;
          if (cavity[k] == t0) {
            if (nb < 0) throw MeshingError("point on the triangulation hull");
            mark_[nb] = stamp_;
            cavity.push_back(nb);
          } else {
            mark_[cavity[k]] = 0;
            cavity.erase(cavity.begin() + static_cast<long>(k));
          }
          changed = true;
          break;
        }
      }
      if (!changed) break;
      // Keep only the part still connected to t0.
      std::vector<int> keep = {t0};
      ++stamp_;
      const int old = stamp_ - 1;
      mark_[t0] = stamp_;
      for (std::size_t k = 0; k < keep.size(); ++k) {
        for (int nb : tris_[keep[k]].n) {
          if (nb >= 0 && mark_[nb] == old) {
            mark_[nb] = stamp_;
            keep.push_back(nb);
          }
        }
      }
      for (int c : cavity) {
        if (mark_[c] == old) mark_[c] = 0;
      }
      cavity = std::move(keep);
    }

    struct Edge {
      int a, b, outside;
    };
    std::vector<Edge> rim;
    for (int c : cavity) {
      const Tri& t = tris_[c];
      for (int i = 0; i < 3; ++i) {
        const int nb = t.n[i];
        if (nb >= 0 && mark_[nb] == stamp_) continue;
        rim.push_back({t.v[(i + 1) % 3], t.v[(i + 2) % 3], nb});
      }
    }
    const int pv = static_cast<int>(pts_.size());
    pts_.push_back(p);
    vert_tri_.push_back(-1);

    for (int c : cavity) {
      tris_[c].alive = false;
      free_.push_back(c);
    }
    std::map<int, int> by_start, by_end;
    std::vector<int> made;
    made.reserve(rim.size());
    for (const Edge& e : rim) {
      int id;
      if (!free_.empty()) {
        id = free_.back();
        free_.pop_back();
      } else {
        id = static_cast<int>(tris_.size());
        tris_.emplace_back();
      }
      Tri& t = tris_[id];
      t.v = {e.a, e.b, pv};
      t.n = {-1, -1, e.outside};
      t.alive = true;
      if (e.outside >= 0) {
        Tri& o = tris_[e.outside];
        for (int i = 0; i < 3; ++i) {
          const int oa = o.v[(i + 1) % 3], ob = o.v[(i + 2) % 3];
          if (oa == e.b && ob == e.a) o.n[i] = id;
        }
      }
      by_start[e.a] = id;
      by_end[e.b] = id;
      made.push_back(id);
    }
    for (int id : made) {
      Tri& t = tris_[id];
      // Edge opposite v[0] is (b, p): shared with the triangle starting at b.
      t.n[0] = by_start.at(t.v[1]);
      // Edge opposite v[1] is (p, a): shared with the triangle ending at a.
      t.n[1] = by_end.at(t.v[0]);
      vert_tri_[t.v[0]] = id;
      vert_tri_[t.v[1]] = id;
      vert_tri_[pv] = id;
    }
    if (mark_.size() < tris_.size()) mark_.resize(tris_.size(), 0);
    last_ = made.front();
    if (created != nullptr) created->insert(created->end(), made.begin(), made.end());
    return pv;
  }

  int locate(Point p) {
    int t = last_;
    if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) {
      t = first_alive();
    }
    const std::size_t limit = 4 * tris_.size() + 16;
    for (std::size_t step = 0; step < limit; ++step) {
      const Tri& tri = tris_[t];
      const int start = static_cast<int>(walk_counter_++ % 3);
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const int i = (start + k) % 3;
        const Point a = pts_[tri.v[(i + 1) % 3]];
        const Point b = pts_[tri.v[(i + 2) % 3]];
        if (orient_ld(a, b, p) < 0) {
          next = tri.n[i];
          break;
        }
      }
      if (next < 0) {
        last_ = t;
        return t;
      }
      t = next;
    }
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      const Tri& tri = tris_[i];
      if (!tri.alive) continue;
      bool inside = true;
      for (int k = 0; k < 3 && inside; ++k) {
        inside = orient_ld(pts_[tri.v[(k + 1) % 3]], pts_[tri.v[(k + 2) % 3]], p) >= 0;
      }
      if (inside) return last_ = static_cast<int>(i);
    }
    throw MeshingError("point location failed during triangulation");
  }

  // Triangles incident to v.
  std::vector<int> star(int v) const {
    std::vector<int> out;
    const int seed = vert_tri_[v];
    if (seed < 0) return out;
    out.push_back(seed);
    for (std::size_t k = 0; k < out.size(); ++k) {
      for (int nb : tris_[out[k]].n) {
        if (nb < 0 || !tris_[nb].alive) continue;
        const auto& tv = tris_[nb].v;
        if (tv[0] != v && tv[1] != v && tv[2] != v) continue;
        if (std::find(out.begin(), out.end(), nb) == out.end()) out.push_back(nb);
      }
    }
    return out;
  }

  // Apices of the triangles on either side of edge (a, b); empty if the edge
  // is not in the triangulation.
  std::vector<int> edge_apices(int a, int b) const {
    std::vector<int> apices;
    for (int t : star(a)) {
      const auto& v = tris_[t].v;
      for (int k = 0; k < 3; ++k) {
        if (v[k] == b) apices.push_back(v[0] + v[1] + v[2] - a - b);
      }
    }
    return apices;
  }

 private:
  int first_alive() const {
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      if (tris_[i].alive) return static_cast<int>(i);
    }
    throw MeshingError("empty triangulation");
  }

  std::vector<Point> pts_;
  std::vector<Tri> tris_;
  std::vector<int> vert_tri_;
  std::vector<int> free_;
  std::vector<int> mark_;
  int stamp_ = 0;
  int last_ = 0;
  unsigned long walk_counter_ = 0;
};

struct Subsegment {
  int a;
  int b;
  WallKind kind;
};

class Refiner {
 public:
  Refiner(const FloorPlan& plan, double target)
      : plan_(plan), target_(target), tri_(plan.bounding_box()) {
    const double area = plan.aerosol_area();
    max_vertices_ = static_cast<std::size_t>(200.0 * area / (target * target)) + 20000;
  }

  Mesh run() {
    seed_boundary();
    conform();
    refine();
    return extract();
  }

 private:
  bool inside(int t) const {
    const Tri& tri = tri_.tris()[t];
    for (int v : tri.v) {
      if (v < Triangulation::kSuperVertices) return false;
    }
    const auto& p = tri_.points();
    const Point c = (1.0 / 3.0) * (p[tri.v[0]] + p[tri.v[1]] + p[tri.v[2]]);
    return plan_.in_aerosol_domain(c);
  }

  int insert(Point p, std::vector<int>* created) {
    if (tri_.points().size() > max_vertices_) {
      throw MeshingError("mesh refinement exceeded the vertex budget; geometry is degenerate");
    }
    return tri_.insert(p, created);
  }

  void seed_boundary() {
    double shortest = std::numeric_limits<double>::infinity();
    for (const auto& piece : plan_.boundary()) {
      shortest = std::min(shortest, distance(piece.a, piece.b));
    }
    if (shortest < 1e-3 * target_ || shortest < 1e-6) {
      throw MeshingError("degenerate geometry: boundary feature of length " +
                         std::to_string(shortest) + " m");
    }
    std::map<std::pair<long long, long long>, int> ids;
    auto vertex = [&](Point p) {
      const auto key = std::make_pair(std::llround(p.x * 1e8), std::llround(p.y * 1e8));
      auto it = ids.find(key);
      if (it != ids.end()) return it->second;
      const int v = insert(p, nullptr);
      ids.emplace(key, v);
      return v;
    };
    for (const auto& piece : plan_.boundary()) {
      const double len = distance(piece.a, piece.b);
      const int n = std::max(1, static_cast<int>(std::ceil(len / target_ - 1e-9)));
      int prev = vertex(piece.a);
      for (int k = 1; k <= n; ++k) {
        const Point q = k == n ? piece.b : piece.a + (static_cast<double>(k) / n) * (piece.b - piece.a);
        const int cur = vertex(q);
        segs_.push_back({prev, cur, piece.kind});
        prev = cur;
      }
    }
  }

  bool encroached_by(const Subsegment& s, Point p, double slack) const {
    const auto& pts = tri_.points();
    const Point m = 0.5 * (pts[s.a] + pts[s.b]);
    const Point h = pts[s.b] - m;
    const double r2 = dot(h, h);
    const Point d = p - m;
    return dot(d, d) < r2 * slack;
  }

  bool needs_split(const Subsegment& s) const {
    const auto apices = tri_.edge_apices(s.a, s.b);
    if (apices.empty()) return true;
    for (int v : apices) {
      if (encroached_by(s, tri_.points()[v], 1.0 - 1e-9)) return true;
    }
    return false;
  }

  void split(std::size_t index) {
    const Subsegment s = segs_[index];
    const auto& pts = tri_.points();
    const Point m = 0.5 * (pts[s.a] + pts[s.b]);
    std::vector<int> created;
    const int vm = insert(m, &created);
    segs_[index] = {s.a, vm, s.kind};
    segs_.push_back({vm, s.b, s.kind});
    for (int t : created) pending_.push_back(t);
  }

  void conform() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < segs_.size(); ++i) {
        if (needs_split(segs_[i])) {
          split(i);
          changed = true;
        }
      }
    }
  }

  bool bad(int t) const {
    const auto& pts = tri_.points();
    const auto& v = tri_.tris()[t].v;
    const Point a = pts[v[0]], b = pts[v[1]], c = pts[v[2]];
    const double la = distance(b, c), lb = distance(c, a), lc = distance(a, b);
    const double area2 = std::abs(orient(a, b, c));
    if (area2 <= 0.0) return true;
    const double radius = la * lb * lc / (2.0 * area2);
    const double shortest = std::min({la, lb, lc});
    if (radius / shortest > kQualityBound) return true;
    return radius > kSizeFactor * target_;
  }

  void refine() {
    for (std::size_t t = 0; t < tri_.tris().size(); ++t) {
      if (tri_.tris()[t].alive) pending_.push_back(static_cast<int>(t));
    }
    while (!pending_.empty()) {
      const int t = pending_.front();
      pending_.pop_front();
      const Tri& tri = tri_.tris()[t];
      if (!tri.alive || !inside(t) || !bad(t)) continue;
      const auto& pts = tri_.points();
      const auto verts = tri.v;
      const Point c = circumcentre(pts[verts[0]], pts[verts[1]], pts[verts[2]]);
      std::vector<std::size_t> hit;
      for (std::size_t i = 0; i < segs_.size(); ++i) {
        if (encroached_by(segs_[i], c, 1.0 + 1e-9)) hit.push_back(i);
      }
      if (!hit.empty()) {
        for (std::size_t i : hit) split(i);
        conform();
        pending_.push_back(t);
        continue;
      }
      // Numerically on a wall without encroaching: accept the triangle.
      if (!plan_.in_aerosol_domain(c)) continue;
      std::vector<int> created;
      insert(c, &created);
      for (int n : created) pending_.push_back(n);
    }
  }

  Mesh extract() {
    const auto& pts = tri_.points();
    const auto& tris = tri_.tris();
    std::vector<int> remap(pts.size(), -1);
    Mesh mesh;
    std::vector<int> original;  // mesh vertex -> triangulation vertex
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!tris[t].alive || !inside(static_cast<int>(t))) continue;
      std::array<int, 3> tv{};
      for (int k = 0; k < 3; ++k) {
        const int v = tris[t].v[k];
        if (remap[v] < 0) {
          remap[v] = static_cast<int>(mesh.vertices.size());
          mesh.vertices.push_back(pts[v]);
          original.push_back(v);
        }
        tv[k] = remap[v];
      }
      mesh.triangles.push_back(tv);
    }
    if (mesh.triangles.empty()) throw MeshingError("mesh has no interior triangles");

    std::map<std::pair<int, int>, WallKind> seg_kind;
    for (const auto& s : segs_) {
      const int a = remap[s.a], b = remap[s.b];
      if (a < 0 || b < 0) continue;
      seg_kind[{std::min(a, b), std::max(a, b)}] = s.kind;
    }
    auto is_wall = [&](int a, int b) {
      auto it = seg_kind.find({std::min(a, b), std::max(a, b)});
      return it != seg_kind.end() && (it->second == WallKind::interior_wall ||
                                     it->second == WallKind::closed_door);
    };

    // Split vertices whose triangle fan is cut by interior walls.
    const std::size_t nv = mesh.vertices.size();
    std::vector<std::vector<int>> fan(nv);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      for (int v : mesh.triangles[t]) fan[v].push_back(static_cast<int>(t));
    }
    const auto base = mesh.triangles;
    for (std::size_t v = 0; v < nv; ++v) {
      const auto& f = fan[v];
      if (f.size() < 2) continue;
      std::vector<int> parent(f.size());
      std::iota(parent.begin(), parent.end(), 0);
      auto find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
      };
      for (std::size_t i = 0; i < f.size(); ++i) {
        for (std::size_t j = i + 1; j < f.size(); ++j) {
          for (int w : base[f[i]]) {
            if (w == static_cast<int>(v)) continue;
            const auto& other = base[f[j]];
            if (std::find(other.begin(), other.end(), w) == other.end()) continue;
            if (is_wall(static_cast<int>(v), w)) continue;
            parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
          }
        }
      }
      std::map<int, int> copy_of;  // component root -> vertex id
      for (std::size_t i = 0; i < f.size(); ++i) {
        const int root = find(static_cast<int>(i));
        auto it = copy_of.find(root);
        int id;
        if (it == copy_of.end()) {
          if (copy_of.empty()) {
            id = static_cast<int>(v);
          } else {
            id = static_cast<int>(mesh.vertices.size());
            mesh.vertices.push_back(mesh.vertices[v]);
            original.push_back(original[v]);
          }
          copy_of.emplace(root, id);
        } else {
          id = it->second;
        }
        for (auto& corner : mesh.triangles[f[i]]) {
          if (corner == static_cast<int>(v)) corner = id;
        }
      }
    }

    // Boundary edges are those used by exactly one triangle.
    std::map<std::pair<int, int>, int> uses;
    for (const auto& t : mesh.triangles) {
      for (int k = 0; k < 3; ++k) {
        const int a = t[k], b = t[(k + 1) % 3];
        ++uses[{std::min(a, b), std::max(a, b)}];
      }
    }
    std::map<std::pair<int, int>, WallKind> orig_kind;
    for (const auto& s : segs_) {
      orig_kind[{std::min(s.a, s.b), std::max(s.a, s.b)}] = s.kind;
    }
    for (const auto& t : mesh.triangles) {
      for (int k = 0; k < 3; ++k) {
        const int a = t[k], b = t[(k + 1) % 3];
        if (uses[{std::min(a, b), std::max(a, b)}] != 1) continue;
        const int oa = original[a], ob = original[b];
        auto it = orig_kind.find({std::min(oa, ob), std::max(oa, ob)});
        if (it == orig_kind.end()) {
          throw MeshingError("boundary edge does not lie on a wall or obstacle");
        }
        mesh.boundary_edges.push_back({a, b, it->second});
      }
    }
    return mesh;
  }

  const FloorPlan& plan_;
  double target_;
  Triangulation tri_;
  std::vector<Subsegment> segs_;
  std::deque<int> pending_;
  std::size_t max_vertices_ = 0;
};

}  // namespace

Mesh mesh_domain(const FloorPlan& plan, double target_edge) {
  if (!(target_edge > 0.0) || !std::isfinite(target_edge)) {
    throw ValidationError("mesh_size", "target edge length must be positive");
  }
  Refiner refiner(plan, target_edge);
  Mesh mesh = refiner.run();
  const double min_angle = mesh.min_angle_degrees();
  if (min_angle < 20.0) {
    throw MeshingError("mesh quality gate failed: minimum angle " +
                       std::to_string(min_angle) + " degrees");
  }
  return mesh;
}

}  // namespace aerosim
