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

#include "aerosim/geometry.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "aerosim/error.hpp"

namespace aerosim {
namespace {

constexpr double kTol = 1e-9;
constexpr double kSideProbe = 1e-6;

struct AxisSegment {
  Point a;
  Point b;  // a < b along the axis
  bool horizontal;
};

std::vector<AxisSegment> rect_edges(const Rect& r) {
  return {
      {{r.x, r.y}, {r.x_max(), r.y}, true},
      {{r.x, r.y_max()}, {r.x_max(), r.y_max()}, true},
      {{r.x, r.y}, {r.x, r.y_max()}, false},
      {{r.x_max(), r.y}, {r.x_max(), r.y_max()}, false},
  };
}

bool on_segment(const AxisSegment& s, Point p, double tol) {
  if (s.horizontal) {
    return std::abs(p.y - s.a.y) <= tol && p.x >= s.a.x - tol &&
           p.x <= s.b.x + tol;
  }
  return std::abs(p.x - s.a.x) <= tol && p.y >= s.a.y - tol &&
         p.y <= s.b.y + tol;
}

double along(const AxisSegment& s, Point p) {
  return s.horizontal ? p.x : p.y;
}

int union_find(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

double point_segment_distance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  double t = dot(p - a, ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + t * ab);
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const double d1 = orient(c, d, a);
  const double d2 = orient(c, d, b);
  const double d3 = orient(a, b, c);
  const double d4 = orient(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  auto within = [](Point p, Point q, Point r) {
    return std::min(p.x, q.x) - kTol <= r.x && r.x <= std::max(p.x, q.x) + kTol &&
           std::min(p.y, q.y) - kTol <= r.y && r.y <= std::max(p.y, q.y) + kTol;
  };
  if (d1 == 0 && within(c, d, a)) return true;
  if (d2 == 0 && within(c, d, b)) return true;
  if (d3 == 0 && within(a, b, c)) return true;
  if (d4 == 0 && within(a, b, d)) return true;
  return false;
}

double segment_segment_distance(Point a, Point b, Point c, Point d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d),
                   point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b),
                   point_segment_distance(d, a, b)});
}

bool Rect::contains(Point p, double tol) const {
  return p.x >= x - tol && p.x <= x_max() + tol && p.y >= y - tol &&
         p.y <= y_max() + tol;
}

bool Rect::contains_strictly(Point p, double tol) const {
  return p.x > x + tol && p.x < x_max() - tol && p.y > y + tol &&
         p.y < y_max() - tol;
}

double Rect::distance_to(Point p) const {
  const double dx = std::max({x - p.x, 0.0, p.x - x_max()});
  const double dy = std::max({y - p.y, 0.0, p.y - y_max()});
  return std::hypot(dx, dy);
}

double Rect::distance_to_segment(Point a, Point b) const {
  if (contains(a) || contains(b)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : rect_edges(*this)) {
    best = std::min(best, segment_segment_distance(a, b, e.a, e.b));
  }
  return best;
}

const char* to_string(WallKind kind) {
  switch (kind) {
    case WallKind::outer_wall:
      return "outer_wall";
    case WallKind::interior_wall:
      return "interior_wall";
    case WallKind::obstacle:
      return "obstacle";
    case WallKind::closed_door:
      return "closed_door";
  }
  return "unknown";
}

FloorPlan FloorPlan::build(FloorPlanSpec spec) {
  FloorPlan plan;
  if (spec.rooms.empty()) {
    throw ValidationError("/floorplan/rooms", "at least one room is required");
  }
  if (!(spec.height > 0.0)) {
    throw ValidationError("/floorplan/height", "must be positive");
  }
  for (std::size_t i = 0; i < spec.rooms.size(); ++i) {
    const Rect& r = spec.rooms[i].bounds;
    if (!(r.width > 0.0) || !(r.length > 0.0)) {
      throw ValidationError("/floorplan/rooms/" + std::to_string(i),
                            "room '" + spec.rooms[i].name +
                                "' must have positive extents");
    }
  }
  for (std::size_t i = 0; i < spec.rooms.size(); ++i) {
    for (std::size_t j = i + 1; j < spec.rooms.size(); ++j) {
      const Rect& a = spec.rooms[i].bounds;
      const Rect& b = spec.rooms[j].bounds;
      const double ox = std::min(a.x_max(), b.x_max()) - std::max(a.x, b.x);
      const double oy = std::min(a.y_max(), b.y_max()) - std::max(a.y, b.y);
      if (ox > kTol && oy > kTol) {
        throw ValidationError("/floorplan/rooms/" + std::to_string(j),
                              "rooms '" + spec.rooms[i].name + "' and '" +
                                  spec.rooms[j].name + "' overlap");
      }
    }
  }
  plan.spec_ = std::move(spec);
  const auto& rooms = plan.spec_.rooms;

  for (std::size_t i = 0; i < plan.spec_.obstacles.size(); ++i) {
    const Obstacle& o = plan.spec_.obstacles[i];
    const std::string field = "/floorplan/obstacles/" + std::to_string(i);
    if (!(o.bounds.width > 0.0) || !(o.bounds.length > 0.0)) {
      throw ValidationError(field, "obstacle '" + o.name +
                                       "' must have positive extents");
    }
    const bool inside = std::any_of(rooms.begin(), rooms.end(), [&](const Room& r) {
      return r.bounds.contains({o.bounds.x, o.bounds.y}, kTol) &&
             r.bounds.contains({o.bounds.x_max(), o.bounds.y_max()}, kTol);
    });
    if (!inside) {
      throw ValidationError(field, "obstacle '" + o.name +
                                       "' does not lie inside a single room");
    }
    if (!o.blocks_aerosol) continue;
    for (std::size_t j = 0; j < i; ++j) {
      const Obstacle& q = plan.spec_.obstacles[j];
      if (!q.blocks_aerosol) continue;
      const double ox = std::min(o.bounds.x_max(), q.bounds.x_max()) -
                        std::max(o.bounds.x, q.bounds.x);
      const double oy = std::min(o.bounds.y_max(), q.bounds.y_max()) -
                        std::max(o.bounds.y, q.bounds.y);
      if (ox > kTol && oy > kTol) {
        throw ValidationError(field, "blocking obstacles '" + q.name +
                                         "' and '" + o.name + "' overlap");
      }
    }
  }

  // Doors: find the room edges that contain the door span.
  for (std::size_t i = 0; i < plan.spec_.doors.size(); ++i) {
    const Door& d = plan.spec_.doors[i];
    const std::string field = "/floorplan/doors/" + std::to_string(i);
    if (!(d.width > 0.0)) {
      throw ValidationError(field, "door '" + d.name + "' must have positive width");
    }
    std::vector<std::pair<int, AxisSegment>> hits;
    for (std::size_t r = 0; r < rooms.size(); ++r) {
      for (const auto& e : rect_edges(rooms[r].bounds)) {
        const Point lo = e.horizontal ? Point{d.centre.x - 0.5 * d.width, d.centre.y}
                                      : Point{d.centre.x, d.centre.y - 0.5 * d.width};
        const Point hi = e.horizontal ? Point{d.centre.x + 0.5 * d.width, d.centre.y}
                                      : Point{d.centre.x, d.centre.y + 0.5 * d.width};
        if (on_segment(e, lo, kTol) && on_segment(e, hi, kTol)) {
          hits.emplace_back(static_cast<int>(r), e);
        }
      }
    }
    if (hits.empty()) {
      throw ValidationError(field, "door '" + d.name +
                                       "' does not lie on a room wall (off-wall)");
    }
    ResolvedDoor rd;
    rd.door = d;
    rd.horizontal = hits.front().second.horizontal;
    rd.a = rd.horizontal ? Point{d.centre.x - 0.5 * d.width, d.centre.y}
                         : Point{d.centre.x, d.centre.y - 0.5 * d.width};
    rd.b = rd.horizontal ? Point{d.centre.x + 0.5 * d.width, d.centre.y}
                         : Point{d.centre.x, d.centre.y + 0.5 * d.width};
    std::vector<int> sides;
    for (const auto& [room, edge] : hits) {
      if (edge.horizontal != rd.horizontal) continue;
      if (std::find(sides.begin(), sides.end(), room) == sides.end()) {
        sides.push_back(room);
      }
    }
    if (sides.size() == 2) {
      rd.room_a = sides[0];
      rd.room_b = sides[1];
    } else if (sides.size() == 1) {
      // Outer door: the far side of the span must be outside every room.
      const Rect& own = rooms[sides[0]].bounds;
      const Point c = own.centre();
      const Point normal = rd.horizontal ? Point{0.0, d.centre.y > c.y ? 1.0 : -1.0}
                                         : Point{d.centre.x > c.x ? 1.0 : -1.0, 0.0};
      for (double t : {0.05, 0.5, 0.95}) {
        const Point probe = rd.a + t * (rd.b - rd.a) + kSideProbe * normal;
        if (plan.room_at(probe) >= 0) {
          throw ValidationError(field, "door '" + d.name +
                                           "' does not lie on a single shared wall");
        }
      }
      rd.room_a = sides[0];
      rd.room_b = -1;
    } else {
      throw ValidationError(field, "door '" + d.name + "' is ambiguous");
    }
    plan.doors_.push_back(rd);
  }

  // Connectivity of rooms through interior doors.
  std::vector<int> parent(rooms.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& rd : plan.doors_) {
    if (rd.room_b < 0) continue;
    parent[union_find(parent, rd.room_a)] = union_find(parent, rd.room_b);
  }
  for (std::size_t r = 1; r < rooms.size(); ++r) {
    if (union_find(parent, static_cast<int>(r)) != union_find(parent, 0)) {
      throw ValidationError("/floorplan/rooms/" + std::to_string(r),
                            "disconnected free space: room '" + rooms[r].name +
                                "' is not reachable from room '" +
                                rooms[0].name + "' through doors");
    }
  }

  // Boundary arrangement.
  std::vector<AxisSegment> lines;
  for (const auto& r : rooms) {
    for (const auto& e : rect_edges(r.bounds)) lines.push_back(e);
  }
  for (const auto& o : plan.spec_.obstacles) {
    if (!o.blocks_aerosol) continue;
    for (const auto& e : rect_edges(o.bounds)) lines.push_back(e);
  }
  std::vector<Point> door_points;
  for (const auto& rd : plan.doors_) {
    door_points.push_back(rd.a);
    door_points.push_back(rd.b);
  }

  std::map<std::pair<long long, long long>, BoundaryPiece> pieces;
  auto key_of = [](Point a, Point b) {
    auto q = [](double v) { return static_cast<long long>(std::llround(v * 1e7)); };
    const long long ka = q(a.x) * 1000003LL + q(a.y);
    const long long kb = q(b.x) * 1000003LL + q(b.y);
    return std::make_pair(std::min(ka, kb), std::max(ka, kb));
  };

  for (const auto& s : lines) {
    std::vector<double> cuts = {along(s, s.a), along(s, s.b)};
    auto add_cut = [&](Point p) {
      if (on_segment(s, p, kTol)) cuts.push_back(along(s, p));
    };
    for (const auto& t : lines) {
      add_cut(t.a);
      add_cut(t.b);
      if (t.horizontal != s.horizontal) {
        const Point x = s.horizontal ? Point{t.a.x, s.a.y} : Point{s.a.x, t.a.y};
        if (on_segment(t, x, kTol)) add_cut(x);
      }
    }
    for (const auto& p : door_points) add_cut(p);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> uniq;
    for (double c : cuts) {
      if (uniq.empty() || c - uniq.back() > kTol) uniq.push_back(c);
    }
    for (std::size_t k = 0; k + 1 < uniq.size(); ++k) {
      const Point a = s.horizontal ? Point{uniq[k], s.a.y} : Point{s.a.x, uniq[k]};
      const Point b = s.horizontal ? Point{uniq[k + 1], s.a.y}
                                   : Point{s.a.x, uniq[k + 1]};
      const Point mid = 0.5 * (a + b);
      const Point normal = s.horizontal ? Point{0.0, 1.0} : Point{1.0, 0.0};
      const bool left = plan.in_aerosol_domain(mid + kSideProbe * normal);
      const bool right = plan.in_aerosol_domain(mid - kSideProbe * normal);
      if (!left && !right) continue;
      const ResolvedDoor* door = nullptr;
      for (const auto& rd : plan.doors_) {
        if (rd.horizontal != s.horizontal) continue;
        const AxisSegment span{rd.a, rd.b, rd.horizontal};
        if (on_segment(span, mid, kTol)) door = &rd;
      }
      WallKind kind;
      if (left && right) {
        if (door != nullptr && door->door.aerosol_open) continue;
        kind = door != nullptr ? WallKind::closed_door : WallKind::interior_wall;
      } else {
        const Point outside = left ? mid - kSideProbe * normal : mid + kSideProbe * normal;
        if (plan.room_at(outside) >= 0) {
          kind = WallKind::obstacle;
        } else {
          kind = door != nullptr ? WallKind::closed_door : WallKind::outer_wall;
        }
      }
      pieces.emplace(key_of(a, b), BoundaryPiece{a, b, kind, left && right});
    }
  }
  for (const auto& [key, piece] : pieces) {
    plan.boundary_.push_back(piece);
    if (piece.kind == WallKind::obstacle) continue;
    if (piece.kind == WallKind::closed_door && piece.interior) continue;
    plan.walls_.push_back(piece);
  }
  // Interior door spans may have been split by other geometry; merge per door.
  std::vector<std::pair<Point, Point>> gaps;
  for (const auto& rd : plan.doors_) {
    if (rd.room_b >= 0) gaps.emplace_back(rd.a, rd.b);
  }
  plan.door_gaps_ = std::move(gaps);
  return plan;
}

int FloorPlan::room_at(Point p) const {
  for (std::size_t i = 0; i < spec_.rooms.size(); ++i) {
    if (spec_.rooms[i].bounds.contains(p)) return static_cast<int>(i);
  }
  return -1;
}

bool FloorPlan::in_aerosol_domain(Point p) const {
  if (room_at(p) < 0) return false;
  for (const auto& o : spec_.obstacles) {
    if (o.blocks_aerosol && o.bounds.contains_strictly(p)) return false;
  }
  return true;
}

double FloorPlan::clearance_at(Point p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& w : walls_) {
    best = std::min(best, point_segment_distance(p, w.a, w.b));
  }
  for (const auto& o : spec_.obstacles) {
    best = std::min(best, o.bounds.distance_to(p));
  }
  return best;
}

bool FloorPlan::walkable(Point p, double clearance) const {
  if (room_at(p) < 0) return false;
  for (const auto& o : spec_.obstacles) {
    if (o.bounds.contains(p)) return false;
  }
  return clearance_at(p) >= clearance - kTol;
}

double FloorPlan::room_area() const {
  double a = 0.0;
  for (const auto& r : spec_.rooms) a += r.bounds.area();
  return a;
}

double FloorPlan::aerosol_area() const {
  double a = room_area();
  for (const auto& o : spec_.obstacles) {
    if (o.blocks_aerosol) a -= o.bounds.area();
  }
  return a;
}

double FloorPlan::largest_room_volume() const {
  double best = 0.0;
  for (const auto& r : spec_.rooms) best = std::max(best, r.bounds.area());
  return best * spec_.height;
}

Rect FloorPlan::bounding_box() const {
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = -x0, y1 = -x0;
  for (const auto& r : spec_.rooms) {
    x0 = std::min(x0, r.bounds.x);
    y0 = std::min(y0, r.bounds.y);
    x1 = std::max(x1, r.bounds.x_max());
    y1 = std::max(y1, r.bounds.y_max());
  }
  return {x0, y0, x1 - x0, y1 - y0};
}

}  // namespace aerosim
