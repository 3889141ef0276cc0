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

#ifndef AEROSIM_GEOMETRY_HPP_
#define AEROSIM_GEOMETRY_HPP_

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace aerosim {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Point&, const Point&) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

// Twice the signed area of (a, b, c); positive when counter-clockwise.
inline double orient(Point a, Point b, Point c) {
  return cross(b - a, c - a);
}

double point_segment_distance(Point p, Point a, Point b);
double segment_segment_distance(Point a, Point b, Point c, Point d);
// Proper or touching intersection of closed segments.
bool segments_intersect(Point a, Point b, Point c, Point d);

// Axis-aligned rectangle: origin (x, y), `width` along x, `length` along y.
struct Rect {
  double x = 0.0;
  double y = 0.0;
  double width = 0.0;
  double length = 0.0;

  double x_max() const { return x + width; }
  double y_max() const { return y + length; }
  double area() const { return width * length; }
  Point centre() const { return {x + 0.5 * width, y + 0.5 * length}; }
  bool contains(Point p, double tol = 0.0) const;
  bool contains_strictly(Point p, double tol = 0.0) const;
  double distance_to(Point p) const;  // 0 inside
  double distance_to_segment(Point a, Point b) const;

  friend bool operator==(const Rect&, const Rect&) = default;
};

struct Room {
  std::string name;
  Rect bounds;

  friend bool operator==(const Room&, const Room&) = default;
};

struct Door {
  std::string name;
  Point centre;
  double width = 0.0;
  // A closed door is walkable but blocks aerosol like a wall.
  bool aerosol_open = true;

  friend bool operator==(const Door&, const Door&) = default;
};

struct Obstacle {
  std::string name;
  Rect bounds;
  // True for furniture taller than a person: a hole in the aerosol domain.
  bool blocks_aerosol = false;

  friend bool operator==(const Obstacle&, const Obstacle&) = default;
};

struct FloorPlanSpec {
  std::vector<Room> rooms;
  std::vector<Door> doors;
  std::vector<Obstacle> obstacles;
  double height = 3.0;

  friend bool operator==(const FloorPlanSpec&, const FloorPlanSpec&) = default;
};

enum class WallKind { outer_wall, interior_wall, obstacle, closed_door };
const char* to_string(WallKind kind);

// A maximal piece of boundary between consecutive breakpoints.
struct BoundaryPiece {
  Point a;
  Point b;
  WallKind kind;
  bool interior = false;  // aerosol domain on both sides
};

struct ResolvedDoor {
  Door door;
  bool horizontal = true;  // lies on a line y = const
  Point a;                 // span endpoints
  Point b;
  int room_a = -1;
  int room_b = -1;         // -1 for a door in the outer boundary
};

// Validated indoor domain. Immutable once built.
class FloorPlan {
 public:
  // Throws ValidationError on overlapping rooms, doors off a wall, obstacles
  // outside the rooms, or rooms unreachable through doors.
  static FloorPlan build(FloorPlanSpec spec);

  const FloorPlanSpec& spec() const { return spec_; }
  const std::vector<Room>& rooms() const { return spec_.rooms; }
  const std::vector<Obstacle>& obstacles() const { return spec_.obstacles; }
  const std::vector<ResolvedDoor>& doors() const { return doors_; }
  double height() const { return spec_.height; }

  // Index of the room containing p (closed), or -1.
  int room_at(Point p) const;
  // Inside a room and outside any aerosol-blocking obstacle.
  bool in_aerosol_domain(Point p) const;
  // In the aerosol domain, outside every obstacle, and at least `clearance`
  // from every wall and obstacle.
  bool walkable(Point p, double clearance) const;
  // Distance from p to the nearest wall piece or obstacle.
  double clearance_at(Point p) const;

  const std::vector<BoundaryPiece>& boundary() const { return boundary_; }
  // Walls that block movement: every boundary piece except those of
  // aerosol-blocking obstacles (obstacles are handled as rectangles) and
  // closed interior doors.
  const std::vector<BoundaryPiece>& walls() const { return walls_; }
  // Spans of interior doors, open or closed to aerosol.
  const std::vector<std::pair<Point, Point>>& door_gaps() const {
    return door_gaps_;
  }

  double room_area() const;
  double aerosol_area() const;
  double largest_room_volume() const;
  Rect bounding_box() const;

 private:
  FloorPlanSpec spec_;
  std::vector<ResolvedDoor> doors_;
  std::vector<BoundaryPiece> boundary_;
  std::vector<BoundaryPiece> walls_;
  std::vector<std::pair<Point, Point>> door_gaps_;
};

}  // namespace aerosim

#endif  // AEROSIM_GEOMETRY_HPP_
