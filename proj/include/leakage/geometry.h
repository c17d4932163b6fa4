#ifndef LEAKAGE_GEOMETRY_H_
#define LEAKAGE_GEOMETRY_H_

#include <cmath>

namespace leakage {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

struct Segment {
  Vec2 a;
  Vec2 b;
};

// Axis-aligned rectangle, closed on all sides.
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  bool contains(Vec2 p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }
  double area() const { return (x1 - x0) * (y1 - y0); }
};

// Closed segment test: touching endpoints and collinear overlap both count as
// an intersection.
bool segments_intersect(const Segment& s, const Segment& t);

double point_segment_distance(Vec2 p, const Segment& s);

// True when some point of segment s lies within `radius` of `center`.
bool segment_touches_disc(const Segment& s, Vec2 center, double radius);

// Rotates p counter-clockwise about pivot by `radians`.
Vec2 rotate_about(Vec2 p, Vec2 pivot, double radians);

}  // namespace leakage

#endif  // LEAKAGE_GEOMETRY_H_
