#include "leakage/geometry.h"

#include <algorithm>

namespace leakage {
namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

// c is collinear with a-b; is it inside the bounding box of a-b?
bool on_segment(Vec2 a, Vec2 b, Vec2 c) {
  return c.x >= std::min(a.x, b.x) && c.x <= std::max(a.x, b.x) &&
         c.y >= std::min(a.y, b.y) && c.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(const Segment& s, const Segment& t) {
  const int o1 = orientation(s.a, s.b, t.a);
  const int o2 = orientation(s.a, s.b, t.b);
  const int o3 = orientation(t.a, t.b, s.a);
  const int o4 = orientation(t.a, t.b, s.b);

  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(s.a, s.b, t.a)) return true;
  if (o2 == 0 && on_segment(s.a, s.b, t.b)) return true;
  if (o3 == 0 && on_segment(t.a, t.b, s.a)) return true;
  if (o4 == 0 && on_segment(t.a, t.b, s.b)) return true;
  return false;
}

double point_segment_distance(Vec2 p, const Segment& s) {
  const Vec2 d = s.b - s.a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return distance(p, s.a);
  const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
  return distance(p, s.a + t * d);
}

bool segment_touches_disc(const Segment& s, Vec2 center, double radius) {
  return point_segment_distance(center, s) <= radius;
}

Vec2 rotate_about(Vec2 p, Vec2 pivot, double radians) {
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  const Vec2 r = p - pivot;
  return {pivot.x + c * r.x - s * r.y, pivot.y + s * r.x + c * r.y};
}

}  // namespace leakage
