#include "echomap/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include "echomap/errors.hpp"

namespace echomap {

Line2 Line2::from_normal_offset(Point2 normal, double offset) {
  const double len = norm(normal);
  if (!(len > 0.0) || !std::isfinite(len) || !std::isfinite(offset)) {
    throw DegenerateInput("line normal must be finite and nonzero");
  }
  Point2 n = normal / len;
  double c = offset / len;
  bool flip = false;
  if (c < 0.0) {
    flip = true;
  } else if (c == 0.0) {
    flip = n.x < 0.0 || (n.x == 0.0 && n.y < 0.0);
  }
  if (flip) {
    n = -n;
    c = -c;
  }
  // Exact zeros keep the tie-break stable for axis-aligned lines.
  if (n.x == 0.0) n.x = 0.0;
  if (n.y == 0.0) n.y = 0.0;
  return Line2(n, c);
}

Line2 Line2::through(Point2 a, Point2 b) {
  if (distance(a, b) <= Tolerances::kMinSegmentLength) {
    throw DegenerateInput("line through coincident points");
  }
  return through_with_direction(a, b - a);
}

Line2 Line2::through_with_direction(Point2 p, Point2 dir) {
  const Point2 n{-dir.y, dir.x};
  return from_normal_offset(n, dot(n, p));
}

double Line2::angle() const {
  const Point2 t = tangent();
  double a = std::atan2(t.y, t.x);
  if (a < 0.0) a += std::numbers::pi;
  if (a >= std::numbers::pi) a -= std::numbers::pi;
  return a;
}

bool Line2::approx_equal(const Line2& other, double tol) const {
  return std::abs(normal_.x - other.normal_.x) <= tol && std::abs(normal_.y - other.normal_.y) <= tol &&
         std::abs(offset_ - other.offset_) <= tol;
}

Segment2 Segment2::make(Point2 a, Point2 b) {
  if (distance(a, b) <= Tolerances::kMinSegmentLength) {
    throw DegenerateInput("segment endpoints coincide");
  }
  return Segment2{a, b};
}

double signed_area(std::span<const Point2> ring) {
  double twice = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    twice += cross(ring[i], ring[(i + 1) % ring.size()]);
  }
  return twice / 2.0;
}

namespace {

int orientation(Point2 a, Point2 b, Point2 c) {
  const double v = cross(b - a, c - a);
  if (std::abs(v) <= Tolerances::kGeometricEps) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) - Tolerances::kGeometricEps <= p.x && p.x <= std::max(a.x, b.x) + Tolerances::kGeometricEps &&
         std::min(a.y, b.y) - Tolerances::kGeometricEps <= p.y && p.y <= std::max(a.y, b.y) + Tolerances::kGeometricEps;
}

bool segments_touch(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  return o4 == 0 && on_segment(q1, q2, p2);
}

}  // namespace

bool is_simple_ring(std::span<const Point2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (distance(ring[i], ring[(i + 1) % n]) <= Tolerances::kMinSegmentLength) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_touch(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n])) return false;
    }
  }
  return true;
}

Polygon2::Polygon2(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw DegenerateInput("polygon needs at least 3 vertices");
  for (const auto& v : vertices_) {
    if (!v.finite()) throw DegenerateInput("polygon vertex is not finite");
  }
  if (!is_simple_ring(vertices_)) throw DegenerateInput("polygon is not simple");
  if (!(echomap::signed_area(vertices_) > 0.0)) throw DegenerateInput("polygon must be counter-clockwise with positive area");
}

Polygon2 Polygon2::rectangle(double width, double height, Point2 origin) {
  return Polygon2({origin, origin + Point2{width, 0}, origin + Point2{width, height}, origin + Point2{0, height}});
}

Segment2 Polygon2::edge(std::size_t i) const {
  return Segment2{vertices_[i % vertices_.size()], vertices_[(i + 1) % vertices_.size()]};
}

double Polygon2::signed_area() const { return echomap::signed_area(vertices_); }

Point2 mirror_point(Point2 p, const Line2& l) {
  return p - l.normal() * (2.0 * point_side(p, l));
}

Line2 wall_line_from_source_and_is(Point2 source, Point2 image) {
  if (distance(source, image) <= Tolerances::kMinBisectorDistance) {
    throw DegenerateInput("source and image source coincide");
  }
  const Point2 n = image - source;
  return Line2::from_normal_offset(n, dot(n, midpoint(source, image)));
}

std::optional<Point2> line_intersection(const Line2& l1, const Line2& l2) {
  const double det = cross(l1.normal(), l2.normal());
  if (std::abs(det) < Tolerances::kParallelSine) return std::nullopt;
  // Cramer's rule on n1.p = c1, n2.p = c2.
  const double x = (l1.offset() * l2.normal().y - l2.offset() * l1.normal().y) / det;
  const double y = (l1.normal().x * l2.offset() - l2.normal().x * l1.offset()) / det;
  return Point2{x, y};
}

std::optional<Point2> segment_line_intersection(Point2 a, Point2 b, const Line2& l) {
  const double sa = point_side(a, l);
  const double sb = point_side(b, l);
  const double denom = sa - sb;
  if (std::abs(denom) < Tolerances::kGeometricEps) return std::nullopt;
  const double t = sa / denom;
  if (t < -Tolerances::kGeometricEps || t > 1.0 + Tolerances::kGeometricEps) return std::nullopt;
  return a + (b - a) * std::clamp(t, 0.0, 1.0);
}

double point_side(Point2 p, const Line2& l) { return dot(l.normal(), p) - l.offset(); }

double point_segment_distance(Point2 p, const Segment2& s) {
  const Point2 d = s.b - s.a;
  const double len2 = dot(d, d);
  const double t = len2 > 0.0 ? std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0) : 0.0;
  return distance(p, s.a + d * t);
}

double distance_to_boundary(const Polygon2& poly, Point2 p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    best = std::min(best, point_segment_distance(p, poly.edge(i)));
  }
  return best;
}

bool polygon_contains(const Polygon2& poly, Point2 p) {
  if (distance_to_boundary(poly, p) <= Tolerances::kGeometricEps) return false;
  // Winding number; robust for any simple polygon once boundary hits are excluded.
  int winding = 0;
  const auto verts = poly.vertices();
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const Point2 a = verts[i];
    const Point2 b = verts[(i + 1) % verts.size()];
    if (a.y <= p.y) {
      if (b.y > p.y && cross(b - a, p - a) > 0) ++winding;
    } else if (b.y <= p.y && cross(b - a, p - a) < 0) {
      --winding;
    }
  }
  return winding != 0;
}

}  // namespace echomap
