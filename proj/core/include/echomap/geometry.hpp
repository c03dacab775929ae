#pragma once

// Exact 2D primitives shared by the simulator, the image-source solver and
// the planner. Lines are kept in canonical normal/offset form so that two
// lines built from the same geometry compare equal field-wise.

#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace echomap {

/// Numeric tolerances, in meters unless noted. One record for the whole
/// library so experiments stay reproducible.
struct Tolerances {
  static constexpr double kGeometricEps = 1e-9;
  static constexpr double kUnitNormalEps = 1e-12;
  static constexpr double kMinSegmentLength = 1e-9;
  static constexpr double kMinBisectorDistance = 1e-6;
  static constexpr double kParallelSine = 1e-9;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
  constexpr Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
  constexpr Point2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Point2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Point2 operator-() const { return {-x, -y}; }
  constexpr bool operator==(const Point2&) const = default;

  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

constexpr Point2 operator*(double s, Point2 p) { return p * s; }

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
constexpr Point2 midpoint(Point2 a, Point2 b) { return {(a.x + b.x) / 2, (a.y + b.y) / 2}; }

/// Infinite line { p : dot(normal, p) == offset } with |normal| == 1 and
/// offset >= 0. When offset == 0 the normal has x > 0, or y > 0 when x == 0.
class Line2 {
 public:
  /// The line x = 0.
  Line2() = default;

  /// Builds a canonical line from any nonzero normal and offset. Throws
  /// DegenerateInput for a zero or non-finite normal.
  static Line2 from_normal_offset(Point2 normal, double offset);
  /// Line through two distinct points.
  static Line2 through(Point2 a, Point2 b);
  /// Line through `p` with direction `dir`.
  static Line2 through_with_direction(Point2 p, Point2 dir);

  Point2 normal() const { return normal_; }
  double offset() const { return offset_; }
  /// Unit direction along the line: the normal rotated clockwise.
  Point2 tangent() const { return {normal_.y, -normal_.x}; }
  /// Closest point of the line to the origin.
  Point2 foot_from_origin() const { return normal_ * offset_; }
  /// Orientation of the line direction in [0, pi).
  double angle() const;

  bool approx_equal(const Line2& other, double tol = Tolerances::kGeometricEps) const;

 private:
  Line2(Point2 n, double c) : normal_(n), offset_(c) {}

  Point2 normal_{1.0, 0.0};
  double offset_ = 0.0;
};

struct Segment2 {
  Point2 a;
  Point2 b;

  /// Throws DegenerateInput when the endpoints coincide.
  static Segment2 make(Point2 a, Point2 b);
  double length() const { return distance(a, b); }
  Line2 line() const { return Line2::through(a, b); }
  Point2 midpoint() const { return echomap::midpoint(a, b); }
};

/// Simple polygon with counter-clockwise vertices.
class Polygon2 {
 public:
  /// Validates >= 3 vertices, simplicity and strictly positive signed area.
  /// Throws DegenerateInput otherwise.
  explicit Polygon2(std::vector<Point2> vertices);

  /// Axis-aligned rectangle [x0, x0 + width] x [y0, y0 + height].
  static Polygon2 rectangle(double width, double height, Point2 origin = {});

  std::span<const Point2> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  /// Edge i runs from vertex i to vertex i+1 (wrapping).
  Segment2 edge(std::size_t i) const;
  double signed_area() const;

 private:
  std::vector<Point2> vertices_;
};

/// Reflection of `p` across `l`.
Point2 mirror_point(Point2 p, const Line2& l);

/// Perpendicular bisector of (source, image): the wall that maps source to
/// image. Throws DegenerateInput when the points are closer than 1e-6 m.
Line2 wall_line_from_source_and_is(Point2 source, Point2 image);

/// Unique intersection, or nullopt for (near-)parallel lines.
std::optional<Point2> line_intersection(const Line2& l1, const Line2& l2);

/// Intersection of the closed segment [a, b] with `l`, or nullopt when the
/// segment does not reach the line (or lies parallel to it).
std::optional<Point2> segment_line_intersection(Point2 a, Point2 b, const Line2& l);

/// Signed perpendicular distance dot(normal, p) - offset.
double point_side(Point2 p, const Line2& l);

/// Absolute perpendicular distance from `p` to `l`.
inline double point_line_distance(Point2 p, const Line2& l) { return std::abs(point_side(p, l)); }

/// Distance from `p` to the closed segment `s`.
double point_segment_distance(Point2 p, const Segment2& s);

/// True iff `p` lies strictly inside; points within 1e-9 m of the boundary
/// count as outside.
bool polygon_contains(const Polygon2& poly, Point2 p);

/// Distance from `p` to the nearest polygon edge.
double distance_to_boundary(const Polygon2& poly, Point2 p);

/// Signed area of an arbitrary vertex ring (shoelace).
double signed_area(std::span<const Point2> ring);

/// True iff no two non-adjacent edges of the ring touch.
bool is_simple_ring(std::span<const Point2> ring);

}  // namespace echomap
