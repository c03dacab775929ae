#include <cmath>
#include <numbers>

#include "doctest.h"
#include "echomap/errors.hpp"
#include "echomap/geometry.hpp"
#include "oracles.hpp"

using namespace echomap;

namespace {

Line2 vertical(double x) { return Line2::from_normal_offset({1, 0}, x); }
Line2 horizontal(double y) { return Line2::from_normal_offset({0, 1}, y); }

bool near(Point2 a, Point2 b, double tol = 1e-9) { return distance(a, b) <= tol; }

Line2 random_line(oracle::Gen& g) {
  const double a = g.uniform(0, 2 * std::numbers::pi);
  return Line2::from_normal_offset({std::cos(a), std::sin(a)}, g.uniform(-10, 10));
}

}  // namespace

TEST_CASE("mirror_point on axis lines") {
  CHECK(near(mirror_point({1, 2}, horizontal(0)), {1, -2}));
  CHECK(near(mirror_point({2, 1}, vertical(4)), {6, 1}));
}

TEST_CASE("mirror_point is an involution") {
  oracle::Gen g(11);
  for (int i = 0; i < 5000; ++i) {
    const Line2 l = random_line(g);
    const Point2 p{g.uniform(-20, 20), g.uniform(-20, 20)};
    const Point2 m = mirror_point(p, l);
    CHECK(near(mirror_point(m, l), p));
    CHECK(std::abs(point_side(midpoint(p, m), l)) <= 1e-9);
  }
}

TEST_CASE("wall_line_from_source_and_is examples") {
  const Line2 a = wall_line_from_source_and_is({0, 0}, {-4, 0});
  CHECK(a.approx_equal(vertical(-2)));
  const Line2 b = wall_line_from_source_and_is({0, 0}, {0, -2});
  CHECK(b.approx_equal(horizontal(-1)));
  const Line2 c = wall_line_from_source_and_is({1, 1}, {3, 3});
  CHECK(std::abs(point_side({2, 2}, c)) <= 1e-12);
  CHECK(std::abs(std::abs(c.normal().x) - 1 / std::sqrt(2.0)) <= 1e-12);
  CHECK(std::abs(c.normal().x - c.normal().y) <= 1e-12);
  CHECK_THROWS_AS(wall_line_from_source_and_is({1, 1}, {1, 1 + 1e-7}), DegenerateInput);
}

TEST_CASE("bisector maps source onto image") {
  oracle::Gen g(12);
  for (int i = 0; i < 5000; ++i) {
    const Point2 s{g.uniform(-10, 10), g.uniform(-10, 10)};
    const Point2 is{g.uniform(-10, 10), g.uniform(-10, 10)};
    if (distance(s, is) < 1e-3) continue;
    CHECK(near(mirror_point(s, wall_line_from_source_and_is(s, is)), is));
  }
}

TEST_CASE("line canonical form") {
  const Line2 l = Line2::from_normal_offset({0, -2}, 3);
  CHECK(std::abs(norm(l.normal()) - 1) <= 1e-12);
  CHECK(l.offset() >= 0);
  const Line2 through_origin = Line2::from_normal_offset({-1, 0}, 0);
  CHECK(through_origin.normal().x > 0);
  const Line2 through_origin_y = Line2::from_normal_offset({0, -3}, 0);
  CHECK(through_origin_y.normal().y > 0);
  CHECK_THROWS_AS(Line2::from_normal_offset({0, 0}, 1), DegenerateInput);
  CHECK_THROWS_AS(Line2::from_normal_offset({NAN, 1}, 1), DegenerateInput);
}

TEST_CASE("same geometric line compares equal field-wise") {
  oracle::Gen g(13);
  for (int i = 0; i < 2000; ++i) {
    const Point2 a{g.uniform(-10, 10), g.uniform(-10, 10)};
    const Point2 b{g.uniform(-10, 10), g.uniform(-10, 10)};
    if (distance(a, b) < 1e-2) continue;
    const Line2 l1 = Line2::through(a, b);
    const Line2 l2 = Line2::through(b, a);
    const Line2 l3 = Line2::through_with_direction(midpoint(a, b), (a - b) * 3.0);
    const Line2 l4 = Line2::from_normal_offset(l1.normal() * -2.5, -2.5 * l1.offset());
    for (const Line2& other : {l2, l3, l4}) {
      CHECK(std::abs(other.normal().x - l1.normal().x) <= 1e-9);
      CHECK(std::abs(other.normal().y - l1.normal().y) <= 1e-9);
      CHECK(std::abs(other.offset() - l1.offset()) <= 1e-9);
    }
  }
}

TEST_CASE("line_intersection") {
  const auto o = line_intersection(vertical(0), horizontal(0));
  REQUIRE(o);
  CHECK(near(*o, {0, 0}));
  CHECK_FALSE(line_intersection(vertical(0), vertical(3)));
  const auto corner = line_intersection(vertical(6), horizontal(5));
  REQUIRE(corner);
  CHECK(near(*corner, {6, 5}));
}

TEST_CASE("point_side") {
  CHECK(std::abs(std::abs(point_side({0, 0}, vertical(-2))) - 2) <= 1e-12);
  CHECK(point_side({-2, 7}, vertical(-2)) == doctest::Approx(0).epsilon(1e-12));
  CHECK(std::abs(point_side({3, 4}, horizontal(0))) == doctest::Approx(4));
  // Sign follows the canonical normal.
  const Line2 l = vertical(-2);
  CHECK(point_side({0, 0}, l) * point_side({-5, 0}, l) < 0);
  CHECK((point_side({0, 0}, l) > 0) == (dot(l.normal(), Point2{2, 0}) > 0));
}

TEST_CASE("segment intersection and distances") {
  CHECK(segment_line_intersection({0, 0}, {2, 0}, vertical(1)));
  CHECK_FALSE(segment_line_intersection({0, 0}, {0.5, 0}, vertical(1)));
  CHECK_FALSE(segment_line_intersection({0, 0}, {0, 2}, vertical(1)));
  const Segment2 s = Segment2::make({0, 0}, {4, 0});
  CHECK(point_segment_distance({2, 3}, s) == doctest::Approx(3));
  CHECK(point_segment_distance({7, 4}, s) == doctest::Approx(5));
  CHECK_THROWS_AS(Segment2::make({1, 1}, {1, 1}), DegenerateInput);
}

TEST_CASE("polygon validation") {
  CHECK_THROWS_AS(Polygon2({{0, 0}, {1, 0}}), DegenerateInput);
  CHECK_THROWS_AS(Polygon2({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), DegenerateInput);  // clockwise
  CHECK_THROWS_AS(Polygon2({{0, 0}, {2, 2}, {2, 0}, {0, 2}}), DegenerateInput);  // bow tie
  CHECK_THROWS_AS(Polygon2({{0, 0}, {1, 0}, {2, 0}}), DegenerateInput);          // zero area
  const Polygon2 r = Polygon2::rectangle(6, 5);
  CHECK(r.size() == 4);
  CHECK(r.signed_area() == doctest::Approx(30));
}

TEST_CASE("polygon_contains examples") {
  const Polygon2 unit = Polygon2::rectangle(1, 1);
  CHECK(polygon_contains(unit, {0.5, 0.5}));
  CHECK_FALSE(polygon_contains(unit, {2, 0}));
  CHECK_FALSE(polygon_contains(unit, {1, 0.5}));  // boundary counts as outside
  CHECK_FALSE(polygon_contains(unit, {0, 0}));
  const Polygon2 room({{0, 0}, {6, 0}, {6, 5}, {0, 5}});
  CHECK(polygon_contains(room, {3, 2.5}));
}

TEST_CASE("polygon_contains agrees with ray casting") {
  const std::vector<std::vector<Point2>> shapes = {
      {{0, 0}, {6, 0}, {6, 5}, {0, 5}},
      {{0, 0}, {4, 0}, {4, 1}, {1, 1}, {1, 3}, {0, 3}},                  // L shape
      {{0, 0}, {5, 1}, {6, 4}, {3, 6}, {-1, 3}},                         // convex pentagon
      {{0, 0}, {3, 2}, {6, 0}, {5, 5}, {3, 3}, {1, 5}},                  // non-convex
  };
  oracle::Gen g(14);
  for (const auto& verts : shapes) {
    const Polygon2 poly(verts);
    std::vector<oracle::Pt> ref;
    for (auto v : verts) ref.push_back({v.x, v.y});
    int agreements = 0, checked = 0;
    for (int i = 0; i < 10000; ++i) {
      const Point2 p{g.uniform(-2, 8), g.uniform(-2, 8)};
      // Ray casting is ambiguous within rounding of the boundary.
      if (oracle::edge_distance(ref, {p.x, p.y}) < 1e-7) continue;
      ++checked;
      agreements += polygon_contains(poly, p) == oracle::ray_cast_inside(ref, {p.x, p.y});
    }
    CHECK(agreements == checked);
  }
}

TEST_CASE("distance_to_boundary") {
  const Polygon2 room = Polygon2::rectangle(6, 5);
  CHECK(distance_to_boundary(room, {1, 2}) == doctest::Approx(1));
  CHECK(distance_to_boundary(room, {3, 4.5}) == doctest::Approx(0.5));
}
