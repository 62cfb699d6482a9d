#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace regimesplit {

using Rational = boost::multiprecision::cpp_rational;

/// Parses "p", "p/q" or a plain decimal such as "-2.75" exactly.
/// Throws DomainError on anything else.
Rational parse_rational(const std::string& text);
/// "p/q" in lowest terms, or "p" for integers.
std::string to_string(const Rational& r);
double to_double(const Rational& r);

struct Point {
    Rational x;
    Rational y;

    bool operator==(const Point&) const = default;
};

/// A convex polygon with counterclockwise vertices and no repeated or collinear ones.
class ConvexPolygon {
public:
    /// Drops repeated vertices and vertices on the segment between their neighbours.
    /// Throws DegeneratePolygon if the rest is not a counterclockwise convex polygon
    /// with positive area.
    explicit ConvexPolygon(std::vector<Point> vertices);

    const std::vector<Point>& vertices() const { return vertices_; }

private:
    std::vector<Point> vertices_;
};

/// Shoelace area.
Rational area(const ConvexPolygon& p);

struct Moments {
    Rational x;  ///< integral of x dA
    Rational y;  ///< integral of y dA
};

Moments first_moments(const ConvexPolygon& p);

ConvexPolygon translate(const ConvexPolygon& p, const Rational& dx, const Rational& dy);

enum class CutSide { x_gt, x_lt };

/// Part of p on one side of the line x = t; nullopt when that part has no area.
std::optional<ConvexPolygon> clip_vertical(const ConvexPolygon& p, const Rational& t, CutSide side);

/// |moments of the x > t part|^2 / (area of x > t part * area of x < t part).
/// Throws DegenerateCut when either part has no area.
Rational R_polygon(const ConvexPolygon& p, const Rational& t);

/// The centred integer hexagon on which the cut at x = 1 beats the cut through the mean.
ConvexPolygon counterexample_hexagon();

struct HexagonReport {
    Rational area;
    Moments moments;
    bool centered;
    Rational r0;
    Rational r1;
    bool area_matches;  ///< area == 104
    bool r0_matches;    ///< r0 == 22045/12168
    bool r1_matches;    ///< r1 == 9389/4995
    bool counterexample_holds;  ///< r1 > r0
    bool all_pass;
};

HexagonReport hexagon_counterexample();

struct RSweepRow {
    Rational t;
    std::optional<Rational> r;  ///< empty when the cut is degenerate
    std::string error;
};

std::vector<RSweepRow> R_sweep(const ConvexPolygon& p, const std::vector<Rational>& t_values);

/// Convex hull of the points (monotone chain), counterclockwise.
/// Throws DegeneratePolygon when the hull has no area.
ConvexPolygon convex_hull(std::vector<Point> points);

/// Hull of n uniform integer points in [-range, range]^2, redrawn until it has area.
ConvexPolygon random_convex_polygon(std::mt19937_64& rng, int n, int range = 50);

/// One "x y" pair per line, counterclockwise; blank lines and lines starting with
/// '#' are skipped. Throws DomainError on malformed lines.
ConvexPolygon parse_polygon(std::istream& in);

}  // namespace regimesplit
