#include "regimesplit/geometry.hpp"

#include "regimesplit/errors.hpp"

#include <algorithm>
#include <istream>
#include <regex>
#include <sstream>

namespace regimesplit {

namespace {

using boost::multiprecision::cpp_int;

// Twice the signed area of triangle (a, b, c); positive for a left turn.
Rational cross(const Point& a, const Point& b, const Point& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

const Point& at(const std::vector<Point>& v, std::size_t i) { return v[i % v.size()]; }

}  // namespace

Rational parse_rational(const std::string& text) {
    static const std::regex fraction(R"(\s*([+-]?\d+)\s*/\s*(\d+)\s*)");
    static const std::regex decimal(R"(\s*([+-]?)(\d*)(?:\.(\d*))?\s*)");
    std::smatch m;
    if (std::regex_match(text, m, fraction)) {
        const cpp_int den(m[2].str());
        if (den == 0) throw DomainError("zero denominator in '" + text + "'");
        return Rational(cpp_int(m[1].str()), den);
    }
    if (std::regex_match(text, m, decimal) && (m[2].length() > 0 || m[3].length() > 0)) {
        const std::string digits = m[2].str() + m[3].str();
        cpp_int scale = 1;
        for (long i = 0; i < m[3].length(); ++i) scale *= 10;
        Rational r(cpp_int(digits), scale);
        return m[1].str() == "-" ? Rational(-r) : r;
    }
    throw DomainError("not a rational number: '" + text + "'");
}

std::string to_string(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

ConvexPolygon::ConvexPolygon(std::vector<Point> vertices) {
    std::vector<Point> v;
    for (auto& p : vertices)
        if (v.empty() || !(v.back() == p)) v.push_back(std::move(p));
    while (v.size() > 1 && v.front() == v.back()) v.pop_back();

    // Remove collinear vertices until none is left (each removal may expose another).
    bool changed = true;
    while (changed && v.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < v.size() && v.size() >= 3; ++i) {
            const Point& prev = at(v, i + v.size() - 1);
            const Point& next = at(v, i + 1);
            if (cross(prev, v[i], next) == 0) {
                // A vertex that doubles back is not a polygon boundary.
                const Rational along = (v[i].x - prev.x) * (next.x - v[i].x) + (v[i].y - prev.y) * (next.y - v[i].y);
                if (along < 0) throw DegeneratePolygon("polygon boundary doubles back");
                v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }
    if (v.size() < 3) throw DegeneratePolygon("polygon needs three non-collinear vertices");
    for (std::size_t i = 0; i < v.size(); ++i)
        if (cross(v[i], at(v, i + 1), at(v, i + 2)) < 0)
            throw DegeneratePolygon("vertices must be listed counterclockwise around a convex polygon");
    // Left turns alone admit stars; a fan of positive triangles rules them out.
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
        if (cross(v[0], v[i], v[i + 1]) <= 0) throw DegeneratePolygon("polygon boundary winds more than once");
    vertices_ = std::move(v);
}

Rational area(const ConvexPolygon& p) {
    const auto& v = p.vertices();
    Rational s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i].x * at(v, i + 1).y - at(v, i + 1).x * v[i].y;
    return s / 2;
}

Moments first_moments(const ConvexPolygon& p) {
    const auto& v = p.vertices();
    Moments m{0, 0};
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& a = v[i];
        const Point& b = at(v, i + 1);
        const Rational c = a.x * b.y - b.x * a.y;
        m.x += (a.x + b.x) * c;
        m.y += (a.y + b.y) * c;
    }
    m.x /= 6;
    m.y /= 6;
    return m;
}

ConvexPolygon translate(const ConvexPolygon& p, const Rational& dx, const Rational& dy) {
    std::vector<Point> v;
    for (const auto& q : p.vertices()) v.push_back({q.x + dx, q.y + dy});
    return ConvexPolygon(std::move(v));
}

std::optional<ConvexPolygon> clip_vertical(const ConvexPolygon& p, const Rational& t, CutSide side) {
    const auto& v = p.vertices();
    auto inside = [&](const Point& q) { return side == CutSide::x_gt ? q.x >= t : q.x <= t; };
    std::vector<Point> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& a = v[i];
        const Point& b = at(v, i + 1);
        const bool ina = inside(a);
        const bool inb = inside(b);
        if (ina) out.push_back(a);
        if (ina != inb && a.x != t && b.x != t) {
            const Rational s = (t - a.x) / (b.x - a.x);
            out.push_back({t, a.y + s * (b.y - a.y)});
        }
    }
    if (out.size() < 3) return std::nullopt;
    try {
        return ConvexPolygon(std::move(out));
    } catch (const DegeneratePolygon&) {
        return std::nullopt;  // the part collapsed onto the cut line
    }
}

Rational R_polygon(const ConvexPolygon& p, const Rational& t) {
    const auto right = clip_vertical(p, t, CutSide::x_gt);
    const auto left = clip_vertical(p, t, CutSide::x_lt);
    if (!right || !left) throw DegenerateCut("cut x = " + to_string(t) + " leaves one side with no area");
    const Moments m = first_moments(*right);
    return (m.x * m.x + m.y * m.y) / (area(*right) * area(*left));
}

ConvexPolygon counterexample_hexagon() {
    return ConvexPolygon({{-3, 0}, {-1, -12}, {3, -8}, {3, 0}, {1, 12}, {-3, 8}});
}

HexagonReport hexagon_counterexample() {
    const ConvexPolygon hex = counterexample_hexagon();
    HexagonReport r;
    r.area = area(hex);
    r.moments = first_moments(hex);
    r.centered = r.moments.x == 0 && r.moments.y == 0;
    r.r0 = R_polygon(hex, 0);
    r.r1 = R_polygon(hex, 1);
    r.area_matches = r.area == 104;
    r.r0_matches = r.r0 == Rational(22045, 12168);
    r.r1_matches = r.r1 == Rational(9389, 4995);
    r.counterexample_holds = r.r1 > r.r0;
    r.all_pass = r.centered && r.area_matches && r.r0_matches && r.r1_matches && r.counterexample_holds;
    return r;
}

std::vector<RSweepRow> R_sweep(const ConvexPolygon& p, const std::vector<Rational>& t_values) {
    std::vector<RSweepRow> rows;
    for (const auto& t : t_values) {
        RSweepRow row{t, std::nullopt, {}};
        try {
            row.r = R_polygon(p, t);
        } catch (const DegenerateCut& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

ConvexPolygon convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) throw DegeneratePolygon("hull of fewer than three distinct points");
    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return ConvexPolygon(std::move(hull));
}

ConvexPolygon random_convex_polygon(std::mt19937_64& rng, int n, int range) {
    if (n < 3) throw DomainError("random polygon needs at least three points");
    std::uniform_int_distribution<int> coord(-range, range);
    for (;;) {
        std::vector<Point> pts;
        for (int i = 0; i < n; ++i) pts.push_back({coord(rng), coord(rng)});
        try {
            return convex_hull(std::move(pts));
        } catch (const DegeneratePolygon&) {
            // collinear draw; try again
        }
    }
}

ConvexPolygon parse_polygon(std::istream& in) {
    std::vector<Point> pts;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        std::string xs, ys, extra;
        if (!(fields >> xs >> ys) || (fields >> extra))
            throw DomainError("polygon line " + std::to_string(line_no) + ": expected two numbers");
        pts.push_back({parse_rational(xs), parse_rational(ys)});
    }
    return ConvexPolygon(std::move(pts));
}

}  // namespace regimesplit
