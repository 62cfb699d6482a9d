#pragma once

#include "regimesplit/density.hpp"
#include "regimesplit/geometry.hpp"
#include "regimesplit/inequality.hpp"
#include "regimesplit/multidim.hpp"
#include "regimesplit/splitcore.hpp"

#include "json.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace regimesplit {

using Json = nlohmann::ordered_json;

/// Reals separated by whitespace and/or commas. Throws DomainError on junk.
std::vector<double> parse_reals(const std::string& text);

/// Family from named fields: "family" plus the parameters it uses
/// (gaussian: mu sigma; laplace: mu b; uniform: a b; weibull: k; piecewise: breaks values).
/// Missing parameters take their defaults. Throws DomainError for unknown families,
/// fields the family does not use, or malformed numbers.
FamilySpec family_from_fields(const std::map<std::string, std::string>& fields);

/// "key = value" lines ('#' starts a comment) fed to family_from_fields, e.g.
///   family = piecewise
///   breaks = -2, -0.1, 0.1, 2
///   values = 0.125, 2.625, 0.125
FamilySpec parse_family(std::istream& in);

/// Whitespace/newline separated reals. Throws DomainError on junk or an empty file.
EmpiricalDist parse_samples(std::istream& in);

/// "key = value" lines ('#' starts a comment):
///   dim = 2
///   mu = 0 0
///   sigma = 4 0 0 1      (row-major)
///   z0 = gaussian        (optional; gaussian, uniform or laplace)
/// Throws DomainError for missing or inconsistent keys.
EllipticalModel parse_model(std::istream& in);

/// {"exact": "p/q", "value": decimal}
Json rational_json(const Rational& r);

Json to_json(const SplitResult& r);
Json to_json(const DirectionResult& r);
Json to_json(const LemmaCheck& c);
Json to_json(const HexagonReport& r);
Json to_json(const std::vector<RSweepRow>& rows);
Json to_json(const SweepTable& t);

/// Inverse of to_json(SplitResult); throws DomainError on missing keys.
SplitResult split_result_from_json(const Json& j);

/// Header "t,fx,mk_gap,cdf"; numbers with 17 significant digits, mk_gap empty where undefined.
void write_sweep_csv(std::ostream& out, const SweepTable& t);
/// Header "t,t_exact,R,R_exact,error".
void write_r_sweep_csv(std::ostream& out, const std::vector<RSweepRow>& rows);

/// %.17g
std::string format_double(double x);

}  // namespace regimesplit
