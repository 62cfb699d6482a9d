#include "regimesplit/io.hpp"

#include "regimesplit/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace regimesplit {

namespace {

double parse_real(const std::string& token) {
    double x = 0.0;
    const char* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, x);
    if (ec != std::errc() || ptr != end || !std::isfinite(x))
        throw DomainError("not a finite real number: '" + token + "'");
    return x;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// key = value lines with '#' comments; keys must be in `known` and appear once.
std::map<std::string, std::string> read_fields(std::istream& in, const std::vector<std::string>& known,
                                               const std::string& what) {
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = what + " line " + std::to_string(line_no);
        if (eq == std::string::npos) throw DomainError(where + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw DomainError(where + ": unknown key '" + key + "'");
        if (!kv.emplace(key, trim(line.substr(eq + 1))).second) throw DomainError(where + ": duplicate key '" + key + "'");
    }
    return kv;
}

double single_real(const std::string& key, const std::string& text) {
    const auto xs = parse_reals(text);
    if (xs.size() != 1) throw DomainError(key + " must be a single number");
    return xs[0];
}

Json vector_json(const std::vector<double>& v) {
    Json j = Json::array();
    for (double x : v) j.push_back(x);
    return j;
}

}  // namespace

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<double> parse_reals(const std::string& text) {
    std::string spaced = text;
    for (char& c : spaced)
        if (c == ',') c = ' ';
    std::istringstream in(spaced);
    std::vector<double> out;
    for (std::string tok; in >> tok;) out.push_back(parse_real(tok));
    return out;
}

EmpiricalDist parse_samples(std::istream& in) {
    std::vector<double> xs;
    for (std::string tok; in >> tok;) xs.push_back(parse_real(tok));
    if (xs.empty()) throw DomainError("sample file holds no numbers");
    return EmpiricalDist::from_samples(xs);
}

FamilySpec family_from_fields(const std::map<std::string, std::string>& fields) {
    const auto it = fields.find("family");
    if (it == fields.end() || it->second.empty()) throw DomainError("family name is missing");
    const std::string& family = it->second;
    std::vector<std::string> used;
    if (family == "gaussian")
        used = {"mu", "sigma"};
    else if (family == "laplace")
        used = {"mu", "b"};
    else if (family == "uniform")
        used = {"a", "b"};
    else if (family == "weibull")
        used = {"k"};
    else if (family == "piecewise")
        used = {"breaks", "values"};
    else
        throw DomainError("unknown family '" + family + "' (expected gaussian, laplace, uniform, weibull or piecewise)");
    for (const auto& [key, value] : fields)
        if (key != "family" && std::find(used.begin(), used.end(), key) == used.end())
            throw DomainError("'" + key + "' does not apply to family " + family);
    auto get = [&](const std::string& key, double fallback) {
        const auto f = fields.find(key);
        return f == fields.end() ? fallback : single_real(key, f->second);
    };
    if (family == "gaussian") return GaussianSpec{get("mu", 0.0), get("sigma", 1.0)};
    if (family == "laplace") return LaplaceSpec{get("mu", 0.0), get("b", 1.0)};
    if (family == "uniform") return UniformSpec{get("a", 0.0), get("b", 1.0)};
    if (family == "weibull") return WeibullSpec{get("k", 1.0)};
    if (!fields.count("breaks") || !fields.count("values")) throw DomainError("piecewise needs breaks and values");
    return PiecewiseConstSpec{parse_reals(fields.at("breaks")), parse_reals(fields.at("values"))};
}

FamilySpec parse_family(std::istream& in) {
    return family_from_fields(read_fields(in, {"family", "mu", "sigma", "a", "b", "k", "breaks", "values"}, "family"));
}

EllipticalModel parse_model(std::istream& in) {
    auto kv = read_fields(in, {"dim", "mu", "sigma", "z0"}, "model");
    for (const char* k : {"dim", "mu", "sigma"})
        if (!kv.count(k)) throw DomainError(std::string("model is missing '") + k + "'");

    const auto dims = parse_reals(kv["dim"]);
    if (dims.size() != 1 || dims[0] < 1 || dims[0] != std::floor(dims[0]))
        throw DomainError("dim must be a positive integer");
    const auto d = static_cast<std::size_t>(dims[0]);
    const Vector mu = parse_reals(kv["mu"]);
    const auto entries = parse_reals(kv["sigma"]);
    if (mu.size() != d) throw DomainError("mu needs " + std::to_string(d) + " entries");
    if (entries.size() != d * d) throw DomainError("sigma needs " + std::to_string(d * d) + " entries");
    Matrix sigma(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) sigma(i, j) = entries[i * d + j];
    return make_elliptical(mu, sigma, kv.count("z0") ? kv["z0"] : "gaussian");
}

Json rational_json(const Rational& r) { return Json{{"exact", to_string(r)}, {"value", to_double(r)}}; }

Json to_json(const SplitResult& r) {
    return Json{{"thresholds", vector_json(r.thresholds)},
                {"alpha", r.alpha},
                {"beta", r.beta},
                {"objective", r.objective},
                {"fx_value", r.fx_value},
                {"method", to_string(r.method)}};
}

Json to_json(const DirectionResult& r) {
    return Json{{"u_star", vector_json(r.u_star)},
                {"lambda_max", r.lambda_max},
                {"c0", r.c0},
                {"value_at_zero", r.value_at_zero}};
}

Json to_json(const LemmaCheck& c) {
    return Json{{"holds", c.holds}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"slack", c.slack}};
}

Json to_json(const HexagonReport& r) {
    return Json{{"area", rational_json(r.area)},
                {"moments", Json::array({rational_json(r.moments.x), rational_json(r.moments.y)})},
                {"centered", r.centered},
                {"r0", rational_json(r.r0)},
                {"r1", rational_json(r.r1)},
                {"counterexample_holds", r.counterexample_holds},
                {"all_pass", r.all_pass}};
}

Json to_json(const std::vector<RSweepRow>& rows) {
    Json out = Json::array();
    for (const auto& row : rows) {
        Json j{{"t", rational_json(row.t)}};
        if (row.r)
            j["R"] = rational_json(*row.r);
        else
            j["error"] = row.error;
        out.push_back(std::move(j));
    }
    return out;
}

Json to_json(const SweepTable& t) {
    Json rows = Json::array();
    for (const auto& r : t.rows)
        rows.push_back(Json{{"t", r.t}, {"fx", r.fx}, {"mk_gap", r.mk_gap ? Json(*r.mk_gap) : Json()}, {"cdf", r.cdf}});
    return Json{{"rows", rows}};
}

SplitResult split_result_from_json(const Json& j) {
    try {
        SplitResult r;
        r.thresholds = j.at("thresholds").get<std::vector<double>>();
        r.alpha = j.at("alpha").get<double>();
        r.beta = j.at("beta").get<double>();
        r.objective = j.at("objective").get<double>();
        r.fx_value = j.at("fx_value").get<double>();
        const auto m = j.at("method").get<std::string>();
        bool known = false;
        for (auto cand : {SplitMethod::logconcave_bisection, SplitMethod::global_grid, SplitMethod::empirical_exact})
            if (to_string(cand) == m) {
                r.method = cand;
                known = true;
            }
        if (!known) throw DomainError("unknown split method '" + m + "'");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed split result: ") + e.what());
    }
}

void write_sweep_csv(std::ostream& out, const SweepTable& t) {
    out << "t,fx,mk_gap,cdf\n";
    for (const auto& r : t.rows)
        out << format_double(r.t) << ',' << format_double(r.fx) << ',' << (r.mk_gap ? format_double(*r.mk_gap) : "")
            << ',' << format_double(r.cdf) << '\n';
}

void write_r_sweep_csv(std::ostream& out, const std::vector<RSweepRow>& rows) {
    out << "t,t_exact,R,R_exact,error\n";
    for (const auto& r : rows) {
        out << format_double(to_double(r.t)) << ',' << to_string(r.t) << ',';
        if (r.r)
            out << format_double(to_double(*r.r)) << ',' << to_string(*r.r) << ",\n";
        else
            out << ",," << '"' << r.error << '"' << '\n';
    }
}

}  // namespace regimesplit
