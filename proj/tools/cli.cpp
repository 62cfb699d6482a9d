#include "cli.hpp"

#include "regimesplit/errors.hpp"
#include "regimesplit/io.hpp"
#include "regimesplit/verify.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>

namespace regimesplit {

namespace {

struct FamilyFlags {
    std::string family;
    std::optional<double> mu, sigma, a, b, k;
    std::string breaks, values;
    std::string config;
    std::optional<double> rel_tol, abs_tol;
};

void add_family_flags(CLI::App* sub, FamilyFlags& f) {
    sub->add_option("--family", f.family, "gaussian | laplace | uniform | weibull | piecewise")
        ->check(CLI::IsMember({"gaussian", "laplace", "uniform", "weibull", "piecewise"}));
    sub->add_option("--mu", f.mu, "location (gaussian, laplace; default 0)");
    sub->add_option("--sigma", f.sigma, "standard deviation (gaussian; default 1)");
    sub->add_option("--a", f.a, "lower end (uniform; default 0)");
    sub->add_option("--b", f.b, "upper end (uniform; default 1) or scale (laplace; default 1)");
    sub->add_option("--k", f.k, "shape (weibull; default 1)");
    sub->add_option("--breaks", f.breaks, "comma-separated break points (piecewise)");
    sub->add_option("--values", f.values, "comma-separated density levels, one per cell (piecewise)");
    sub->add_option("--config", f.config, "family file of key = value lines (family, then its parameters)")
        ->check(CLI::ExistingFile);
    sub->add_option("--rel-tol", f.rel_tol, "quadrature relative tolerance");
    sub->add_option("--abs-tol", f.abs_tol, "quadrature absolute tolerance");
}

bool has_family(const FamilyFlags& f) { return !f.family.empty() || !f.config.empty(); }

// Flags become the same named fields a family config file holds.
FamilySpec family_spec(const FamilyFlags& f) {
    std::map<std::string, std::string> fields;
    auto put = [&](const char* key, const std::optional<double>& v) {
        if (v) fields[key] = format_double(*v);
    };
    put("mu", f.mu);
    put("sigma", f.sigma);
    put("a", f.a);
    put("b", f.b);
    put("k", f.k);
    if (!f.breaks.empty()) fields["breaks"] = f.breaks;
    if (!f.values.empty()) fields["values"] = f.values;
    if (f.config.empty()) {
        fields["family"] = f.family;
        return family_from_fields(fields);
    }
    if (!f.family.empty() || !fields.empty()) throw DomainError("--config replaces --family and its parameters");
    std::ifstream in(f.config);
    if (!in) throw DomainError("cannot open " + f.config);
    return parse_family(in);
}

Density1D family_density(const FamilyFlags& f) {
    QuadratureConfig q;
    if (f.rel_tol) q.rel_tol = *f.rel_tol;
    if (f.abs_tol) q.abs_tol = *f.abs_tol;
    q.validate();
    return make_family(family_spec(f), q);
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path);
    return in;
}

void emit(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

struct SplitArgs {
    FamilyFlags fam;
    std::string sample;
    bool force_global = false;
    int grid = 512;
};

int cmd_split(const SplitArgs& a, std::ostream& out) {
    if (has_family(a.fam) == !a.sample.empty())
        throw DomainError("split needs exactly one of --family, --config or --sample");
    if (!a.sample.empty()) {
        auto in = open_input(a.sample);
        emit(out, to_json(solve_empirical(parse_samples(in))));
        return kExitOk;
    }
    const Density1D d = family_density(a.fam);
    // Laws the log-concavity probe rejects go to the grid solver as well.
    const bool global = a.force_global || !logconcavity_probe(d).is_plausibly_logconcave;
    emit(out, to_json(global ? solve_global(d, a.grid) : solve_logconcave(d)));
    return kExitOk;
}

struct SweepArgs {
    FamilyFlags fam;
    std::string range;
    std::string format = "json";
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
    if (!has_family(a.fam)) throw DomainError("sweep needs --family or --config");
    std::string spec = a.range;
    std::replace(spec.begin(), spec.end(), ':', ' ');
    const auto parts = parse_reals(spec);
    if (parts.size() != 3 || parts[2] != static_cast<int>(parts[2]))
        throw DomainError("--range must look like lo:hi:n with an integer n");
    const auto table = sweep(family_density(a.fam), parts[0], parts[1], static_cast<int>(parts[2]));
    if (a.format == "csv")
        write_sweep_csv(out, table);
    else
        emit(out, to_json(table));
    return kExitOk;
}

int cmd_elliptical(const std::string& model_path, std::ostream& out) {
    auto in = open_input(model_path);
    emit(out, to_json(best_direction(parse_model(in))));
    return kExitOk;
}

struct PolygonArgs {
    std::string file;
    bool hexagon = false;
    std::vector<std::string> cuts;
    std::string format = "json";
};

int cmd_polygon(const PolygonArgs& a, std::ostream& out) {
    if (a.file.empty() == !a.hexagon) throw DomainError("polygon needs exactly one of --file or --hexagon");
    std::optional<ConvexPolygon> p;
    if (a.hexagon) {
        p = counterexample_hexagon();
    } else {
        auto in = open_input(a.file);
        p = parse_polygon(in);
    }
    std::vector<Rational> ts;
    for (const auto& c : a.cuts) ts.push_back(parse_rational(c));
    const auto rows = R_sweep(*p, ts);
    if (a.format == "csv") {
        write_r_sweep_csv(out, rows);
        return kExitOk;
    }
    const Moments m = first_moments(*p);
    emit(out, Json{{"vertices", p->vertices().size()},
                   {"area", rational_json(area(*p))},
                   {"moments", Json::array({rational_json(m.x), rational_json(m.y)})},
                   {"cuts", to_json(rows)}});
    return kExitOk;
}

struct LemmaArgs {
    std::string knots, slopes;
    double v0 = 0.0;
    std::optional<std::size_t> random;
    std::uint64_t seed = 7;
    double tol = 1e-10;
};

int cmd_lemma(const LemmaArgs& a, std::ostream& out) {
    const bool explicit_v = !a.knots.empty() || !a.slopes.empty();
    if (explicit_v == a.random.has_value()) throw DomainError("lemma needs either --knots/--slopes or --random N");
    if (explicit_v) {
        std::optional<ConvexPotential> v;
        try {
            v = ConvexPotential::piecewise_linear(parse_reals(a.knots), parse_reals(a.slopes), a.v0);
        } catch (const NonIntegrable& e) {
            throw DomainError(e.what());  // rejected before any integral is attempted
        }
        emit(out, to_json(check_lemma(*v, a.tol)));
        return kExitOk;
    }
    std::mt19937_64 rng(a.seed);
    std::size_t holding = 0;
    double min_slack = kInf;
    for (std::size_t i = 0; i < *a.random; ++i) {
        const auto c = check_lemma(random_convex_potential(rng), a.tol);
        holding += c.holds;
        min_slack = std::min(min_slack, c.slack);
    }
    emit(out, Json{{"potentials", *a.random},
                   {"holding", holding},
                   {"min_slack", *a.random ? Json(min_slack) : Json()},
                   {"seed", a.seed}});
    return kExitOk;
}

struct VerifyArgs {
    std::string only;
    std::optional<std::size_t> n;
    std::uint64_t seed = 7;
    bool paper = false;
    std::string format = "text";
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
    VerifyOptions opts;
    opts.n = a.n;
    opts.seed = a.seed;
    std::vector<CheckResult> results;
    if (a.only.empty())
        results = run_all_checks(opts);
    else
        results.push_back(run_check(a.only, opts));

    std::size_t passed = 0;
    for (const auto& r : results) passed += r.passed;
    if (a.format == "json") {
        Json arr = Json::array();
        for (const auto& r : results)
            arr.push_back(Json{{"id", r.id}, {"name", r.name}, {"claim", r.claim}, {"passed", r.passed},
                               {"details", r.details}});
        emit(out, Json{{"checks", arr}, {"passed", passed}, {"total", results.size()}});
    } else {
        for (const auto& r : results) {
            out << (r.passed ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << '\n';
            if (a.paper) out << "      claim: " << r.claim << '\n';
            for (const auto& line : r.details) out << "      " << line << '\n';
        }
        out << passed << '/' << results.size() << " checks passed\n";
    }
    return passed == results.size() ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal two-level (two-regime) least-squares approximations of distributions", "regimesplit"};
    app.require_subcommand(1);

    SplitArgs split_args;
    auto* split = app.add_subcommand("split", "optimal threshold and levels for a family or a sample (JSON)");
    add_family_flags(split, split_args.fam);
    split->add_option("--sample", split_args.sample, "file of whitespace-separated reals")->check(CLI::ExistingFile);
    split->add_flag("--force-global", split_args.force_global, "use the grid solver even for log-concave laws");
    split->add_option("--grid", split_args.grid, "grid points for the grid solver (>= 64)")->check(CLI::Range(64, 1 << 20));

    SweepArgs sweep_args;
    auto* sw = app.add_subcommand("sweep", "split score on an even grid; CSV columns t,fx,mk_gap,cdf");
    add_family_flags(sw, sweep_args.fam);
    sw->add_option("--range", sweep_args.range, "lo:hi:n")->required();
    sw->add_option("--format", sweep_args.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

    std::string model_path;
    auto* ell = app.add_subcommand("elliptical", "best halfspace direction of an elliptical model (JSON)");
    ell->add_option("--model", model_path, "model file (dim, mu, sigma, z0)")->required()->check(CLI::ExistingFile);

    PolygonArgs poly_args;
    auto* poly = app.add_subcommand("polygon", "exact area, moments and cut scores R(t) of a convex polygon; "
                                               "CSV columns t,t_exact,R,R_exact,error");
    poly->add_option("--file", poly_args.file, "one 'x y' vertex per line, counterclockwise")->check(CLI::ExistingFile);
    poly->add_flag("--hexagon", poly_args.hexagon, "use the built-in centred integer hexagon");
    poly->add_option("--cut", poly_args.cuts, "vertical cut x = t (repeatable; integer, p/q or decimal)");
    poly->add_option("--format", poly_args.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

    LemmaArgs lemma_args;
    auto* lemma = app.add_subcommand("lemma", "integral inequality for piecewise-linear convex potentials (JSON)");
    lemma->add_option("--knots", lemma_args.knots, "comma-separated knots starting at 0");
    lemma->add_option("--slopes", lemma_args.slopes, "comma-separated nondecreasing slopes, one per knot");
    lemma->add_option("--v0", lemma_args.v0, "V(0)");
    lemma->add_option("--random", lemma_args.random, "check N random potentials instead");
    lemma->add_option("--seed", lemma_args.seed, "seed for --random");
    lemma->add_option("--tol", lemma_args.tol, "tolerance on lhs <= rhs");

    VerifyArgs verify_args;
    auto* ver = app.add_subcommand("verify", "run the acceptance checks; exit 1 if any fails");
    ver->add_option("--only", verify_args.only, "run a single check")->check(CLI::IsMember(check_names()));
    ver->add_option("--n", verify_args.n,
                    "count for randomized checks: potentials (lemma), quantiles (monotonicity), draws "
                    "(montecarlo), sample size (oracle), triples (shift)");
    ver->add_option("--seed", verify_args.seed, "seed for randomized checks");
    ver->add_flag("--paper", verify_args.paper, "print the claim each check tests");
    ver->add_option("--format", verify_args.format, "text | json")->check(CLI::IsMember({"text", "json"}));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (split->parsed()) return cmd_split(split_args, out);
        if (sw->parsed()) return cmd_sweep(sweep_args, out);
        if (ell->parsed()) return cmd_elliptical(model_path, out);
        if (poly->parsed()) return cmd_polygon(poly_args, out);
        if (lemma->parsed()) return cmd_lemma(lemma_args, out);
        return cmd_verify(verify_args, out);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalidInput;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitInvalidInput;
    } catch (const DegeneratePolygon& e) {
        err << "invalid polygon: " << e.what() << '\n';
        return kExitInvalidInput;
    } catch (const std::exception& e) {
        err << "solver failure: " << e.what() << '\n';
        return kExitSolverFailure;
    }
}

}  // namespace regimesplit
