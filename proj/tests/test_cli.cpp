#include "doctest.h"

#include "cli.hpp"
#include "regimesplit/errors.hpp"
#include "regimesplit/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <variant>

using namespace regimesplit;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& contents) {
    const std::string path = "/tmp/regimesplit_test_" + name;
    std::ofstream(path) << contents;
    return path;
}

}  // namespace

TEST_CASE("split examples") {
    auto r = run({"split", "--family", "gaussian", "--mu", "0", "--sigma", "1"});
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["thresholds"].size() == 1);
    CHECK(std::abs(j["thresholds"][0].get<double>()) < 1e-12);
    CHECK(j["method"] == "logconcave_bisection");

    r = run({"split", "--family", "piecewise", "--breaks", "-2,-0.1,0.1,2", "--values", "0.125,2.625,0.125",
             "--force-global"});
    REQUIRE(r.code == 0);
    j = Json::parse(r.out);
    REQUIRE(j["thresholds"].size() == 2);
    CHECK(std::abs(j["thresholds"][0].get<double>() + 0.472136) < 1e-6);
    CHECK(std::abs(j["thresholds"][1].get<double>() - 0.472136) < 1e-6);

    // Without --force-global the probe routes the non-log-concave law to the grid solver too.
    r = run({"split", "--family", "piecewise", "--breaks", "-2,-0.1,0.1,2", "--values", "0.125,2.625,0.125"});
    REQUIRE(r.code == 0);
    CHECK(Json::parse(r.out)["method"] == "global_grid");

    const auto path = temp_file("sample.txt", "0 1 3\n");
    r = run({"split", "--sample", path});
    REQUIRE(r.code == 0);
    j = Json::parse(r.out);
    CHECK(j["thresholds"][0] == 2.0);
    CHECK(j["alpha"] == 0.5);
    CHECK(j["beta"] == 3.0);
    CHECK(j["method"] == "empirical_exact");
}

TEST_CASE("split JSON round trip keeps the result invariants") {
    for (const std::vector<std::string>& args :
         {std::vector<std::string>{"split", "--family", "laplace", "--mu", "1", "--b", "2"},
          std::vector<std::string>{"split", "--family", "weibull", "--k", "2.5"},
          std::vector<std::string>{"split", "--family", "uniform", "--a", "-1", "--b", "3", "--force-global"}}) {
        const auto r = run(args);
        REQUIRE(r.code == 0);
        const SplitResult s = split_result_from_json(Json::parse(r.out));
        CHECK(s.alpha < s.thresholds[0]);
        CHECK(s.thresholds[0] < s.beta);
        CHECK(s.objective >= 0);
        CHECK(to_json(s).dump() == Json::parse(r.out).dump());
    }
    CHECK_THROWS_AS(split_result_from_json(Json::parse(R"({"alpha": 1})")), DomainError);
}

TEST_CASE("sweep example") {
    auto r = run({"sweep", "--family", "uniform", "--a", "-1", "--b", "1", "--range", "-0.9:0.9:19", "--format", "csv"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,fx,mk_gap,cdf");
    int rows = 0;
    while (std::getline(in, line)) {
        const double t = std::stod(line.substr(0, line.find(',')));
        const double fx = std::stod(line.substr(line.find(',') + 1));
        CHECK(std::abs(fx - (1 - t * t) / 4) < 1e-9);
        ++rows;
    }
    CHECK(rows == 19);

    r = run({"sweep", "--family", "gaussian", "--range", "-1:1:3"});
    REQUIRE(r.code == 0);
    CHECK(Json::parse(r.out)["rows"].size() == 3);
    CHECK(run({"sweep", "--family", "gaussian", "--range", "1:2"}).code == 2);
    CHECK(run({"sweep", "--family", "gaussian", "--range", "1:2:2.5"}).code == 2);
}

TEST_CASE("elliptical example") {
    const auto path = temp_file("m.cfg", "dim = 2\nmu = 0 0\nsigma = 4 0 0 1\nz0 = gaussian\n");
    const auto r = run({"elliptical", "--model", path});
    REQUIRE(r.code == 0);
    const auto j = Json::parse(r.out);
    CHECK(j["u_star"] == Json::array({1.0, 0.0}));
    CHECK(j["lambda_max"] == 4.0);
    CHECK(std::abs(j["value_at_zero"].get<double>() - 8 / std::numbers::pi) < 1e-10);
    CHECK(j.contains("c0"));
    const auto bad = temp_file("bad.cfg", "dim = 2\nmu = 0 0\nsigma = 1 2 2 1\n");
    CHECK(run({"elliptical", "--model", bad}).code == 2);
}

TEST_CASE("polygon example") {
    const auto path = temp_file("hex.txt", "-3 0\n-1 -12\n3 -8\n3 0\n1 12\n-3 8\n");
    auto r = run({"polygon", "--file", path, "--cut", "0", "--cut", "1"});
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["area"]["exact"] == "104");
    CHECK(j["cuts"][0]["R"]["exact"] == "22045/12168");
    CHECK(j["cuts"][1]["R"]["exact"] == "9389/4995");

    r = run({"polygon", "--hexagon", "--cut", "3", "--cut", "1/2", "--format", "csv"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("t,t_exact,R,R_exact,error\n") == 0);
    CHECK(r.out.find("48055/26568") != std::string::npos);
    CHECK(r.out.find("no area") != std::string::npos);

    const auto cw = temp_file("cw.txt", "0 0\n0 1\n1 1\n1 0\n");
    CHECK(run({"polygon", "--file", cw}).code == 2);
    CHECK(run({"polygon", "--hexagon", "--cut", "x"}).code == 2);
    CHECK(run({"polygon"}).code == 2);
}

TEST_CASE("lemma command") {
    auto r = run({"lemma", "--knots", "0", "--slopes", "1", "--v0", "2"});
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["holds"] == true);
    CHECK(std::abs(j["slack"].get<double>()) < 1e-15);
    for (const char* key : {"holds", "lhs", "rhs", "slack"}) CHECK(j.contains(key));

    r = run({"lemma", "--random", "200", "--seed", "3"});
    REQUIRE(r.code == 0);
    CHECK(Json::parse(r.out)["holding"] == 200);
    CHECK(run({"lemma", "--knots", "0", "--slopes", "0"}).code == 2);
    CHECK(run({"lemma"}).code == 2);
}

TEST_CASE("verify command") {
    auto r = run({"verify", "--only", "hexagon"});
    CHECK(r.code == 0);
    CHECK(r.out.find("22045/12168") != std::string::npos);
    CHECK(r.out.find("9389/4995") != std::string::npos);

    r = run({"verify", "--only", "lemma", "--n", "1000", "--seed", "7"});
    CHECK(r.code == 0);
    CHECK(r.out.find("1000/1000") != std::string::npos);

    r = run({"verify", "--only", "gaussian", "--paper", "--format", "json"});
    CHECK(r.code == 0);
    const auto j = Json::parse(r.out);
    CHECK(j["passed"] == 1);
    CHECK_FALSE(j["checks"][0]["claim"].get<std::string>().empty());
    CHECK(run({"verify", "--only", "nonsense"}).code == 2);
}

TEST_CASE("identical invocations give identical output") {
    const std::vector<std::string> args{"verify", "--only", "montecarlo", "--n", "5000", "--seed", "11"};
    const auto a = run(args);
    const auto b = run(args);
    CHECK(a.out == b.out);
    CHECK(a.code == b.code);
    const auto c = run({"split", "--family", "weibull", "--k", "3"});
    CHECK(c.out == run({"split", "--family", "weibull", "--k", "3"}).out);
}

TEST_CASE("malformed input never exits 0") {
    CHECK(run({}).code == 2);
    CHECK(run({"bogus"}).code == 2);
    CHECK(run({"split"}).code == 2);
    CHECK(run({"split", "--family", "gaussian", "--k", "3"}).code == 2);
    CHECK(run({"split", "--family", "gaussian", "--sigma", "abc"}).code == 2);
    CHECK(run({"split", "--family", "gaussian", "--sigma", "-1"}).code == 2);
    CHECK(run({"split", "--family", "gaussian", "--grid", "10"}).code == 2);
    CHECK(run({"split", "--family", "gaussian", "--sample", "/nonexistent"}).code == 2);
    CHECK(run({"split", "--family", "piecewise", "--breaks", "0,1"}).code == 2);
    CHECK(run({"split", "--family", "gaussian", "--rel-tol", "-1"}).code == 2);
    CHECK(run({"split", "--family", "gaussian", "--format", "csv"}).code == 2);
    CHECK(run({"sweep", "--family", "gaussian"}).code == 2);
    CHECK(run({"help"}).code == 2);
    const auto empty = temp_file("empty.txt", "\n");
    CHECK(run({"split", "--sample", empty}).code == 2);
    const auto junk = temp_file("junk.txt", "1 2 x\n");
    CHECK(run({"split", "--sample", junk}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("solver failures exit 3") {
    // A sample of one repeated value is rejected as input, not as a solver failure.
    const auto one = temp_file("one.txt", "4 4 4\n");
    CHECK(run({"split", "--sample", one}).code == 2);
    // Ultra-tight tolerances exhaust the quadrature budget.
    CHECK(run({"split", "--family", "laplace", "--rel-tol", "1e-300", "--abs-tol", "1e-300"}).code == 3);
}

TEST_CASE("model and sample parsing") {
    std::istringstream m("# comment\ndim = 3\nmu = 1, 2, 3\nsigma = 2 0 0  0 2 0  0 0 2\nz0 = uniform\n");
    const auto model = parse_model(m);
    CHECK(model.dim() == 3);
    CHECK(model.mu() == Vector{1, 2, 3});
    CHECK(model.z0_name() == "uniform");
    std::istringstream missing("dim = 2\nmu = 0 0\n");
    CHECK_THROWS_AS(parse_model(missing), DomainError);
    std::istringstream wrong("dim = 2\nmu = 0 0 0\nsigma = 1 0 0 1\n");
    CHECK_THROWS_AS(parse_model(wrong), DomainError);
    std::istringstream unknown("dim = 1\nmu = 0\nsigma = 1\ncolour = red\n");
    CHECK_THROWS_AS(parse_model(unknown), DomainError);

    std::istringstream s("1.5\n-2 3e1\n");
    const auto e = parse_samples(s);
    CHECK(e.atoms().size() == 3);
    CHECK(e.atoms()[0].value == -2.0);
    CHECK(parse_reals("1, 2,3") == std::vector<double>{1, 2, 3});
    CHECK_THROWS_AS(parse_reals("1,,x"), DomainError);
    CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("family config files") {
    std::istringstream pw("family = piecewise  # two bumps\nbreaks = -2, -0.1, 0.1, 2\nvalues = 0.125 2.625 0.125\n");
    const auto spec = parse_family(pw);
    REQUIRE(std::holds_alternative<PiecewiseConstSpec>(spec));
    CHECK(std::get<PiecewiseConstSpec>(spec).values.size() == 3);

    std::istringstream w("family = weibull\nk = 2.5\n");
    CHECK(std::get<WeibullSpec>(parse_family(w)).k == 2.5);
    std::istringstream defaults("family = gaussian\n");
    CHECK(std::get<GaussianSpec>(parse_family(defaults)).sigma == 1.0);

    std::istringstream nofamily("mu = 1\n");
    CHECK_THROWS_AS(parse_family(nofamily), DomainError);
    std::istringstream foreign("family = uniform\nsigma = 2\n");
    CHECK_THROWS_AS(parse_family(foreign), DomainError);
    std::istringstream twice("family = weibull\nk = 2\nk = 3\n");
    CHECK_THROWS_AS(parse_family(twice), DomainError);
    std::istringstream unknown("family = cauchy\n");
    CHECK_THROWS_AS(parse_family(unknown), DomainError);

    // The CLI gives the same answer from a file as from flags.
    const auto cfg = temp_file("w.cfg", "family = weibull\nk = 2\n");
    CHECK(run({"split", "--config", cfg}).out == run({"split", "--family", "weibull", "--k", "2"}).out);
    CHECK(run({"split", "--config", cfg, "--k", "3"}).code == 2);
}
