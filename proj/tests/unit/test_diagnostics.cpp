#include <doctest.h>

#include <cmath>
#include <random>

#include "tvckit/autodiff.hpp"
#include "tvckit/diagnostics.hpp"
#include "tvckit/euler.hpp"
#include "tvckit/perturbation.hpp"

using namespace tvckit;

namespace {

ProblemSpec counterexample() {
    return parse_problem(R"(vars c
params alpha=1.0 beta=0.5 gamma=0.25
utility U = (c(t) - alpha)^2 + beta*c(t+1) + gamma*c(t+2)
perturb p = step(t0=1, level=1.0)
perturb zero = expr(0)
)");
}

ProblemSpec discounted() {
    return parse_problem(R"(vars c
params delta=0.9 a=1.0 b=0.5
utility U = delta^t * (-(c(t) - a)^2 - b*(c(t+1) - c(t))^2)
init c(0)=0
perturb p = step(t0=1, level=1.0)
)");
}

const std::vector<double> kEps{1e-1, 1e-2, 1e-3, 1e-4};
const std::vector<int> kAxis{10, 20, 40, 80, 160, 320, 640};

double stage(const ProblemSpec& spec, const Path& p, int t) {
    Matrix w(1, static_cast<std::size_t>(spec.order));
    for (int j = 0; j < spec.order; ++j) w(0, static_cast<std::size_t>(j)) = p(t + j, 0);
    return eval(spec.utility, StageEnv{t, w, spec.param_values});
}

}  // namespace

TEST_CASE("objective difference on the steady path") {
    const auto spec = counterexample();
    const Path path(20, 1, 0.625);
    const auto& p = spec.perturbation("p");
    CHECK(objective_diff_sum(spec, path, p, 0.01, 10) / 0.01 ==
          doctest::Approx(0.85).epsilon(1e-12));
    const auto q = perturbation_path(spec, p, 20);
    for (int t_prime = 0; t_prime <= 15; ++t_prime) {
        const double eps = 0.05;
        double expect = 0.0;
        for (int t = 0; t <= t_prime; ++t) {
            const double a = eps * q(t, 0) - 0.375;
            expect += a * a + eps * (0.5 * q(t + 1, 0) + 0.25 * q(t + 2, 0)) - 0.375 * 0.375;
        }
        CHECK(objective_diff_sum(spec, path, p, eps, t_prime) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(objective_diff_sum(spec, path, spec.perturbation("zero"), 0.3, 12) == 0.0);
    CHECK_THROWS_AS(objective_diff_sum(spec, path, p, 0.0, 5), Error);
    CHECK_THROWS_AS(objective_diff_sum(spec, path, p, 0.1, 19), Error);
}

TEST_CASE("domain errors name the stage") {
    const auto spec = parse_problem("vars c\nutility U = ln(c(t))\nperturb p = expr(-1)\n");
    const Path path(10, 1, 0.5);
    try {
        objective_diff_sum(spec, path, spec.perturbation("p"), 1.0, 8);
        FAIL("expected a domain error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Domain);
        CHECK(std::string(e.what()).find("stage t=0") != std::string::npos);
    }
}

TEST_CASE("windowed infimum") {
    const auto spec = counterexample();
    const Path path(40, 1, 0.625);
    const auto& p = spec.perturbation("p");
    for (int T : {1, 5, 20}) {
        CHECK(v_eps_T(spec, path, p, 0.01, T, 35) == objective_diff_sum(spec, path, p, 0.01, T));
    }
    CHECK(v_eps_T(spec, path, spec.perturbation("zero"), 0.01, 3, 35) == 0.0);

    const auto lin = parse_problem("vars c\nutility U = c(t)\nperturb d = expr(4*(t-7)^2 - 1)\n");
    const Path zero(30, 1);
    const auto& d = lin.perturbation("d");
    double best = 1e300;
    int arg = -1;
    for (int t_prime = 6; t_prime <= 25; ++t_prime) {
        const double v = objective_diff_sum(lin, zero, d, 0.5, t_prime);
        if (v < best) {
            best = v;
            arg = t_prime;
        }
    }
    CHECK(arg == 7);
    CHECK(v_eps_T(lin, zero, d, 0.5, 6, 25) == best);
    CHECK_THROWS_AS(v_eps_T(lin, zero, d, 0.5, 26, 25), Error);
}

TEST_CASE("counterexample grid") {
    const auto spec = counterexample();
    const Path path(640 + 2, 1, 0.625);
    const auto grid = build_a_grid(spec, path, spec.perturbation("p"), kEps, kAxis);
    REQUIRE(grid.a.rows() == kAxis.size());
    REQUIRE(grid.a.cols() == kEps.size());
    for (std::size_t r = 0; r < kAxis.size(); ++r) {
        for (std::size_t c = 0; c < kEps.size(); ++c) {
            const double expect = kEps[c] * kAxis[r] + 0.75;
            CHECK(std::fabs(grid.a(r, c) - expect) <= 1e-9 * expect);
        }
    }
    const auto v = assess_assumptions(grid, 1e-6);
    CHECK(v.l1.divergent);
    CHECK_FALSE(v.l2.divergent);
    CHECK(v.l2.value == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(v.classification == AssumptionClass::NonUniform);

    // defect(T) = eps_max * (T_max - T)
    const double slope = (v.uniformity_defect[0] - v.uniformity_defect[5]) / (kAxis[5] - kAxis[0]);
    CHECK(std::fabs(slope - kEps[0]) <= 0.05 * kEps[0]);
}

TEST_CASE("grid rows are affine in eps for the quadratic family") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-1, 1);
    const auto spec = counterexample();
    Path path(100, 1);
    for (int t = 0; t <= 100; ++t) path(t, 0) = u(rng);
    const std::vector<double> eps{0.2, 0.1, 0.05, 0.02, 0.01};
    const auto grid = build_a_grid(spec, path, spec.perturbation("p"), eps, {10, 50, 98});
    for (std::size_t r = 0; r < 3; ++r) {
        double se = 0, sa = 0, see = 0, sea = 0;
        const double n = static_cast<double>(eps.size());
        for (std::size_t c = 0; c < eps.size(); ++c) {
            se += eps[c];
            sa += grid.a(r, c);
            see += eps[c] * eps[c];
            sea += eps[c] * grid.a(r, c);
        }
        const double slope = (n * sea - se * sa) / (n * see - se * se);
        const double icpt = (sa - slope * se) / n;
        for (std::size_t c = 0; c < eps.size(); ++c) {
            const double fit = icpt + slope * eps[c];
            CHECK(std::fabs(grid.a(r, c) - fit) <= 1e-9 * std::max(1.0, std::fabs(fit)));
        }
    }
}

TEST_CASE("grid increments match stage directional derivatives") {
    std::mt19937_64 rng(78);
    std::uniform_real_distribution<double> u(0.2, 1.5);
    const auto spec = discounted();
    Path path(30, 1);
    for (int t = 0; t <= 30; ++t) path(t, 0) = u(rng);
    const auto& p = spec.perturbation("p");
    const auto q = perturbation_path(spec, p, 30);
    std::vector<int> axis;
    for (int t = 1; t <= 28; ++t) axis.push_back(t);
    const auto grid = build_a_grid(spec, path, p, {1e-6}, axis);
    for (std::size_t r = 1; r < axis.size(); ++r) {
        const int t = axis[r];
        std::vector<Dual<double>> w{{path(t, 0), q(t, 0)}, {path(t + 1, 0), q(t + 1, 0)}};
        const double dd =
            eval(spec.utility, StageView<Dual<double>>{t, 1, 2, w, spec.param_values}).deriv;
        const double inc = grid.a(r, 0) - grid.a(r - 1, 0);
        CHECK(std::fabs(inc - dd) <= 1e-4 * std::max(1e-2, std::fabs(dd)));
    }
}

TEST_CASE("discounted grid converges geometrically in T") {
    const auto spec = discounted();
    const Path path(642, 1, 1.0);
    const auto grid = build_a_grid(spec, path, spec.perturbation("p"), kEps, kAxis);
    const auto v = assess_assumptions(grid, 1e-4);
    CHECK(v.classification == AssumptionClass::Uniform);
    CHECK(std::fabs(v.l1.value - v.l2.value) <= 1e-4);
    for (std::size_t r = 0; r + 1 < kAxis.size(); ++r) {
        CHECK(v.uniformity_defect[r] <= 2.0 * std::pow(0.9, kAxis[r]));
        if (kAxis[r] >= 160) CHECK(v.uniformity_defect[r] < 1e-6);
    }
}

TEST_CASE("zero perturbation gives a zero grid") {
    const auto spec = counterexample();
    const Path path(642, 1, 0.625);
    const auto grid = build_a_grid(spec, path, spec.perturbation("zero"), kEps, kAxis);
    for (double a : grid.a.data()) CHECK(a == 0.0);
    const auto v = assess_assumptions(grid, 1e-6);
    CHECK(v.classification == AssumptionClass::Uniform);
    CHECK(v.l1.value == 0.0);
    CHECK(v.l2.value == 0.0);
}

TEST_CASE("tiny eps uses the exact directional derivative") {
    const auto spec = counterexample();
    Path path(50, 1, 0.4);
    const auto grid = build_a_grid(spec, path, spec.perturbation("p"), {1e-3, 1e-9}, {5, 40});
    CHECK_FALSE(grid.exact_column[0]);
    CHECK(grid.exact_column[1]);
    const auto q = perturbation_path(spec, spec.perturbation("p"), 50);
    CHECK(grid.a(1, 1) == doctest::Approx(directional_derivative_sum(spec, path, q, 40)));
}

TEST_CASE("threaded fill is identical") {
    const auto spec = counterexample();
    const Path path(642, 1, 0.625);
    const auto one = build_a_grid(spec, path, spec.perturbation("p"), kEps, kAxis, 1);
    const auto many = build_a_grid(spec, path, spec.perturbation("p"), kEps, kAxis, 3);
    CHECK(one.a == many.a);
}

TEST_CASE("grid preconditions") {
    const auto spec = counterexample();
    const Path path(642, 1, 0.625);
    const auto& p = spec.perturbation("p");
    CHECK_THROWS_AS(build_a_grid(spec, path, p, {1e-2, 1e-1}, {10}), Error);
    CHECK_THROWS_AS(build_a_grid(spec, path, p, {1e-2}, {20, 10}), Error);
    CHECK_THROWS_AS(build_a_grid(spec, path, p, {1e-2}, {700}), Error);
    const auto narrow_eps = build_a_grid(spec, path, p, {1e-1, 5e-2, 2e-2, 1.1e-2}, kAxis);
    CHECK_THROWS_AS(assess_assumptions(narrow_eps, 1e-6), Error);
    const auto short_t = build_a_grid(spec, path, p, kEps, {100, 120, 140, 160});
    CHECK_THROWS_AS(assess_assumptions(short_t, 1e-6), Error);
    const auto three = build_a_grid(spec, path, p, {1e-1, 1e-2, 1e-3}, kAxis);
    CHECK_THROWS_AS(assess_assumptions(three, 1e-6), Error);
}

TEST_CASE("sequence limits") {
    std::vector<double> geo;
    for (int k = 0; k < 8; ++k) geo.push_back(2.0 - std::pow(0.5, k));
    const auto g = sequence_limit(geo);
    CHECK_FALSE(g.divergent);
    CHECK(g.value == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sequence_limit({1, 2, 4, 8, 16, 32}).divergent);
    CHECK(sequence_limit({0.751, 0.752, 0.754, 0.758, 0.766, 0.782, 0.814}).divergent);
    CHECK(sequence_limit({3, 3, 3, 3}).value == 3.0);
    const auto osc = sequence_limit({1, -1, 1, -1});
    CHECK_FALSE(osc.divergent);
    CHECK_THROWS_AS(sequence_limit({}), Error);
}

TEST_CASE("overtaking on the counterexample") {
    const auto spec = counterexample();
    Path euler(62, 1, 0.625);
    euler(0, 0) = 1.0;
    euler(1, 0) = 0.75;
    Path shifted = euler;
    for (int t = 2; t <= 62; ++t) shifted(t, 0) += 0.1;

    const auto same = overtaking_compare(spec, euler, euler, 60);
    CHECK(same.verdict == OvertakingVerdict::Incomparable);
    for (double d : same.d) CHECK(d == 0.0);

    const auto cmp = overtaking_compare(spec, euler, shifted, 60);
    REQUIRE(cmp.d.size() == 61);
    double brute = 0.0;
    for (int t = 0; t <= 60; ++t) {
        brute += stage(spec, euler, t) - stage(spec, shifted, t);
        CHECK(cmp.d[static_cast<std::size_t>(t)] == doctest::Approx(brute).epsilon(1e-12));
    }
    CHECK(cmp.d[60] == doctest::Approx(-0.1 - 0.01 * 59).epsilon(1e-12));
    CHECK(cmp.verdict == OvertakingVerdict::SecondOvertakes);

    const auto rev = overtaking_compare(spec, shifted, euler, 60);
    CHECK(rev.verdict == OvertakingVerdict::FirstOvertakes);
    for (std::size_t k = 0; k < cmp.d.size(); ++k) CHECK(rev.d[k] == -cmp.d[k]);
}

TEST_CASE("paths differing at one stage") {
    const auto spec = parse_problem("vars c\nutility U = -(c(t) - 1)^2\n");
    Path a(30, 1, 1.0);
    Path b = a;
    b(5, 0) = 1.5;
    const auto cmp = overtaking_compare(spec, a, b, 30);
    for (int t = 5; t <= 30; ++t) CHECK(cmp.d[static_cast<std::size_t>(t)] == 0.25);
    for (int t = 0; t < 5; ++t) CHECK(cmp.d[static_cast<std::size_t>(t)] == 0.0);
    CHECK(cmp.verdict == OvertakingVerdict::FirstOvertakes);
}

TEST_CASE("pinned mismatch is rejected") {
    const auto spec = parse_problem("vars c\nutility U = -(c(t+1) - c(t))^2\ninit c(0)=1\n");
    Path a(10, 1, 1.0);
    Path b = a;
    b(0, 0) = 0.0;
    try {
        overtaking_compare(spec, a, b, 9);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Semantic);
    }
}
