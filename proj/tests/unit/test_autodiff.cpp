#include <doctest.h>

#include <cmath>
#include <random>

#include "random_expr.hpp"
#include "tvckit/autodiff.hpp"
#include "tvckit/problem.hpp"

using namespace tvckit;

namespace {

const ExprScope kScope{{"c"}, {"alpha", "beta", "gamma"}, true};

Expr counterexample_utility() {
    return parse_expression("(c(t) - alpha)^2 + beta*c(t+1) + gamma*c(t+2)", kScope);
}

StageEnv env1(std::vector<double> window, std::vector<double> params = {1.0, 0.5, 0.25},
              int time = 0) {
    Matrix m(1, window.size());
    for (std::size_t j = 0; j < window.size(); ++j) m(0, j) = window[j];
    return {time, std::move(m), std::move(params)};
}

double central_difference(const Expr& e, StageEnv env, Slot s, double h) {
    const auto i = static_cast<std::size_t>(s.component);
    const auto j = static_cast<std::size_t>(s.lag);
    const double x = env.window(i, j);
    env.window(i, j) = x + h;
    const double up = eval(e, env);
    env.window(i, j) = x - h;
    const double down = eval(e, env);
    return (up - down) / (2 * h);
}

}  // namespace

TEST_CASE("counterexample utility at the steady state") {
    const auto u = counterexample_utility();
    CHECK(eval(u, env1({0.625, 0.625, 0.625})) == doctest::Approx(0.609375).epsilon(1e-15));
}

TEST_CASE("constant utility") {
    const auto zero = parse_expression("0", kScope);
    CHECK(eval(zero, env1({0.3, -2, 7})) == 0.0);
    const auto g = grad_stage(zero, env1({0.3, -2, 7}));
    for (double v : g.data()) CHECK(v == 0.0);
}

TEST_CASE("domain errors point at the offending node") {
    const auto e = parse_expression("1 + ln(c(t))", kScope);
    try {
        eval(e, env1({0.0}));
        FAIL("expected a domain error");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::Domain);
        REQUIRE(err.pos());
        CHECK(*err.pos() == SourcePos{1, 5});
    }
    CHECK_THROWS_AS(eval(parse_expression("1/(c(t) - 1)", kScope), env1({1.0})), Error);
    CHECK_THROWS_AS(eval(parse_expression("c(t)^0.5", kScope), env1({-1.0})), Error);
    CHECK_THROWS_AS(eval(parse_expression("c(t)^-1", kScope), env1({0.0})), Error);
    CHECK_THROWS_AS(eval(parse_expression("exp(exp(c(t)))", kScope), env1({10.0})), Error);
}

TEST_CASE("integer powers are exact at non-positive bases") {
    const auto e = parse_expression("c(t)^3", kScope);
    CHECK(eval(e, env1({-2.0})) == -8.0);
    CHECK(partial(e, {0, 0}, env1({-2.0})) == 12.0);
    CHECK(partial(e, {0, 0}, env1({0.0})) == 0.0);
    const auto inv = parse_expression("c(t)^-2", kScope);
    CHECK(partial(inv, {0, 0}, env1({-2.0})) == doctest::Approx(0.25));
}

TEST_CASE("counterexample partials") {
    const auto u = counterexample_utility();
    CHECK(partial(u, {0, 0}, env1({1.0, 3.0, -4.0})) == 0.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-5, 5);
    for (int k = 0; k < 20; ++k) {
        const auto env = env1({d(rng), d(rng), d(rng)});
        CHECK(partial(u, {0, 1}, env) == 0.5);
        CHECK(partial(u, {0, 2}, env) == 0.25);
    }
    const auto g = grad_stage(u, env1({0.625, 0.625, 0.625}));
    CHECK(g.rows() == 1);
    CHECK(g.cols() == 3);
    CHECK(g(0, 0) == -0.75);
    CHECK(g(0, 1) == 0.5);
    CHECK(g(0, 2) == 0.25);
}

TEST_CASE("absent slot has zero partial") {
    const auto e = parse_expression("alpha*c(t)^2", kScope);
    CHECK(partial(e, {0, 2}, env1({1.5, 2, 3})) == 0.0);
}

TEST_CASE("out-of-window slot is rejected") {
    CHECK_THROWS_AS(partial(counterexample_utility(), {0, 3}, env1({1, 2, 3})), Error);
    CHECK_THROWS_AS(partial(counterexample_utility(), {1, 0}, env1({1, 2, 3})), Error);
}

TEST_CASE("time and parameters") {
    const auto e = parse_expression("beta^t * c(t)", kScope);
    const auto env = env1({2.0}, {1.0, 0.5, 0.25}, 3);
    CHECK(eval(e, env) == 0.25);
    CHECK(partial(e, {0, 0}, env) == 0.125);
    CHECK(eval_in_time(parse_expression("t/(1+t)", {{}, {}, false}), 3, {}) == 0.75);
    CHECK_THROWS_AS(eval_in_time(e, 1, std::vector<double>{1, 0.5, 0.25}), Error);
}

TEST_CASE("variable exponents") {
    const auto e = parse_expression("c(t)^c(t+1)", kScope);
    const auto env = env1({2.0, 3.0});
    CHECK(eval(e, env) == doctest::Approx(8.0));
    CHECK(partial(e, {0, 0}, env) == doctest::Approx(12.0));
    CHECK(partial(e, {0, 1}, env) == doctest::Approx(8.0 * std::log(2.0)));
}

TEST_CASE("random polynomials match central differences") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> coef(-2, 2);
    std::uniform_int_distribution<int> power(0, 3);
    for (int k = 0; k < 200; ++k) {
        Expr poly = Expr::constant(0.0);
        for (int term = 0; term < 4; ++term) {
            Expr mono = Expr::constant(std::fabs(coef(rng)));
            for (int j = 0; j < 3; ++j) {
                mono = Expr::binary(NodeKind::Mul, mono,
                                    Expr::binary(NodeKind::Pow, Expr::var("c", 0, j),
                                                 Expr::constant(power(rng))));
            }
            poly = Expr::binary(coef(rng) < 0 ? NodeKind::Sub : NodeKind::Add, poly, mono);
        }
        const auto env = env1({coef(rng), coef(rng), coef(rng)});
        const auto g = grad_stage(poly, env);
        for (int j = 0; j < 3; ++j) {
            const double fd = central_difference(poly, env, {0, j}, 1e-6);
            CHECK(std::fabs(g(0, static_cast<std::size_t>(j)) - fd) /
                      std::max(1.0, std::fabs(g(0, static_cast<std::size_t>(j)))) <=
                  1e-6);
        }
    }
}

TEST_CASE("partials are linear in the expression") {
    std::mt19937_64 rng(5);
    testing::ExprShape shape{{"c", "d"}, {"p"}, 2};
    std::uniform_real_distribution<double> x(-2, 2);
    for (int k = 0; k < 300; ++k) {
        const auto e1 = testing::smooth_expr(rng, shape, 4);
        const auto e2 = testing::smooth_expr(rng, shape, 4);
        const double a = 1.75;
        const double b = 0.375;
        const auto combo =
            Expr::binary(NodeKind::Add, Expr::binary(NodeKind::Mul, Expr::constant(a), e1),
                         Expr::binary(NodeKind::Mul, Expr::constant(b), e2));
        Matrix w(2, 2);
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t j = 0; j < 2; ++j) w(i, j) = x(rng);
        }
        const StageEnv env{2, w, {0.8}};
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                const double lhs = partial(combo, {i, j}, env);
                const double rhs = a * partial(e1, {i, j}, env) + b * partial(e2, {i, j}, env);
                CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(rhs)));
            }
        }
    }
}

TEST_CASE("grad_stage equals independent partial calls") {
    std::mt19937_64 rng(8);
    testing::ExprShape shape{{"c", "d"}, {"p"}, 3};
    std::uniform_real_distribution<double> x(-2, 2);
    for (int k = 0; k < 200; ++k) {
        const auto e = testing::smooth_expr(rng, shape, 5);
        Matrix w(2, 3);
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t j = 0; j < 3; ++j) w(i, j) = x(rng);
        }
        const StageEnv env{1, w, {1.2}};
        const auto g = grad_stage(e, env);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 3; ++j) {
                CHECK(g(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) ==
                      partial(e, {i, j}, env));
            }
        }
    }
}

TEST_CASE("nested duals give mixed second derivatives") {
    const auto e = parse_expression("c(t)^2 * c(t+1) + exp(c(t+1))", kScope);
    using D2 = Dual<Dual<double>>;
    std::vector<D2> w{D2(Dual<double>(1.5, 1.0), Dual<double>(0.0, 0.0)),
                      D2(Dual<double>(0.5, 0.0), Dual<double>(1.0, 0.0))};
    const StageView<D2> view{0, 1, 2, w, std::vector<double>{1, 0.5, 0.25}};
    const auto r = eval(e, view);
    CHECK(r.deriv.value == doctest::Approx(1.5 * 1.5 + std::exp(0.5)));  // d/dc(t+1)
    CHECK(r.deriv.deriv == doctest::Approx(2 * 1.5));                      // d2/dc(t)dc(t+1)
}
