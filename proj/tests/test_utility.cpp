#include <cmath>
#include <random>

#include "doctest.h"
#include "putlab/utility.hpp"

using namespace putlab;

namespace {

const std::vector<UtilityPoint> kCaseD{{0.51, 0.333}, {0.75, 0.666}, {0.79, 0.999}};
const std::vector<UtilityPoint> kCaseN{{0.35, 0.999}, {0.20, 0.333}, {0.24, 0.666}};
const std::vector<UtilityPoint> kCaseU{{0.22, 0.333}, {0.36, 0.666}, {0.41, 0.999}};

// central-difference lambda, the independent route for the closed form;
// evaluated in long double because the second difference at step 1e-5
// cancels most double-precision digits
double ara_fd(const QuadraticUtility& q, double x, double h = 1e-5) {
    auto u = [&](long double t) {
        return static_cast<long double>(q.a2) * t * t + static_cast<long double>(q.a1) * t +
               static_cast<long double>(q.a0);
    };
    const long double xl = x, hl = h;
    const long double du = (u(xl + hl) - u(xl - hl)) / (2.0L * hl);
    const long double d2u = (u(xl + hl) - 2.0L * u(xl) + u(xl - hl)) / (hl * hl);
    return static_cast<double>(-d2u / du);
}

}  // namespace

TEST_CASE("assign_utility_indices ranks ascending with stable ties") {
    const UtilityIndexScheme scheme;
    auto d = assign_utility_indices({0.51, 0.75, 0.79}, scheme);
    CHECK(d[0].u == 0.333);
    CHECK(d[1].u == 0.666);
    CHECK(d[2].u == 0.999);

    auto n = assign_utility_indices({0.35, 0.20, 0.24}, scheme);
    CHECK(n[0].u == 0.999);
    CHECK(n[1].u == 0.333);
    CHECK(n[2].u == 0.666);

    auto t = assign_utility_indices({0.5, 0.5, 0.7}, scheme);
    CHECK(t[0].u == 0.333);
    CHECK(t[1].u == 0.666);
    CHECK(t[2].u == 0.999);

    CHECK_THROWS_AS(assign_utility_indices({0.1, 0.2}, scheme), ValidationError);
}

TEST_CASE("index scheme validation") {
    CHECK_NOTHROW(validate_scheme(UtilityIndexScheme{{0.111, 0.555, 0.999}}));
    CHECK_THROWS_AS(validate_scheme(UtilityIndexScheme{{0.5, 0.5}}), ValidationError);
    CHECK_THROWS_AS(validate_scheme(UtilityIndexScheme{{0.0, 0.5}}), ValidationError);
    CHECK_THROWS_AS(validate_scheme(UtilityIndexScheme{{0.5, 1.5}}), ValidationError);
}

TEST_CASE("ranking permutation is invariant to the scheme values") {
    std::mt19937 gen(1234);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const UtilityIndexScheme a{{0.333, 0.666, 0.999}};
    const UtilityIndexScheme b{{0.111, 0.555, 0.999}};
    for (int trial = 0; trial < 200; ++trial) {
        const std::vector<double> excess{unit(gen), unit(gen), unit(gen)};
        const auto pa = assign_utility_indices(excess, a);
        const auto pb = assign_utility_indices(excess, b);
        for (int i = 0; i < 3; ++i) {
            // same rank slot: index k of scheme a pairs with index k of scheme b
            int rank_a = 0, rank_b = 0;
            for (int k = 0; k < 3; ++k) {
                if (a.indices[static_cast<std::size_t>(k)] == pa[static_cast<std::size_t>(i)].u)
                    rank_a = k;
                if (b.indices[static_cast<std::size_t>(k)] == pb[static_cast<std::size_t>(i)].u)
                    rank_b = k;
            }
            CHECK(rank_a == rank_b);
        }
    }
}

TEST_CASE("fit_quadratic reproduces the fitted cases") {
    const auto d = fit_quadratic(kCaseD);
    CHECK(d.a2 == doctest::Approx(24.777).epsilon(1e-2));
    CHECK(d.a1 == doctest::Approx(-29.831).epsilon(1e-2));
    CHECK(d.a0 == doctest::Approx(9.1025).epsilon(1e-2));

    const auto u = fit_quadratic(kCaseU);
    CHECK(u.a2 == doctest::Approx(22.534).epsilon(1e-2));
    CHECK(u.a1 == doctest::Approx(-10.691).epsilon(1e-2));
    CHECK(u.a0 == doctest::Approx(1.5944).epsilon(1e-2));

    const auto line = fit_quadratic({{0.0, 0.1}, {0.5, 0.5}, {1.0, 0.9}});
    CHECK(line.a2 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(line.a1 == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(line.a0 == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("fit_quadratic input validation") {
    CHECK_THROWS_AS(fit_quadratic({{0.0, 0.1}, {0.5, 0.5}}), ValidationError);
    CHECK_THROWS_AS(fit_quadratic({{0.5, 0.1}, {0.5, 0.5}, {1.0, 0.9}}), ValidationError);
}

TEST_CASE("least-squares path for more than three points") {
    // points on u = 2x^2 - x + 0.25 plus a symmetric perturbation pair
    std::vector<UtilityPoint> pts;
    const QuadraticUtility truth{2.0, -1.0, 0.25};
    for (double x : {0.0, 0.25, 0.5, 0.75, 1.0}) pts.push_back({x, evaluate_utility(truth, x).u});
    const auto exact = fit_quadratic(pts);
    CHECK(exact.a2 == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(exact.a1 == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(exact.a0 == doctest::Approx(0.25).epsilon(1e-9));

    pts[1].u += 0.1;
    pts[3].u -= 0.1;
    const auto ls = fit_quadratic(pts);
    // the least-squares residual sum must not exceed the true curve's
    double res_ls = 0.0, res_truth = 0.0;
    for (const auto& p : pts) {
        const double e1 = evaluate_utility(ls, p.x).u - p.u;
        const double e2 = evaluate_utility(truth, p.x).u - p.u;
        res_ls += e1 * e1;
        res_truth += e2 * e2;
    }
    CHECK(res_ls <= res_truth + 1e-12);
}

TEST_CASE("three-point interpolation is exact") {
    std::mt19937 gen(55);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<UtilityPoint> pts{{unit(gen), unit(gen)},
                                      {1.5 + unit(gen), unit(gen)},
                                      {3.0 + unit(gen), unit(gen)}};
        const auto q = fit_quadratic(pts);
        for (const auto& p : pts)
            CHECK(evaluate_utility(q, p.x).u == doctest::Approx(p.u).epsilon(1e-9));
    }
}

TEST_CASE("curvature follows the spacing of rank-assigned points") {
    std::mt19937 gen(99);
    std::uniform_real_distribution<double> unit(0.001, 1.0);
    const UtilityIndexScheme scheme;
    for (int trial = 0; trial < 500; ++trial) {
        const double x1 = unit(gen);
        const double gap1 = unit(gen), gap2 = unit(gen);
        if (std::fabs(gap1 - gap2) < 1e-6) continue;
        const std::vector<double> excess{x1, x1 + gap1, x1 + gap1 + gap2};
        const auto q = fit_quadratic(assign_utility_indices(excess, scheme));
        CHECK((q.a2 > 0.0) == (gap1 > gap2));
    }
}

TEST_CASE("evaluate_utility substitution checks") {
    const QuadraticUtility case1{24.777, -29.831, 9.1025};
    CHECK(evaluate_utility(case1, 0.51).u == doctest::Approx(0.333).epsilon(2e-3));
    const QuadraticUtility case2{-35.318, 23.865, -3.0273};
    CHECK(evaluate_utility(case2, 0.20).u == doctest::Approx(0.333).epsilon(2e-3));
    const QuadraticUtility any{3.0, -2.0, 0.7};
    CHECK(evaluate_utility(any, 0.0).u == 0.7);
    CHECK(evaluate_utility(any, 1.0).du == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(evaluate_utility(any, 1.0).d2u == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("ara closed form") {
    const QuadraticUtility case1{24.777, -29.831, 9.1025};
    CHECK(ara(case1, 0.7) == doctest::Approx(-49.554 / 4.8568).epsilon(1e-3));
    CHECK(ara(case1, 0.7) == doctest::Approx(ara_fd(case1, 0.7)).epsilon(1e-6));

    const QuadraticUtility line{0.0, 1.0, 0.0};
    CHECK(ara(line, -3.0) == 0.0);
    CHECK(ara(line, 5.0) == 0.0);

    // u = x - x^2 (a=0, b=1, c=1): lambda(0) = 2c/b = 2
    const QuadraticUtility hump{-1.0, 1.0, 0.0};
    CHECK(ara(hump, 0.0) == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(ara(hump, 0.5), std::domain_error);  // vertex
}

TEST_CASE("ara matches finite differences for random quadratics away from the vertex") {
    std::mt19937 gen(31415);
    std::uniform_real_distribution<double> mag(0.5, 50.0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        // parameterize by (a2, vertex, u at vertex) to keep values bounded
        const double a2 = (trial % 2 ? 1.0 : -1.0) * mag(gen);
        const double vertex = unit(gen);
        const double u0 = unit(gen);
        const QuadraticUtility q{a2, -2.0 * a2 * vertex, u0 + a2 * vertex * vertex};
        for (int k = -10; k <= 10; ++k) {
            if (k == 0) continue;  // grid excludes the vertex neighborhood
            const double x = vertex + k * 0.05;
            CHECK(std::fabs(ara(q, x) - ara_fd(q, x)) < 1e-6);
        }
    }
}

TEST_CASE("IARA: lambda strictly increases below the bliss point of concave quadratics") {
    std::mt19937 gen(2718);
    std::uniform_real_distribution<double> coeff(0.5, 50.0);
    for (int trial = 0; trial < 100; ++trial) {
        const QuadraticUtility q{-coeff(gen), coeff(gen), coeff(gen) - 25.0};
        const auto analysis = analyze_utility(q, Interval{-10.0, 10.0});
        REQUIRE(analysis.iara_flag);
        REQUIRE(analysis.bliss_point.has_value());
        const double bliss = *analysis.bliss_point;
        double prev = ara(q, bliss - 1.0);
        for (double x = bliss - 0.9; x < bliss - 0.05; x += 0.1) {
            const double lam = ara(q, x);
            CHECK(lam > prev);
            prev = lam;
        }
    }
}

TEST_CASE("analyze_utility on the three fitted cases") {
    const auto d = analyze_utility(QuadraticUtility{24.777, -29.831, 9.1025}, Interval{0.51, 0.79});
    CHECK(d.curvature == Curvature::convex);
    CHECK(*d.vertex_x == doctest::Approx(0.60199).epsilon(1e-4));
    CHECK_FALSE(d.iara_flag);

    const auto n = analyze_utility(QuadraticUtility{-35.318, 23.865, -3.0273}, Interval{0.20, 0.35});
    CHECK(n.curvature == Curvature::concave);
    CHECK(*n.vertex_x == doctest::Approx(0.33786).epsilon(1e-4));
    CHECK(*n.bliss_point == doctest::Approx(0.33786).epsilon(1e-4));
    CHECK(n.iara_flag);

    const auto u = analyze_utility(QuadraticUtility{22.534, -10.691, 1.5944}, Interval{0.22, 0.41});
    CHECK(u.curvature == Curvature::convex);
    CHECK(*u.vertex_x == doctest::Approx(0.23722).epsilon(1e-4));
}

TEST_CASE("analyze_utility sign map and vertex properties") {
    const QuadraticUtility q{24.777, -29.831, 9.1025};
    const auto a = analyze_utility(q, Interval{0.0, 1.0});
    REQUIRE(a.vertex_x.has_value());
    CHECK(evaluate_utility(q, *a.vertex_x).du == doctest::Approx(0.0).epsilon(1e-9));
    REQUIRE(a.ara_sign_by_interval.size() == 2);
    CHECK(a.ara_sign_by_interval[0].sign == +1);  // left of the vertex
    CHECK(a.ara_sign_by_interval[1].sign == -1);  // right of the vertex
    REQUIRE(a.increasing_interval.has_value());
    CHECK(a.increasing_interval->lo == doctest::Approx(*a.vertex_x).epsilon(1e-12));

    const auto lin = analyze_utility(QuadraticUtility{0.0, 0.8, 0.1}, Interval{0.0, 1.0});
    CHECK(lin.curvature == Curvature::linear);
    CHECK_FALSE(lin.vertex_x.has_value());
    REQUIRE(lin.ara_sign_by_interval.size() == 1);
    CHECK(lin.ara_sign_by_interval[0].sign == 0);
}

TEST_CASE("deductible final wealth") {
    CHECK(deductible_final_wealth({100.0, 10.0, 15.0, 2.0, 5.0}, 20.0) == 103.0);
    CHECK(deductible_final_wealth({0.0, 0.0, 0.0, 0.0, 0.0}, 0.0) == 0.0);
    CHECK(deductible_final_wealth({100.0, 0.0, 0.0, 1.0, 0.0}, 5.0) == 94.0);
    CHECK_THROWS_AS(deductible_final_wealth({100.0, 10.0, 0.0, 0.0, 0.0}, -1.0), ValidationError);
    CHECK_THROWS_AS(validate_contract({100.0, 10.0, 0.0, 0.0, 11.0}), ValidationError);
    CHECK_NOTHROW(validate_contract({100.0, 10.0, 0.0, 0.0, 10.0}));
}
