#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "putlab/errors.hpp"

namespace putlab {

/// Rank-based utility indices: strictly increasing values in (0, 1], one per
/// instance being ranked. Default scheme: (0.333, 0.666, 0.999).
struct UtilityIndexScheme {
    std::vector<double> indices{0.333, 0.666, 0.999};
};

inline UtilityIndexScheme validate_scheme(const UtilityIndexScheme& candidate) {
    if (candidate.indices.empty())
        throw ValidationError("index scheme: must not be empty");
    double prev = 0.0;
    for (double v : candidate.indices) {
        if (!(v > 0.0 && v <= 1.0))
            throw ValidationError("index scheme: indices must lie in (0, 1]");
        if (!(v > prev))
            throw ValidationError("index scheme: indices must be strictly increasing");
        prev = v;
    }
    return candidate;
}

struct UtilityPoint {
    double x = 0.0;  // expected excess equity
    double u = 0.0;  // utility index
};

/// Assigns the k-th smallest excess the k-th smallest index (rank ascending,
/// stable ties). Points come back in instance order.
inline std::vector<UtilityPoint> assign_utility_indices(const std::vector<double>& excess,
                                                        const UtilityIndexScheme& scheme) {
    if (excess.size() != scheme.indices.size())
        throw ValidationError("assign_utility_indices: excess count must equal scheme length");
    std::vector<std::size_t> order(excess.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return excess[a] < excess[b]; });
    std::vector<UtilityPoint> points(excess.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank)
        points[order[rank]] = UtilityPoint{excess[order[rank]], scheme.indices[rank]};
    return points;
}

/// u(x) = a2 x^2 + a1 x + a0. The parabolic form a + bx - cx^2 maps as
/// a0 = a, a1 = b, a2 = -c.
struct QuadraticUtility {
    double a2 = 0.0;
    double a1 = 0.0;
    double a0 = 0.0;
};

namespace detail {

// Solves a 3x3 linear system by Gaussian elimination with partial pivoting.
inline std::array<double, 3> solve3(std::array<std::array<double, 4>, 3> m) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::fabs(m[row][col]) > std::fabs(m[pivot][col])) pivot = row;
        std::swap(m[col], m[pivot]);
        if (std::fabs(m[col][col]) < 1e-14)
            throw ValidationError("fit_quadratic: singular system");
        for (int row = 0; row < 3; ++row) {
            if (row == col) continue;
            const double f = m[row][col] / m[col][col];
            for (int k = col; k < 4; ++k) m[row][k] -= f * m[col][k];
        }
    }
    return {m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
}

}  // namespace detail

/// Exactly 3 points: the unique interpolating quadratic. More than 3: the
/// least-squares quadratic via normal equations. Fewer than 3 points or
/// duplicate x values are rejected.
inline QuadraticUtility fit_quadratic(const std::vector<UtilityPoint>& points) {
    if (points.size() < 3)
        throw ValidationError("fit_quadratic: need at least 3 points");
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (std::fabs(points[i].x - points[j].x) <= 1e-12)
                throw ValidationError("fit_quadratic: duplicate x values (singular system)");

    std::array<double, 3> sol;
    if (points.size() == 3) {
        std::array<std::array<double, 4>, 3> m{};
        for (int i = 0; i < 3; ++i) {
            const double x = points[static_cast<std::size_t>(i)].x;
            m[i] = {x * x, x, 1.0, points[static_cast<std::size_t>(i)].u};
        }
        sol = detail::solve3(m);
    } else {
        // normal equations over power sums S_k = sum x^k
        double s[5] = {static_cast<double>(points.size()), 0, 0, 0, 0};
        double t[3] = {0, 0, 0};  // sum u x^k
        for (const auto& p : points) {
            double xp = 1.0;
            for (int k = 1; k <= 4; ++k) {
                xp *= p.x;
                s[k] += xp;
            }
            t[0] += p.u * p.x * p.x;
            t[1] += p.u * p.x;
            t[2] += p.u;
        }
        std::array<std::array<double, 4>, 3> m{{{s[4], s[3], s[2], t[0]},
                                                {s[3], s[2], s[1], t[1]},
                                                {s[2], s[1], s[0], t[2]}}};
        sol = detail::solve3(m);
    }
    return QuadraticUtility{sol[0], sol[1], sol[2]};
}

struct UtilityDerivatives {
    double u = 0.0;
    double du = 0.0;
    double d2u = 0.0;
};

inline UtilityDerivatives evaluate_utility(const QuadraticUtility& q, double x) {
    return UtilityDerivatives{q.a2 * x * x + q.a1 * x + q.a0, 2.0 * q.a2 * x + q.a1, 2.0 * q.a2};
}

/// Arrow-Pratt absolute risk aversion lambda(x) = -u''(x)/u'(x). Undefined at
/// the stationary point, where u' vanishes.
inline double ara(const QuadraticUtility& q, double x) {
    const double du = 2.0 * q.a2 * x + q.a1;
    if (std::fabs(du) < 1e-12)
        throw std::domain_error("ara: undefined at stationary point (u'(x) = 0)");
    return -2.0 * q.a2 / du;
}

enum class Curvature { convex, concave, linear };

inline const char* to_string(Curvature c) {
    switch (c) {
        case Curvature::convex: return "convex";
        case Curvature::concave: return "concave";
        case Curvature::linear: return "linear";
    }
    return "?";
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty() const { return !(lo < hi); }
};

/// Sign of lambda on a sub-interval of the domain: +1 risk-averse, -1
/// risk-loving, 0 risk-neutral.
struct AraSignInterval {
    Interval interval;
    int sign = 0;
};

struct UtilityAnalysis {
    Curvature curvature = Curvature::linear;
    std::optional<double> vertex_x;           // stationary point -a1/(2 a2)
    std::optional<Interval> increasing_interval;  // where u' > 0 within the domain
    std::vector<AraSignInterval> ara_sign_by_interval;
    std::optional<double> bliss_point;  // concave case: utility declines beyond it
    bool iara_flag = false;             // concave quadratics: lambda rises with x
};

/// Classifies the fitted curve on a domain: curvature, vertex, where marginal
/// utility is positive, and the sign of lambda on each side of the vertex.
inline UtilityAnalysis analyze_utility(const QuadraticUtility& q, Interval domain) {
    if (domain.empty())
        throw ValidationError("analyze_utility: domain must be a non-empty interval");
    constexpr double kLinearBand = 1e-9;

    UtilityAnalysis a;
    if (std::fabs(q.a2) <= kLinearBand) {
        a.curvature = Curvature::linear;
        if (q.a1 > 0.0) a.increasing_interval = domain;
        a.ara_sign_by_interval.push_back({domain, 0});
        return a;
    }

    const double vertex = -q.a1 / (2.0 * q.a2);
    a.vertex_x = vertex;
    const Interval left{domain.lo, std::min(domain.hi, vertex)};
    const Interval right{std::max(domain.lo, vertex), domain.hi};

    if (q.a2 > 0.0) {
        a.curvature = Curvature::convex;
        // u' > 0 right of the vertex; lambda = -u''/u' is negative there
        if (!right.empty()) a.increasing_interval = right;
        if (!left.empty()) a.ara_sign_by_interval.push_back({left, +1});
        if (!right.empty()) a.ara_sign_by_interval.push_back({right, -1});
    } else {
        a.curvature = Curvature::concave;
        if (!left.empty()) a.increasing_interval = left;
        if (!left.empty()) a.ara_sign_by_interval.push_back({left, +1});
        if (!right.empty()) a.ara_sign_by_interval.push_back({right, -1});
        a.bliss_point = vertex;
        a.iara_flag = true;
    }
    return a;
}

/// Deductible insurance contract for the final-wealth identity.
struct DeductibleContract {
    double initial_wealth = 0.0;  // Z_0
    double income = 0.0;          // M
    double indemnification = 0.0; // I(x)
    double cost = 0.0;            // C(D)
    double deductible = 0.0;      // D, with 0 <= D <= M
};

inline DeductibleContract validate_contract(const DeductibleContract& candidate) {
    if (!(candidate.deductible >= 0.0 && candidate.deductible <= candidate.income))
        throw ValidationError("contract: deductible must satisfy 0 <= D <= M");
    return candidate;
}

/// Final wealth Z_T = Z_0 + M - x + I(x) - C(D) for a realized loss x.
inline double deductible_final_wealth(const DeductibleContract& contract, double loss) {
    if (!(loss >= 0.0))
        throw ValidationError("deductible_final_wealth: loss must be >= 0");
    return contract.initial_wealth + contract.income - loss + contract.indemnification -
           contract.cost;
}

}  // namespace putlab
