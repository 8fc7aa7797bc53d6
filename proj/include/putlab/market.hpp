#pragma once

#include <array>
#include <cmath>
#include <string>

#include "putlab/errors.hpp"

namespace putlab {

/// Probabilities must sum to one within this tolerance.
inline constexpr double kProbabilityTolerance = 1e-12;

enum class Move { up, neutral, down };

inline const char* to_string(Move m) {
    switch (m) {
        case Move::up: return "up";
        case Move::neutral: return "neutral";
        case Move::down: return "down";
    }
    return "?";
}

/// One-period contract economics: spot S, strike X, per-period rate r,
/// horizon T-t in periods.
struct MarketParams {
    double spot = 50.0;
    double strike = 55.0;
    double rate = 0.05;
    double horizon = 1.0;

    double discount_factor() const { return std::exp(-rate * horizon); }
};

inline MarketParams validate_market(const MarketParams& candidate) {
    if (!std::isfinite(candidate.spot) || !std::isfinite(candidate.strike) ||
        !std::isfinite(candidate.rate) || !std::isfinite(candidate.horizon))
        throw ValidationError("market: all parameters must be finite");
    if (!(candidate.spot > 0.0))
        throw ValidationError("market: spot must be > 0");
    if (!(candidate.strike >= 0.0))
        throw ValidationError("market: strike must be >= 0");
    if (!(candidate.horizon > 0.0))
        throw ValidationError("market: horizon must be > 0");
    if (!(candidate.rate >= 0.0))
        throw ValidationError("market: rate must be >= 0");
    return candidate;
}

/// A probability space over {up, neutral, down} moves.
struct ScenarioSpec {
    std::string label;
    double p_up = 0.0;
    double p_neutral = 0.0;
    double p_down = 0.0;
};

inline ScenarioSpec validate_scenario(const ScenarioSpec& candidate) {
    auto in_unit = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };
    if (!in_unit(candidate.p_up))
        throw ValidationError("scenario " + candidate.label + ": p_up must lie in [0, 1]");
    if (!in_unit(candidate.p_neutral))
        throw ValidationError("scenario " + candidate.label + ": p_neutral must lie in [0, 1]");
    if (!in_unit(candidate.p_down))
        throw ValidationError("scenario " + candidate.label + ": p_down must lie in [0, 1]");
    const double sum = candidate.p_up + candidate.p_neutral + candidate.p_down;
    if (std::fabs(sum - 1.0) > kProbabilityTolerance)
        throw ValidationError("scenario " + candidate.label +
                              ": probabilities must sum to 1 (got " + std::to_string(sum) + ")");
    return candidate;
}

/// Move magnitudes are stored as positive amounts; direction is implied by
/// which field they sit in.
struct MoveInstance {
    double up_move = 0.0;
    double down_move = 0.0;
    int ordinal = 1;  // instance index (i/ii/iii -> 1/2/3)
};

inline MoveInstance validate_instance(const MoveInstance& candidate, const MarketParams& params) {
    if (!std::isfinite(candidate.up_move) || !std::isfinite(candidate.down_move))
        throw ValidationError("instance: move magnitudes must be finite");
    if (!(candidate.up_move > 0.0))
        throw ValidationError("instance: up_move must be > 0");
    if (!(candidate.down_move >= 0.0))
        throw ValidationError("instance: down_move must be >= 0");
    if (!(candidate.down_move < params.spot))
        throw ValidationError("instance: down_move must be < spot (price cannot go negative)");
    if (candidate.ordinal < 1)
        throw ValidationError("instance: ordinal must be >= 1");
    return candidate;
}

struct Outcome {
    Move move;
    double terminal_price;
    double probability;
};

/// The three-point terminal price distribution of the one-step tree.
struct OutcomeDistribution {
    std::array<Outcome, 3> outcomes;  // up, neutral, down

    double expected_price() const {
        double e = 0.0;
        for (const auto& o : outcomes) e += o.probability * o.terminal_price;
        return e;
    }
};

inline OutcomeDistribution terminal_distribution(const MarketParams& params,
                                                 const ScenarioSpec& scenario,
                                                 const MoveInstance& instance) {
    return OutcomeDistribution{{{
        {Move::up, params.spot + instance.up_move, scenario.p_up},
        {Move::neutral, params.spot, scenario.p_neutral},
        {Move::down, params.spot - instance.down_move, scenario.p_down},
    }}};
}

}  // namespace putlab
