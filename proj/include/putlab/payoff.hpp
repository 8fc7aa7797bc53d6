#pragma once

#include <algorithm>
#include <cmath>

#include "putlab/errors.hpp"
#include "putlab/market.hpp"

namespace putlab {

enum class OptionKind { call, put };

/// Vanilla European payoff at maturity.
inline double vanilla_payoff(OptionKind kind, double terminal_price, double strike) {
    if (!(terminal_price >= 0.0))
        throw ValidationError("vanilla_payoff: terminal price must be >= 0");
    if (!(strike >= 0.0))
        throw ValidationError("vanilla_payoff: strike must be >= 0");
    return kind == OptionKind::call ? std::max(terminal_price - strike, 0.0)
                                    : std::max(strike - terminal_price, 0.0);
}

/// A position in one option with symmetric move magnitude. The put premium is
/// never supplied directly: it is derived from the call premium through the
/// parity formula P = C + X e^{-r tau} - S.
struct PositionSpec {
    OptionKind kind = OptionKind::call;
    double call_premium = 0.0;  // C
    double symmetric_move = 0.0;  // delta-s, applied both up and down
};

inline PositionSpec validate_position(const PositionSpec& candidate) {
    if (!(candidate.call_premium >= 0.0))
        throw ValidationError("position: call premium must be >= 0");
    // symmetric_move = 0 is admitted as the degenerate limit where all
    // scenario expectations collapse to -C.
    if (!(candidate.symmetric_move >= 0.0))
        throw ValidationError("position: symmetric move must be >= 0");
    return candidate;
}

/// Modified expected position value: the expectation expression before the
/// outer Max (pre_floor) and after flooring at the maximum loss.
struct PositionExpectation {
    double pre_floor = 0.0;
    double floored = 0.0;
    double loss_bound = 0.0;  // -C for calls, -P for puts
    bool negative_put_premium = false;  // derived P < 0 (S > C + X e^{-r tau})
};

inline PositionExpectation position_expectation(const MarketParams& params,
                                                const ScenarioSpec& scenario,
                                                const PositionSpec& position) {
    const double df = params.discount_factor();
    const double prob_gap = scenario.p_up - scenario.p_down;
    const double drift = df * position.symmetric_move * prob_gap;
    const double derived_put_premium =
        position.call_premium + params.strike * df - params.spot;

    PositionExpectation e;
    if (position.kind == OptionKind::call) {
        e.pre_floor = params.spot + drift - params.strike * df - position.call_premium;
        e.loss_bound = -position.call_premium;
    } else {
        e.pre_floor = -drift - position.call_premium;
        e.loss_bound = -derived_put_premium;
        e.negative_put_premium = derived_put_premium < 0.0;
    }
    e.floored = std::max(e.pre_floor, e.loss_bound);
    return e;
}

/// The six pre-floor expectations and the derived preference orderings.
struct OrderingReport {
    double call_up = 0.0, call_neutral = 0.0, call_down = 0.0;
    double put_up = 0.0, put_neutral = 0.0, put_down = 0.0;
    double call_up_floored = 0.0, call_neutral_floored = 0.0, call_down_floored = 0.0;
    double put_up_floored = 0.0, put_neutral_floored = 0.0, put_down_floored = 0.0;
    bool calls_strictly_ordered = false;   // E_D < E_N < E_U on pre-floor values
    bool puts_strictly_ordered = false;    // E_U < E_N < E_D on pre-floor values
    bool calls_floored_weakly_ordered = false;
    bool puts_floored_weakly_ordered = false;
    bool negative_put_premium = false;
};

/// Checks the put/call preference orderings across an up-biased, a neutral
/// and a down-biased scenario. Strict orderings are established on the
/// pre-floor expectations; after flooring, distinct scenarios can tie at the
/// loss bound, so only weak ordering is reported there.
inline OrderingReport verify_preference_ordering(const MarketParams& params,
                                                 const PositionSpec& position,
                                                 const ScenarioSpec& up_scenario,
                                                 const ScenarioSpec& neutral_scenario,
                                                 const ScenarioSpec& down_scenario) {
    if (!(up_scenario.p_up > up_scenario.p_down))
        throw ValidationError("ordering: up scenario requires p_up > p_down");
    if (!(down_scenario.p_down > down_scenario.p_up))
        throw ValidationError("ordering: down scenario requires p_down > p_up");
    if (std::fabs(neutral_scenario.p_up - neutral_scenario.p_down) > kProbabilityTolerance)
        throw ValidationError("ordering: neutral scenario requires p_up = p_down");

    auto expect = [&](OptionKind kind, const ScenarioSpec& s) {
        PositionSpec p = position;
        p.kind = kind;
        return position_expectation(params, s, p);
    };
    const auto cu = expect(OptionKind::call, up_scenario);
    const auto cn = expect(OptionKind::call, neutral_scenario);
    const auto cd = expect(OptionKind::call, down_scenario);
    const auto pu = expect(OptionKind::put, up_scenario);
    const auto pn = expect(OptionKind::put, neutral_scenario);
    const auto pd = expect(OptionKind::put, down_scenario);

    OrderingReport r;
    r.call_up = cu.pre_floor;
    r.call_neutral = cn.pre_floor;
    r.call_down = cd.pre_floor;
    r.put_up = pu.pre_floor;
    r.put_neutral = pn.pre_floor;
    r.put_down = pd.pre_floor;
    r.call_up_floored = cu.floored;
    r.call_neutral_floored = cn.floored;
    r.call_down_floored = cd.floored;
    r.put_up_floored = pu.floored;
    r.put_neutral_floored = pn.floored;
    r.put_down_floored = pd.floored;
    r.calls_strictly_ordered = r.call_down < r.call_neutral && r.call_neutral < r.call_up;
    r.puts_strictly_ordered = r.put_up < r.put_neutral && r.put_neutral < r.put_down;
    r.calls_floored_weakly_ordered =
        r.call_down_floored <= r.call_neutral_floored && r.call_neutral_floored <= r.call_up_floored;
    r.puts_floored_weakly_ordered =
        r.put_up_floored <= r.put_neutral_floored && r.put_neutral_floored <= r.put_down_floored;
    r.negative_put_premium = pu.negative_put_premium;
    return r;
}

}  // namespace putlab
