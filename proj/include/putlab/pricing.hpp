#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "putlab/errors.hpp"
#include "putlab/market.hpp"
#include "putlab/rng.hpp"

namespace putlab {

/// Monte Carlo valuation of the put and the terminal asset over one period.
/// Variances are unbiased (n-1 denominator) sample variances; put samples are
/// discounted per replication, asset samples are undiscounted.
struct SimulationEstimate {
    double put_price_mean = 0.0;
    double put_price_variance = 0.0;
    double asset_value_mean = 0.0;
    double asset_value_variance = 0.0;
    std::uint64_t replications = 0;
    std::uint64_t seed = 0;
};

/// Exact enumeration counterpart of SimulationEstimate.
struct OracleValues {
    double put_price = 0.0;       // discounted expected put payoff
    double call_price = 0.0;      // discounted expected call payoff
    double expected_asset = 0.0;  // undiscounted E[S_T]
    double expected_put_payoff_undiscounted = 0.0;
};

/// Maps a uniform deviate to a move via the scenario CDF. Bands are half-open
/// with the final band closed at 1.
inline Move draw_move(const ScenarioSpec& scenario, double u) {
    if (!(u >= 0.0 && u <= 1.0))
        throw std::domain_error("draw_move: deviate must lie in [0, 1]");
    if (u < scenario.p_up) return Move::up;
    if (u < scenario.p_up + scenario.p_neutral) return Move::neutral;
    return Move::down;
}

namespace detail {

struct SampleSums {
    double put = 0.0;
    double put_sq = 0.0;
    double asset = 0.0;
    double asset_sq = 0.0;
};

}  // namespace detail

/// Seeded Monte Carlo estimate. Replication k draws uniform_at(seed, k), so
/// the result depends only on (inputs, seed, replications); worker count does
/// not change a single bit. Chunk partial sums are combined in chunk order.
inline SimulationEstimate mc_estimate(const MarketParams& params, const ScenarioSpec& scenario,
                                      const MoveInstance& instance, std::uint64_t replications,
                                      std::uint64_t seed, unsigned workers = 1) {
    if (replications < 1)
        throw ValidationError("mc_estimate: replications must be >= 1");
    workers = std::max(1u, workers);

    const double df = params.discount_factor();
    const double s_up = params.spot + instance.up_move;
    const double s_neutral = params.spot;
    const double s_down = params.spot - instance.down_move;
    const double pay_up = df * std::max(params.strike - s_up, 0.0);
    const double pay_neutral = df * std::max(params.strike - s_neutral, 0.0);
    const double pay_down = df * std::max(params.strike - s_down, 0.0);
    const double band_up = scenario.p_up;
    const double band_neutral = scenario.p_up + scenario.p_neutral;

    constexpr std::uint64_t kChunk = 4096;
    const std::uint64_t n_chunks = (replications + kChunk - 1) / kChunk;
    std::vector<detail::SampleSums> chunk_sums(n_chunks);

    auto run_chunk = [&](std::uint64_t c) {
        const std::uint64_t begin = c * kChunk;
        const std::uint64_t end = std::min(begin + kChunk, replications);
        detail::SampleSums s;
        for (std::uint64_t k = begin; k < end; ++k) {
            const double u = uniform_at(seed, k);
            double put, asset;
            if (u < band_up) {
                put = pay_up;
                asset = s_up;
            } else if (u < band_neutral) {
                put = pay_neutral;
                asset = s_neutral;
            } else {
                put = pay_down;
                asset = s_down;
            }
            s.put += put;
            s.put_sq += put * put;
            s.asset += asset;
            s.asset_sq += asset * asset;
        }
        chunk_sums[c] = s;
    };

    if (workers == 1 || n_chunks == 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        const unsigned count = std::min<std::uint64_t>(workers, n_chunks);
        pool.reserve(count);
        for (unsigned t = 0; t < count; ++t)
            pool.emplace_back([&] {
                for (std::uint64_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1))
                    run_chunk(c);
            });
        for (auto& t : pool) t.join();
    }

    detail::SampleSums total;
    for (const auto& s : chunk_sums) {
        total.put += s.put;
        total.put_sq += s.put_sq;
        total.asset += s.asset;
        total.asset_sq += s.asset_sq;
    }

    const double n = static_cast<double>(replications);
    SimulationEstimate est;
    est.replications = replications;
    est.seed = seed;
    est.put_price_mean = total.put / n;
    est.asset_value_mean = total.asset / n;
    if (replications > 1) {
        est.put_price_variance =
            std::max(0.0, (total.put_sq - n * est.put_price_mean * est.put_price_mean) / (n - 1.0));
        est.asset_value_variance = std::max(
            0.0, (total.asset_sq - n * est.asset_value_mean * est.asset_value_mean) / (n - 1.0));
    }
    return est;
}

/// Exact three-outcome enumeration of the simulated quantities.
inline OracleValues analytic_values(const MarketParams& params, const ScenarioSpec& scenario,
                                    const MoveInstance& instance) {
    const auto dist = terminal_distribution(params, scenario, instance);
    OracleValues v;
    double call_payoff = 0.0;
    for (const auto& o : dist.outcomes) {
        v.expected_asset += o.probability * o.terminal_price;
        v.expected_put_payoff_undiscounted +=
            o.probability * std::max(params.strike - o.terminal_price, 0.0);
        call_payoff += o.probability * std::max(o.terminal_price - params.strike, 0.0);
    }
    const double df = params.discount_factor();
    v.put_price = df * v.expected_put_payoff_undiscounted;
    v.call_price = df * call_payoff;
    return v;
}

enum class ParityDirection { call_from_put, put_from_call };

/// The parity formula transform P = C + X e^{-r tau} - S (and its inverse).
/// Negative outputs are returned as-is; this is not a no-arbitrage check.
inline double parity_transform(ParityDirection direction, double price,
                               const MarketParams& params) {
    if (!(price >= 0.0))
        throw ValidationError("parity_transform: price must be >= 0");
    const double pv_strike = params.strike * params.discount_factor();
    return direction == ParityDirection::put_from_call ? price + pv_strike - params.spot
                                                       : price - pv_strike + params.spot;
}

}  // namespace putlab
