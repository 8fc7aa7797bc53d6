#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "putlab/config.hpp"
#include "putlab/errors.hpp"
#include "putlab/strategy.hpp"
#include "putlab/utility.hpp"

namespace putlab {

namespace detail {

// fixed 6-fractional-digit rounding for report values
inline double r6(double v) { return std::round(v * 1e6) / 1e6; }

inline std::string fmt(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    // avoid the "-0.00" artifact
    std::string s(buf);
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
    return s;
}

}  // namespace detail

/// Fitted-curve sample series for a figure, plus the raw observed points.
struct FigureSeries {
    std::vector<std::pair<double, double>> fitted;  // (x, u_fitted), monotone x
    std::vector<UtilityPoint> points;
};

/// Samples the fitted curve on [min x, max x] of the points with the given
/// step, endpoints inclusive.
inline FigureSeries figure_series(const QuadraticUtility& q,
                                  const std::vector<UtilityPoint>& points, double step) {
    if (points.empty()) throw ValidationError("figure_series: points must not be empty");
    if (!(step > 0.0)) throw ValidationError("figure_series: step must be > 0");
    double lo = points.front().x, hi = points.front().x;
    for (const auto& p : points) {
        lo = std::min(lo, p.x);
        hi = std::max(hi, p.x);
    }
    FigureSeries s;
    s.points = points;
    for (std::uint64_t i = 0;; ++i) {
        const double x = lo + static_cast<double>(i) * step;
        if (x > hi + 1e-12) break;
        s.fitted.emplace_back(x, evaluate_utility(q, x).u);
    }
    if (s.fitted.empty() || s.fitted.back().first < hi - 1e-12)
        s.fitted.emplace_back(hi, evaluate_utility(q, hi).u);
    return s;
}

/// Per-scenario utility pipeline outcome inside a report: either a fit or a
/// diagnostic explaining why no curve exists.
struct ScenarioUtility {
    std::string scenario;
    std::optional<PipelineFit> fit;
    std::string diagnostic;  // empty on success
};

struct ReportBundle {
    nlohmann::json json;
    SuiteResult suite;
    std::vector<ScenarioUtility> utilities;
};

namespace detail {

inline nlohmann::json to_json(const EquityTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"move", to_string(r.move)},
                        {"probability", r6(r.probability)},
                        {"net_change", r6(r.net_change)},
                        {"contribution", r6(r.contribution)}});
    nlohmann::json j{{"strategy", to_string(t.strategy)}, {"rows", rows}, {"total", r6(t.total)}};
    if (t.put_price_used) j["put_price_used"] = r6(*t.put_price_used);
    return j;
}

inline nlohmann::json to_json(const UtilityAnalysis& a) {
    nlohmann::json j{{"curvature", to_string(a.curvature)}, {"iara", a.iara_flag}};
    if (a.vertex_x) j["vertex_x"] = r6(*a.vertex_x);
    if (a.bliss_point) j["bliss_point"] = r6(*a.bliss_point);
    if (a.increasing_interval)
        j["increasing_interval"] = {r6(a.increasing_interval->lo), r6(a.increasing_interval->hi)};
    nlohmann::json signs = nlohmann::json::array();
    for (const auto& s : a.ara_sign_by_interval)
        signs.push_back({{"lo", r6(s.interval.lo)}, {"hi", r6(s.interval.hi)}, {"sign", s.sign}});
    j["ara_sign_by_interval"] = signs;
    return j;
}

inline nlohmann::json to_json(const QuadraticUtility& q) {
    return {{"a2", r6(q.a2)}, {"a1", r6(q.a1)}, {"a0", r6(q.a0)}};
}

inline nlohmann::json to_json(const PipelineFit& f) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : f.points) points.push_back({{"x", r6(p.x)}, {"u", r6(p.u)}});
    return {{"points", points}, {"fit", to_json(f.fit)}, {"analysis", to_json(f.analysis)}};
}

inline nlohmann::json config_echo(const ExperimentConfig& c) {
    nlohmann::json scenarios = nlohmann::json::array();
    for (const auto& s : c.scenarios)
        scenarios.push_back({{"label", s.label},
                             {"p_up", r6(s.p_up)},
                             {"p_neutral", r6(s.p_neutral)},
                             {"p_down", r6(s.p_down)}});
    nlohmann::json instances = nlohmann::json::array();
    for (const auto& i : c.instances)
        instances.push_back(
            {{"ordinal", i.ordinal}, {"up_move", r6(i.up_move)}, {"down_move", r6(i.down_move)}});
    nlohmann::json indices = nlohmann::json::array();
    for (double v : c.index_scheme.indices) indices.push_back(r6(v));
    return {{"scenarios", scenarios},   {"instances", instances},
            {"price_source", c.price_source}, {"indices", indices},
            {"replications", c.replications}, {"seed", c.seed}};
}

}  // namespace detail

/// Runs the full pipeline: pricing suite, equity tables, utility fits and
/// analyses, and (for the paper-fixed source) the discrepancy and
/// statistical-consistency audits. Output carries no timestamps or
/// host-dependent fields; identical (config, seed) runs are byte-identical
/// regardless of worker count.
inline ReportBundle run_report(const ExperimentConfig& config, unsigned workers = 1) {
    validate_config(config);
    const PriceSource source = make_price_source(config);

    ReportBundle bundle;
    bundle.suite = run_suite(config.market, config.scenarios, config.instances, source, workers);

    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : bundle.suite.cells) {
        nlohmann::json j{
            {"scenario", cell.comparison.scenario_label},
            {"instance", cell.comparison.instance_ordinal},
            {"oracle",
             {{"put_price", detail::r6(cell.oracle.put_price)},
              {"call_price", detail::r6(cell.oracle.call_price)},
              {"expected_asset", detail::r6(cell.oracle.expected_asset)},
              {"expected_put_payoff_undiscounted",
               detail::r6(cell.oracle.expected_put_payoff_undiscounted)}}},
            {"a1", detail::to_json(cell.a1)},
            {"a2", detail::to_json(cell.a2)},
            {"comparison",
             {{"a1_total", detail::r6(cell.comparison.a1_total)},
              {"a2_total", detail::r6(cell.comparison.a2_total)},
              {"excess_equity", detail::r6(cell.comparison.excess_equity)},
              {"price_source", cell.comparison.price_source}}}};
        if (cell.estimate)
            j["estimate"] = {{"put_price_mean", detail::r6(cell.estimate->put_price_mean)},
                             {"put_price_variance", detail::r6(cell.estimate->put_price_variance)},
                             {"asset_value_mean", detail::r6(cell.estimate->asset_value_mean)},
                             {"asset_value_variance",
                              detail::r6(cell.estimate->asset_value_variance)},
                             {"replications", cell.estimate->replications},
                             {"seed", cell.estimate->seed}};
        cells.push_back(std::move(j));
    }

    // Utility pipeline per scenario (instance order preserved).
    nlohmann::json utility = nlohmann::json::array();
    for (const auto& scenario : config.scenarios) {
        std::vector<double> excess;
        for (const auto& cell : bundle.suite.cells)
            if (cell.comparison.scenario_label == scenario.label)
                excess.push_back(cell.comparison.excess_equity);

        ScenarioUtility su;
        su.scenario = scenario.label;
        if (excess.size() < 3 || excess.size() != config.index_scheme.indices.size()) {
            su.diagnostic = "insufficient points";
        } else {
            bool duplicate = false;
            for (std::size_t i = 0; i < excess.size() && !duplicate; ++i)
                for (std::size_t j = i + 1; j < excess.size(); ++j)
                    if (std::fabs(excess[i] - excess[j]) <= 1e-12) {
                        duplicate = true;
                        break;
                    }
            if (duplicate) {
                // With an exact price source the excess equities coincide and
                // no curve exists; the paper's curves owe their spread to
                // Monte Carlo dispersion in the put price.
                su.diagnostic = "duplicate x";
            } else {
                PipelineFit f;
                f.points = assign_utility_indices(excess, config.index_scheme);
                f.fit = fit_quadratic(f.points);
                const auto [lo, hi] = std::minmax_element(excess.begin(), excess.end());
                f.analysis = analyze_utility(f.fit, Interval{*lo, *hi});
                su.fit = std::move(f);
            }
        }

        nlohmann::json entry{{"scenario", su.scenario}};
        if (su.fit)
            entry.update(detail::to_json(*su.fit));
        else
            entry["diagnostic"] = su.diagnostic;
        utility.push_back(std::move(entry));
        bundle.utilities.push_back(std::move(su));
    }

    nlohmann::json discrepancies = nlohmann::json::array();
    nlohmann::json consistency = nlohmann::json::array();
    if (config.price_source == "paper_fixed") {
        for (const auto& e : replicate_paper().entries)
            discrepancies.push_back({{"table", e.table},
                                     {"cell", e.cell},
                                     {"printed", detail::r6(e.printed)},
                                     {"recomputed", detail::r6(e.recomputed)},
                                     {"abs_diff", detail::r6(e.abs_diff)},
                                     {"verdict", e.match ? "match" : "mismatch"}});
        for (const auto& e : consistency_audit())
            consistency.push_back({{"table", e.table},
                                   {"scenario", e.scenario},
                                   {"instance", e.instance},
                                   {"printed_price", detail::r6(e.printed_price)},
                                   {"oracle_price", detail::r6(e.oracle_price)},
                                   {"abs_diff", detail::r6(e.abs_diff)},
                                   {"bound", detail::r6(e.bound)},
                                   {"consistent", e.consistent}});
    }

    bundle.json = nlohmann::json{{"schema", 1},
                                 {"dataset_version", paper_dataset().version},
                                 {"config", detail::config_echo(config)},
                                 {"market",
                                  {{"spot", detail::r6(config.market.spot)},
                                   {"strike", detail::r6(config.market.strike)},
                                   {"rate", detail::r6(config.market.rate)},
                                   {"horizon", detail::r6(config.market.horizon)}}},
                                 {"cells", cells},
                                 {"utility", utility},
                                 {"discrepancies", discrepancies},
                                 {"consistency", consistency}};
    return bundle;
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

/// Equity table CSV: header row, one row per move, trailing TOTAL row.
/// Currency columns use 2 fractional digits.
inline std::string equity_table_csv(const EquityTable& t) {
    std::string out = "move,probability,net_change,contribution\n";
    for (const auto& r : t.rows)
        out += std::string(to_string(r.move)) + "," + detail::fmt(r.probability, 6) + "," +
               detail::fmt(r.net_change, 2) + "," + detail::fmt(r.contribution, 2) + "\n";
    out += "TOTAL,,," + detail::fmt(t.total, 2) + "\n";
    return out;
}

inline std::string figure_csv(const FigureSeries& s) {
    std::string out = "x,u_fitted\n";
    for (const auto& [x, u] : s.fitted)
        out += detail::fmt(x, 6) + "," + detail::fmt(u, 6) + "\n";
    return out;
}

inline std::string points_csv(const FigureSeries& s) {
    std::string out = "x,u_observed\n";
    for (const auto& p : s.points) out += detail::fmt(p.x, 6) + "," + detail::fmt(p.u, 6) + "\n";
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace putlab
