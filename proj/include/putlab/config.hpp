#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "putlab/errors.hpp"
#include "putlab/market.hpp"
#include "putlab/paper_data.hpp"
#include "putlab/strategy.hpp"
#include "putlab/toml_lite.hpp"
#include "putlab/utility.hpp"

namespace putlab {

/// Full experiment configuration. Defaults encode the hypothetical data the
/// embedded dataset is built from.
struct ExperimentConfig {
    MarketParams market;
    std::vector<ScenarioSpec> scenarios;
    std::vector<MoveInstance> instances;
    std::string price_source = "paper_fixed";  // analytic | monte_carlo | paper_fixed
    UtilityIndexScheme index_scheme;
    std::uint64_t replications = 100;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::string format = "json";  // json | csv (csv additionally emits tables)

    bool operator==(const ExperimentConfig&) const = default;
};

inline bool operator==(const MarketParams& a, const MarketParams& b) {
    return a.spot == b.spot && a.strike == b.strike && a.rate == b.rate && a.horizon == b.horizon;
}
inline bool operator==(const ScenarioSpec& a, const ScenarioSpec& b) {
    return a.label == b.label && a.p_up == b.p_up && a.p_neutral == b.p_neutral &&
           a.p_down == b.p_down;
}
inline bool operator==(const MoveInstance& a, const MoveInstance& b) {
    return a.up_move == b.up_move && a.down_move == b.down_move && a.ordinal == b.ordinal;
}
inline bool operator==(const UtilityIndexScheme& a, const UtilityIndexScheme& b) {
    return a.indices == b.indices;
}

inline ExperimentConfig default_config() {
    const auto& d = paper_dataset();
    ExperimentConfig c;
    c.market = d.market;
    c.scenarios = d.scenarios;
    c.instances = d.instances;
    return c;
}

inline void validate_config(const ExperimentConfig& config) {
    validate_market(config.market);
    if (config.scenarios.empty())
        throw ValidationError("config: at least one scenario is required");
    if (config.instances.empty())
        throw ValidationError("config: at least one instance is required");
    for (const auto& s : config.scenarios) validate_scenario(s);
    for (const auto& i : config.instances) validate_instance(i, config.market);
    validate_scheme(config.index_scheme);
    if (config.index_scheme.indices.size() != config.instances.size())
        throw ValidationError("config: index scheme length must equal instance count");
    if (config.replications < 1)
        throw ValidationError("config: replications must be >= 1");
    if (config.price_source != "analytic" && config.price_source != "monte_carlo" &&
        config.price_source != "paper_fixed")
        throw ValidationError("config: pricing source must be analytic, monte_carlo or paper_fixed");
    if (config.format != "json" && config.format != "csv")
        throw ValidationError("config: format must be json or csv");
}

namespace detail {

inline double require_number(const toml::Table& t, const std::string& key,
                             const std::string& where) {
    const auto it = t.values.find(key);
    if (it == t.values.end())
        throw ValidationError("config: missing field '" + key + "' in " + where);
    if (!it->second.is_number())
        throw ValidationError("config: field '" + key + "' in " + where + " must be a number");
    return it->second.number();
}

inline double number_or(const toml::Table& t, const std::string& key, double fallback) {
    const auto it = t.values.find(key);
    if (it == t.values.end()) return fallback;
    if (!it->second.is_number())
        throw ValidationError("config: field '" + key + "' must be a number");
    return it->second.number();
}

}  // namespace detail

/// Parses a TOML config text. Omitted sections fall back to the defaults.
inline ExperimentConfig parse_config(const std::string& text) {
    const toml::Table root = toml::parse(text);
    ExperimentConfig c = default_config();

    if (const auto it = root.tables.find("market"); it != root.tables.end()) {
        const auto& m = it->second;
        c.market.spot = detail::number_or(m, "spot", c.market.spot);
        c.market.strike = detail::number_or(m, "strike", c.market.strike);
        c.market.rate = detail::number_or(m, "rate", c.market.rate);
        c.market.horizon = detail::number_or(m, "horizon", c.market.horizon);
    }
    if (const auto it = root.table_arrays.find("scenario"); it != root.table_arrays.end()) {
        c.scenarios.clear();
        for (const auto& t : it->second) {
            ScenarioSpec s;
            const auto name = t.values.find("name");
            if (name == t.values.end() || !name->second.is_string())
                throw ValidationError("config: every [[scenario]] needs a string 'name'");
            s.label = name->second.string();
            s.p_up = detail::require_number(t, "p_up", "scenario " + s.label);
            s.p_neutral = detail::require_number(t, "p_neutral", "scenario " + s.label);
            s.p_down = detail::require_number(t, "p_down", "scenario " + s.label);
            c.scenarios.push_back(s);
        }
    }
    if (const auto it = root.table_arrays.find("instance"); it != root.table_arrays.end()) {
        c.instances.clear();
        int ordinal = 1;
        for (const auto& t : it->second) {
            MoveInstance i;
            i.up_move = detail::require_number(t, "up_move", "instance");
            i.down_move = detail::require_number(t, "down_move", "instance");
            i.ordinal = ordinal++;
            c.instances.push_back(i);
        }
        // a custom instance list needs a matching scheme; keep the default
        // only when it still fits
        if (c.instances.size() != c.index_scheme.indices.size() &&
            root.tables.find("utility") == root.tables.end())
            throw ValidationError(
                "config: [utility] indices must be given when the instance count is not " +
                std::to_string(c.index_scheme.indices.size()));
    }
    if (const auto it = root.tables.find("simulation"); it != root.tables.end()) {
        c.replications =
            static_cast<std::uint64_t>(detail::number_or(it->second, "replications",
                                                         static_cast<double>(c.replications)));
        c.seed = static_cast<std::uint64_t>(
            detail::number_or(it->second, "seed", static_cast<double>(c.seed)));
    }
    if (const auto it = root.tables.find("utility"); it != root.tables.end()) {
        const auto idx = it->second.values.find("indices");
        if (idx != it->second.values.end()) {
            if (!idx->second.is_array())
                throw ValidationError("config: utility indices must be an array");
            c.index_scheme.indices.clear();
            for (const auto& v : idx->second.array()) {
                if (!v.is_number())
                    throw ValidationError("config: utility indices must be numbers");
                c.index_scheme.indices.push_back(v.number());
            }
        }
    }
    if (const auto it = root.tables.find("pricing"); it != root.tables.end()) {
        const auto src = it->second.values.find("source");
        if (src != it->second.values.end()) {
            if (!src->second.is_string())
                throw ValidationError("config: pricing source must be a string");
            c.price_source = src->second.string();
        }
    }
    if (const auto it = root.tables.find("output"); it != root.tables.end()) {
        const auto dir = it->second.values.find("dir");
        if (dir != it->second.values.end() && dir->second.is_string())
            c.out_dir = dir->second.string();
        const auto fmt = it->second.values.find("format");
        if (fmt != it->second.values.end() && fmt->second.is_string())
            c.format = fmt->second.string();
    }

    validate_config(c);
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

/// Serializes a config back to TOML; parse_config(write_config(c)) == c.
inline std::string write_config(const ExperimentConfig& config) {
    std::ostringstream out;
    out.precision(17);
    out << "[market]\n"
        << "spot = " << config.market.spot << "\n"
        << "strike = " << config.market.strike << "\n"
        << "rate = " << config.market.rate << "\n"
        << "horizon = " << config.market.horizon << "\n";
    for (const auto& s : config.scenarios)
        out << "\n[[scenario]]\n"
            << "name = \"" << s.label << "\"\n"
            << "p_up = " << s.p_up << "\n"
            << "p_neutral = " << s.p_neutral << "\n"
            << "p_down = " << s.p_down << "\n";
    for (const auto& i : config.instances)
        out << "\n[[instance]]\n"
            << "up_move = " << i.up_move << "\n"
            << "down_move = " << i.down_move << "\n";
    out << "\n[simulation]\n"
        << "replications = " << config.replications << "\n"
        << "seed = " << config.seed << "\n";
    out << "\n[utility]\nindices = [";
    for (std::size_t k = 0; k < config.index_scheme.indices.size(); ++k)
        out << (k ? ", " : "") << config.index_scheme.indices[k];
    out << "]\n";
    out << "\n[pricing]\nsource = \"" << config.price_source << "\"\n";
    out << "\n[output]\ndir = \"" << config.out_dir << "\"\nformat = \"" << config.format
        << "\"\n";
    return out.str();
}

/// Builds the price source a config asks for.
inline PriceSource make_price_source(const ExperimentConfig& config) {
    if (config.price_source == "analytic") return PriceSource::analytic();
    if (config.price_source == "monte_carlo")
        return PriceSource::monte_carlo(config.replications, config.seed);
    return PriceSource::paper_fixed();
}

}  // namespace putlab
