#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "putlab/errors.hpp"
#include "putlab/market.hpp"
#include "putlab/paper_dataset_json.hpp"
#include "putlab/utility.hpp"

namespace putlab {

/// Printed total of a long-underlying (A1) expected-equity table.
struct PaperA1Cell {
    int table = 0;
    std::string scenario;
    int instance = 0;
    double total = 0.0;
};

/// Printed simulation summary (put price/variance, asset value/variance).
struct PaperSimCell {
    int table = 0;
    std::string scenario;
    int instance = 0;
    double put_price = 0.0;
    double put_variance = 0.0;
    double asset_value = 0.0;
    double asset_variance = 0.0;
};

/// Printed protective-put (A2) table: per-move nets, contributions, total,
/// excess equity and the assigned utility index.
struct PaperA2Cell {
    int table = 0;
    std::string scenario;
    int instance = 0;
    double put_price = 0.0;
    double up_net = 0.0, neutral_net = 0.0, down_net = 0.0;
    double up_contribution = 0.0, neutral_contribution = 0.0, down_contribution = 0.0;
    double total = 0.0;
    double excess = 0.0;
    double utility_index = 0.0;
};

/// Printed fitted-utility case: coefficients, stationary boundary, curvature.
struct PaperCase {
    std::string case_label;
    std::string scenario;
    QuadraticUtility fit;
    double boundary = 0.0;
    std::string curvature;
};

struct PaperDataset {
    int version = 0;
    MarketParams market;
    std::vector<ScenarioSpec> scenarios;
    std::vector<MoveInstance> instances;
    std::vector<PaperA1Cell> a1_cells;
    std::vector<PaperSimCell> sim_cells;
    std::vector<PaperA2Cell> a2_cells;
    std::vector<PaperCase> cases;

    const ScenarioSpec& scenario(const std::string& label) const {
        for (const auto& s : scenarios)
            if (s.label == label) return s;
        throw IoError("paper dataset: unknown scenario " + label);
    }
    const MoveInstance& instance(int ordinal) const {
        for (const auto& i : instances)
            if (i.ordinal == ordinal) return i;
        throw IoError("paper dataset: unknown instance " + std::to_string(ordinal));
    }
    const PaperA2Cell& a2(const std::string& scenario_label, int ordinal) const {
        for (const auto& c : a2_cells)
            if (c.scenario == scenario_label && c.instance == ordinal) return c;
        throw IoError("paper dataset: no A2 table for " + scenario_label + "/" +
                      std::to_string(ordinal));
    }
};

/// Raw text of the embedded dataset resource.
inline const char* paper_dataset_json() { return detail::kPaperDatasetJson; }

inline PaperDataset parse_paper_dataset(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError(std::string("paper dataset: malformed JSON: ") + e.what());
    }
    try {
        PaperDataset d;
        d.version = j.at("dataset_version").get<int>();
        const auto& m = j.at("market");
        d.market = MarketParams{m.at("spot"), m.at("strike"), m.at("rate"), m.at("horizon")};
        for (const auto& s : j.at("scenarios"))
            d.scenarios.push_back(
                ScenarioSpec{s.at("label"), s.at("p_up"), s.at("p_neutral"), s.at("p_down")});
        for (const auto& i : j.at("instances"))
            d.instances.push_back(MoveInstance{i.at("up_move"), i.at("down_move"), i.at("ordinal")});
        for (const auto& c : j.at("a1_tables"))
            d.a1_cells.push_back(
                PaperA1Cell{c.at("table"), c.at("scenario"), c.at("instance"), c.at("total")});
        for (const auto& c : j.at("simulations"))
            d.sim_cells.push_back(PaperSimCell{c.at("table"), c.at("scenario"), c.at("instance"),
                                               c.at("put_price"), c.at("put_variance"),
                                               c.at("asset_value"), c.at("asset_variance")});
        for (const auto& c : j.at("a2_tables"))
            d.a2_cells.push_back(PaperA2Cell{
                c.at("table"), c.at("scenario"), c.at("instance"), c.at("put_price"),
                c.at("up_net"), c.at("neutral_net"), c.at("down_net"), c.at("up_contribution"),
                c.at("neutral_contribution"), c.at("down_contribution"), c.at("total"),
                c.at("excess"), c.at("utility_index")});
        for (const auto& c : j.at("cases"))
            d.cases.push_back(PaperCase{c.at("case"), c.at("scenario"),
                                        QuadraticUtility{c.at("a2"), c.at("a1"), c.at("a0")},
                                        c.at("boundary"), c.at("curvature")});
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("paper dataset: missing or mistyped field: ") + e.what());
    }
}

/// The embedded dataset, parsed once.
inline const PaperDataset& paper_dataset() {
    static const PaperDataset dataset = parse_paper_dataset(paper_dataset_json());
    return dataset;
}

}  // namespace putlab
