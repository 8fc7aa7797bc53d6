// putlab: protective-put portfolio insurance laboratory.
//
// Subcommands: price, suite, theorem, fit, ara, replicate, report.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "putlab/putlab.hpp"

namespace fs = std::filesystem;
using namespace putlab;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> reps;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
    unsigned workers = 1;
};

ExperimentConfig resolve_config(const GlobalOpts& g) {
    ExperimentConfig config = g.config_path.empty() ? default_config() : load_config(g.config_path);
    if (const char* env = std::getenv("PUTLAB_SEED")) {
        try {
            config.seed = std::stoull(env);
        } catch (const std::exception&) {
            throw ValidationError("PUTLAB_SEED must be an unsigned integer");
        }
    }
    if (g.seed) config.seed = *g.seed;  // explicit flag beats env and config
    if (g.reps) config.replications = *g.reps;
    if (g.out_dir) config.out_dir = *g.out_dir;
    if (g.format) config.format = *g.format;
    validate_config(config);
    return config;
}

const ScenarioSpec& find_scenario(const ExperimentConfig& config, const std::string& label) {
    for (const auto& s : config.scenarios)
        if (s.label == label) return s;
    throw ValidationError("unknown scenario '" + label + "'");
}

const MoveInstance& find_instance(const ExperimentConfig& config, int ordinal) {
    for (const auto& i : config.instances)
        if (i.ordinal == ordinal) return i;
    throw ValidationError("unknown instance " + std::to_string(ordinal));
}

void emit_scenario_figures(const ExperimentConfig& config, const std::string& label,
                           const PipelineFit& fit, double step) {
    fs::create_directories(config.out_dir);
    const auto series = figure_series(fit.fit, fit.points, step);
    write_text_file(config.out_dir + "/figure_" + label + ".csv", figure_csv(series));
    write_text_file(config.out_dir + "/points_" + label + ".csv", points_csv(series));
}

int cmd_price(const ExperimentConfig& config, const std::string& scenario_label, int ordinal,
              const std::string& source_name, unsigned workers) {
    const auto& scenario = find_scenario(config, scenario_label);
    const auto& instance = find_instance(config, ordinal);
    double price = 0.0;
    if (source_name == "analytic") {
        price = analytic_values(config.market, scenario, instance).put_price;
    } else if (source_name == "monte_carlo") {
        price = mc_estimate(config.market, scenario, instance, config.replications, config.seed,
                            workers)
                    .put_price_mean;
    } else if (source_name == "paper_fixed") {
        price = paper_dataset().a2(scenario_label, ordinal).put_price;
    } else {
        throw ValidationError("price: source must be analytic, monte_carlo or paper_fixed");
    }
    std::printf("%.4f\n", price);
    return 0;
}

int cmd_suite(const ExperimentConfig& config, unsigned workers) {
    const auto suite = run_suite(config.market, config.scenarios, config.instances,
                                 make_price_source(config), workers);
    std::printf("%-8s %-8s %12s %12s %12s %12s\n", "scenario", "instance", "put_price",
                "a1_total", "a2_total", "excess");
    for (const auto& cell : suite.cells)
        std::printf("%-8s %-8d %12.4f %12.4f %12.4f %12.4f\n",
                    cell.comparison.scenario_label.c_str(), cell.comparison.instance_ordinal,
                    cell.a2.put_price_used.value_or(0.0), cell.comparison.a1_total,
                    cell.comparison.a2_total, cell.comparison.excess_equity);
    if (config.format == "csv") {
        fs::create_directories(config.out_dir);
        for (const auto& cell : suite.cells) {
            const std::string stem = config.out_dir + "/cell_" +
                                     cell.comparison.scenario_label + "_" +
                                     std::to_string(cell.comparison.instance_ordinal);
            write_text_file(stem + "_a1.csv", equity_table_csv(cell.a1));
            write_text_file(stem + "_a2.csv", equity_table_csv(cell.a2));
        }
    }
    return 0;
}

int cmd_theorem(const ExperimentConfig& config, double move, double premium) {
    const ScenarioSpec* up = nullptr;
    const ScenarioSpec* neutral = nullptr;
    const ScenarioSpec* down = nullptr;
    for (const auto& s : config.scenarios) {
        if (s.p_up > s.p_down && !up) up = &s;
        else if (s.p_down > s.p_up && !down) down = &s;
        else if (s.p_up == s.p_down && !neutral) neutral = &s;
    }
    if (!up || !neutral || !down)
        throw ValidationError(
            "theorem: config must provide an up-biased, a neutral and a down-biased scenario");

    PositionSpec position{OptionKind::call, premium, move};
    validate_position(position);
    const auto r = verify_preference_ordering(config.market, position, *up, *neutral, *down);
    std::printf("pre-floor expectations (call): D %.4f  N %.4f  U %.4f\n", r.call_down,
                r.call_neutral, r.call_up);
    std::printf("pre-floor expectations (put):  U %.4f  N %.4f  D %.4f\n", r.put_up,
                r.put_neutral, r.put_down);
    std::printf("calls strictly ordered (D<N<U): %s\n", r.calls_strictly_ordered ? "yes" : "no");
    std::printf("puts strictly ordered (U<N<D):  %s\n", r.puts_strictly_ordered ? "yes" : "no");
    std::printf("floored weak ordering: calls %s, puts %s\n",
                r.calls_floored_weakly_ordered ? "yes" : "no",
                r.puts_floored_weakly_ordered ? "yes" : "no");
    if (r.negative_put_premium)
        std::printf("warning: derived put premium is negative for these parameters\n");
    return 0;
}

void print_fit(const std::string& heading, const PipelineFit& fit) {
    std::printf("%s\n", heading.c_str());
    std::printf("  u(x) = %.4f x^2 + %.4f x + %.4f\n", fit.fit.a2, fit.fit.a1, fit.fit.a0);
    std::printf("  curvature: %s", to_string(fit.analysis.curvature));
    if (fit.analysis.vertex_x) std::printf(", vertex x = %.5f", *fit.analysis.vertex_x);
    if (fit.analysis.bliss_point) std::printf(", bliss point = %.5f", *fit.analysis.bliss_point);
    std::printf("\n");
}

int cmd_fit(const ExperimentConfig& config, const std::string& scenario_label, bool printed,
            double step, bool emit, unsigned workers) {
    if (printed) {
        for (const auto& f : paper_scenario_fits(config.index_scheme)) {
            if (f.scenario != scenario_label) continue;
            print_fit("as-printed (" + scenario_label + ")", f.as_printed);
            print_fit("recomputed (" + scenario_label + ")", f.recomputed);
            if (emit) emit_scenario_figures(config, scenario_label, f.as_printed, step);
            return 0;
        }
        throw ValidationError("fit: scenario '" + scenario_label + "' is not in the paper dataset");
    }
    const auto bundle = run_report(config, workers);
    for (const auto& su : bundle.utilities) {
        if (su.scenario != scenario_label) continue;
        if (!su.fit) {
            std::printf("no fit for scenario %s: %s\n", scenario_label.c_str(),
                        su.diagnostic.c_str());
            return 0;
        }
        print_fit("scenario " + scenario_label + " (" + config.price_source + ")", *su.fit);
        if (emit) emit_scenario_figures(config, scenario_label, *su.fit, step);
        return 0;
    }
    throw ValidationError("fit: unknown scenario '" + scenario_label + "'");
}

int cmd_ara(const std::string& scenario_label, std::optional<double> a2,
            std::optional<double> a1, std::optional<double> a0, double x) {
    QuadraticUtility q;
    if (!scenario_label.empty()) {
        bool found = false;
        for (const auto& c : paper_dataset().cases)
            if (c.scenario == scenario_label) {
                q = c.fit;
                found = true;
            }
        if (!found)
            throw ValidationError("ara: no fitted case for scenario '" + scenario_label + "'");
    } else if (a2 && a1 && a0) {
        q = QuadraticUtility{*a2, *a1, *a0};
    } else {
        throw ValidationError("ara: give either --scenario or all of --a2/--a1/--a0");
    }
    std::printf("%.6f\n", ara(q, x));
    return 0;
}

int cmd_replicate(const ExperimentConfig& config, double tolerance, bool strict) {
    const auto report = replicate_paper(tolerance);
    std::size_t failures = 0;
    for (const auto& e : report.entries) {
        if (!e.match) ++failures;
        std::printf("%-8s table %-2d %-24s printed %10.4f recomputed %10.4f diff %8.4f\n",
                    e.match ? "match" : "MISMATCH", e.table, e.cell.c_str(), e.printed,
                    e.recomputed, e.abs_diff);
    }
    for (const auto& e : consistency_audit()) {
        if (!e.consistent) ++failures;
        std::printf("%-8s table %-2d simulated put %s/%d   printed %7.4f oracle %7.4f "
                    "diff %6.4f <= bound %6.4f\n",
                    e.consistent ? "match" : "MISMATCH", e.table, e.scenario.c_str(), e.instance,
                    e.printed_price, e.oracle_price, e.abs_diff, e.bound);
    }
    for (const auto& f : paper_scenario_fits(config.index_scheme)) {
        print_fit("as-printed fit, scenario " + f.scenario, f.as_printed);
        print_fit("recomputed fit, scenario " + f.scenario, f.recomputed);
    }
    std::printf("%zu of %zu checks failed (tolerance %.4f)\n", failures,
                report.entries.size() + consistency_audit().size(), tolerance);
    return strict && failures > 0 ? 3 : 0;
}

int cmd_report(const ExperimentConfig& config, unsigned workers) {
    const auto bundle = run_report(config, workers);
    fs::create_directories(config.out_dir);
    const std::string path = config.out_dir + "/report.json";
    write_text_file(path, bundle.json.dump(2) + "\n");
    if (config.format == "csv") {
        for (const auto& cell : bundle.suite.cells) {
            const std::string stem = config.out_dir + "/cell_" +
                                     cell.comparison.scenario_label + "_" +
                                     std::to_string(cell.comparison.instance_ordinal);
            write_text_file(stem + "_a1.csv", equity_table_csv(cell.a1));
            write_text_file(stem + "_a2.csv", equity_table_csv(cell.a2));
        }
        for (const auto& su : bundle.utilities)
            if (su.fit) emit_scenario_figures(config, su.scenario, *su.fit, 0.01);
    }
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"protective-put portfolio insurance laboratory"};
    app.require_subcommand(1);
    app.fallthrough();  // allow global options after the subcommand name

    GlobalOpts g;
    app.add_option("--config", g.config_path, "TOML config file (defaults embedded)");
    auto* seed_opt = app.add_option("--seed", "RNG seed (overrides config and PUTLAB_SEED)");
    auto* reps_opt = app.add_option("--reps", "Monte Carlo replications");
    auto* out_opt = app.add_option("--out", "output directory");
    auto* format_opt = app.add_option("--format", "output format: json|csv");
    app.add_option("--workers", g.workers, "parallel workers for Monte Carlo");

    auto* price = app.add_subcommand("price", "value the put for one cell");
    std::string price_scenario = "D", price_source = "analytic";
    int price_instance = 1;
    price->add_option("--scenario", price_scenario, "scenario label");
    price->add_option("--instance", price_instance, "instance ordinal (1-based)");
    price->add_option("--source", price_source, "analytic|monte_carlo|paper_fixed");

    auto* suite = app.add_subcommand("suite", "run the full scenario x instance suite");

    auto* theorem = app.add_subcommand("theorem", "check the preference-ordering theorem");
    double theorem_move = 5.0, theorem_premium = 1.0;
    theorem->add_option("--move", theorem_move, "symmetric move magnitude");
    theorem->add_option("--premium", theorem_premium, "call premium C");

    auto* fit = app.add_subcommand("fit", "fit the utility curve for one scenario");
    std::string fit_scenario = "D";
    bool fit_printed = false, fit_emit = false;
    double fit_step = 0.01;
    fit->add_option("--scenario", fit_scenario, "scenario label");
    fit->add_flag("--printed", fit_printed, "fit the paper's printed points");
    fit->add_flag("--emit", fit_emit, "write figure/points CSVs to the output directory");
    fit->add_option("--step", fit_step, "figure sampling step");

    auto* ara_cmd = app.add_subcommand("ara", "Arrow-Pratt absolute risk aversion at x");
    std::string ara_scenario;
    double ara_x = 0.0;
    std::optional<double> ara_a2, ara_a1, ara_a0;
    ara_cmd->add_option("--scenario", ara_scenario, "use the paper's fitted case coefficients");
    ara_cmd->add_option("--x", ara_x, "evaluation point")->required();
    ara_cmd->add_option("--a2", ara_a2, "x^2 coefficient");
    ara_cmd->add_option("--a1", ara_a1, "x coefficient");
    ara_cmd->add_option("--a0", ara_a0, "constant coefficient");

    auto* replicate = app.add_subcommand("replicate", "audit the printed tables and fits");
    double replicate_tolerance = 0.01;
    bool strict = false;
    replicate->add_option("--tolerance", replicate_tolerance, "match tolerance (currency)");
    replicate->add_flag("--strict", strict, "exit 3 when any cell mismatches");

    auto* report = app.add_subcommand("report", "write the full machine-readable report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (seed_opt->count()) g.seed = seed_opt->as<std::uint64_t>();
        if (reps_opt->count()) g.reps = reps_opt->as<std::uint64_t>();
        if (out_opt->count()) g.out_dir = out_opt->as<std::string>();
        if (format_opt->count()) g.format = format_opt->as<std::string>();
        const ExperimentConfig config = resolve_config(g);

        if (price->parsed())
            return cmd_price(config, price_scenario, price_instance, price_source, g.workers);
        if (suite->parsed()) return cmd_suite(config, g.workers);
        if (theorem->parsed()) return cmd_theorem(config, theorem_move, theorem_premium);
        if (fit->parsed())
            return cmd_fit(config, fit_scenario, fit_printed, fit_step, fit_emit, g.workers);
        if (ara_cmd->parsed()) return cmd_ara(ara_scenario, ara_a2, ara_a1, ara_a0, ara_x);
        if (replicate->parsed()) return cmd_replicate(config, replicate_tolerance, strict);
        if (report->parsed()) return cmd_report(config, g.workers);
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
