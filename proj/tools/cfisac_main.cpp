// cfisac - downlink cell-free massive MIMO ISAC simulator with OTFS signaling.
//
// Subcommands map one-to-one onto the experiment drivers:
//   scenario    dump one random deployment as JSON
//   validate-se Monte Carlo validation of the closed-form SE (desk scale)
//   cdf         per-user SE samples, equal vs optimized, OTFS vs OFDM
//   tradeoff    max-min SE against the sensing SINR threshold
//   bandwidth   OTFS vs OFDM SE across subcarrier bandwidths
//   table4      CP-overhead table for the EVA/EVB delay profiles
//
// Exit codes: 0 success, 1 configuration error, 2 infeasible optimization.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <iostream>

#include "cfisac/experiments.hpp"
#include "cfisac/ofdm_baseline.hpp"

using namespace cfisac;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = -1;
    int realizations = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "config file (key = value lines or manifest JSON)");
    cmd->add_option("--out", args.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--seed", args.seed, "master seed override")->each([&](const std::string&) {
        args.seed_set = true;
    });
    cmd->add_option("--threads", args.threads, "worker threads (0 = all cores)");
    cmd->add_option("--realizations", args.realizations, "Monte Carlo realization override");
}

ExperimentConfig resolve(const CommonArgs& args) {
    ExperimentConfig cfg;
    if (!args.config_path.empty()) cfg = load_config(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;
    if (args.threads >= 0) cfg.threads = args.threads;
    if (args.realizations > 0) cfg.n_realizations = args.realizations;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cell-free massive MIMO ISAC simulator (OTFS downlink)"};
    app.require_subcommand(1);

    CommonArgs scenario_args, validate_args, cdf_args, tradeoff_args, bandwidth_args,
        table4_args;
    auto* cmd_scenario = app.add_subcommand("scenario", "dump one deployment as JSON");
    add_common(cmd_scenario, scenario_args);
    auto* cmd_validate = app.add_subcommand("validate-se", "Monte Carlo SE validation");
    add_common(cmd_validate, validate_args);
    auto* cmd_cdf = app.add_subcommand("cdf", "per-user SE distribution experiment");
    add_common(cmd_cdf, cdf_args);
    auto* cmd_tradeoff = app.add_subcommand("tradeoff", "SE vs sensing-SINR tradeoff sweep");
    add_common(cmd_tradeoff, tradeoff_args);
    auto* cmd_bandwidth = app.add_subcommand("bandwidth", "SE vs subcarrier bandwidth sweep");
    add_common(cmd_bandwidth, bandwidth_args);
    auto* cmd_table4 = app.add_subcommand("table4", "CP-overhead table (EVA/EVB)");
    add_common(cmd_table4, table4_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_scenario->parsed()) {
            const auto cfg = resolve(scenario_args);
            const auto sc = geo::place_scenario(deploy_config(cfg), cfg.seed);
            // scenario document carries positions, seed, and the config echo
            nlohmann::json doc = nlohmann::json::parse(sc.to_json());
            for (const auto& [k, v] : cfg.echo()) doc["config"][k] = v;
            sim::write_outputs(scenario_args.out_dir,
                               {{"scenario.json", doc.dump(2) + "\n"},
                                {"manifest.json", make_manifest(cfg, "scenario")}});
            std::cout << "wrote " << scenario_args.out_dir << "/scenario.json\n";
        } else if (cmd_validate->parsed()) {
            const auto cfg = resolve(validate_args);
            const auto res =
                sim::mc_validate_se(cfg, cfg.seed, cfg.n_realizations, cfg.threads);
            sim::write_outputs(validate_args.out_dir,
                               {{"validate_se.csv", res.to_csv()},
                                {"manifest.json", make_manifest(cfg, "validate-se")}});
            double worst = 0;
            for (const auto& u : res.users) worst = std::max(worst, u.rel_err);
            std::cout << "validate-se: " << res.users.size() << " users, "
                      << res.realizations << " realizations, worst |MC-CF|/CF = " << worst
                      << "\n";
        } else if (cmd_cdf->parsed()) {
            const auto cfg = resolve(cdf_args);
            const auto res = sim::run_cdf_experiment(cfg);
            sim::write_outputs(cdf_args.out_dir,
                               {{"cdf.csv", res.to_csv()},
                                {"convergence.jsonl", res.convergence_jsonl},
                                {"manifest.json", make_manifest(cfg, "cdf")}});
            std::cout << "95%-likely per-user SE (bit/s/Hz):\n";
            for (const auto& [name, val] : res.likely95)
                std::cout << "  " << name << " = " << val << "\n";
        } else if (cmd_tradeoff->parsed()) {
            const auto cfg = resolve(tradeoff_args);
            const auto res = sim::run_tradeoff_sweep(cfg, cfg.gamma_sweep_db);
            sim::write_outputs(tradeoff_args.out_dir,
                               {{"tradeoff.csv", res.to_csv()},
                                {"convergence.jsonl", res.convergence_jsonl},
                                {"manifest.json", make_manifest(cfg, "tradeoff")}});
            std::cout << res.to_csv();
        } else if (cmd_bandwidth->parsed()) {
            const auto cfg = resolve(bandwidth_args);
            std::vector<double> dfs;
            for (double khz : cfg.bandwidth_sweep_khz) dfs.push_back(khz * 1e3);
            const auto res = sim::run_bandwidth_sweep(cfg, dfs, cfg.pilot_len_sweep);
            sim::write_outputs(bandwidth_args.out_dir,
                               {{"bandwidth.csv", res.to_csv()},
                                {"manifest.json", make_manifest(cfg, "bandwidth")}});
            std::cout << res.to_csv();
        } else if (cmd_table4->parsed()) {
            const auto cfg = resolve(table4_args);
            std::vector<double> dfs;
            for (double khz : cfg.bandwidth_sweep_khz) dfs.push_back(khz * 1e3);
            const auto rows = ofdm::overhead_table(dfs, cfg.pilot_len_sweep, cfg.m_subcarriers,
                                                   cfg.n_symbols);
            const std::string csv = ofdm::overhead_table_csv(rows);
            sim::write_outputs(table4_args.out_dir,
                               {{"table4.csv", csv},
                                {"manifest.json", make_manifest(cfg, "table4")}});
            std::cout << csv;
        }
    } catch (const Infeasible& e) {
        std::cerr << "infeasible: " << e.what()
                  << " (max achievable sensing SINR = " << e.max_sensing_sinr << ")\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
