// hlc: batch front end for the household-lending-capacity pipeline.
//
//   hlc synth    --seed 7 --out data/          synthetic dataset + config.json
//   hlc ingest   --config data/config.json     aligned frame + summary statistics
//   hlc features --config ...                  smoothed inputs, HLC, lagged columns
//   hlc lagscan  --config ... [--lags 0..8]    R^2 of price on lagged HLC
//   hlc backtest --config ... [--cutoff 2008Q2]
//   hlc report   --config ...  | report path/to/report.json
//
// Exit codes: 0 ok, 1 unexpected, 2 configuration, 3 data, 4 numerical.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hlc/pipeline.hpp"

namespace {

enum ExitCode : int { ok = 0, unexpected = 1, config_error = 2, data_error = 3, numerical_error = 4 };

int exit_code(const hlc::Error& e) {
    switch (e.category()) {
        case hlc::Error::Category::config: return config_error;
        case hlc::Error::Category::data: return data_error;
        case hlc::Error::Category::numerical: return numerical_error;
    }
    return unexpected;
}

struct GlobalFlags {
    std::string config;
    std::string out;
    std::string cutoff;
    std::string lags;
};

hlc::config::RunConfig effective_config(const GlobalFlags& g) {
    if (g.config.empty()) throw hlc::ConfigError("--config is required");
    auto cfg = hlc::config::load(g.config);
    if (!g.out.empty()) {
        // --out is taken relative to the working directory, not the config file
        cfg.output_dir = std::filesystem::absolute(g.out).string();
    }
    if (!g.cutoff.empty()) {
        try {
            cfg.split.cutoff = hlc::parse_quarter(g.cutoff);
        } catch (const hlc::Error& e) {
            throw hlc::ConfigError(std::string("--cutoff: ") + e.what());
        }
    }
    if (!g.lags.empty()) cfg.lags = hlc::config::parse_lag_range(g.lags);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Household lending capacity: features, lag scan, OLS/ECM backtests"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    app.add_option("--config", g.config, "Run configuration (JSON)");
    app.add_option("--out", g.out, "Output directory (synth: dataset directory)");
    app.add_option("--cutoff", g.cutoff, "Last quarter of the truncated training sample, YYYYQn");
    app.add_option("--lags", g.lags, "Lag range for the scan, a..b");

    std::uint64_t seed = 1;
    int quarters = 92;
    double noise = 0.01;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth->add_option("--seed", seed, "Random seed");
    synth->add_option("--quarters", quarters, "Number of quarters")->check(CLI::Range(40, 10000));
    synth->add_option("--noise", noise, "Relative price noise half-width");

    auto* ingest = app.add_subcommand("ingest", "Read series CSVs into an aligned frame");
    auto* features = app.add_subcommand("features", "Build the feature frame");
    auto* lagscan = app.add_subcommand("lagscan", "R^2 of price on lagged HLC");
    auto* backtest = app.add_subcommand("backtest", "Fit and score the model grid");
    auto* report = app.add_subcommand("report", "Render RMSE/MAE tables");
    std::string report_path;
    report->add_option("report", report_path, "report.json (default: the run directory's)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : config_error;
    }

    try {
        if (synth->parsed()) {
            hlc::synthetic::ScenarioConfig sc;
            sc.seed = seed;
            sc.n_quarters = quarters;
            sc.noise_scale = noise;
            std::cout << hlc::pipeline::cmd_synth(sc, g.out.empty() ? "." : g.out);
        } else if (ingest->parsed()) {
            std::cout << hlc::pipeline::cmd_ingest(effective_config(g));
        } else if (features->parsed()) {
            std::cout << hlc::pipeline::cmd_features(effective_config(g));
        } else if (lagscan->parsed()) {
            std::cout << hlc::pipeline::cmd_lagscan(effective_config(g));
        } else if (backtest->parsed()) {
            std::cout << hlc::pipeline::cmd_backtest(effective_config(g));
        } else if (report->parsed()) {
            if (!report_path.empty()) {
                std::cout << hlc::pipeline::cmd_report(std::filesystem::path(report_path));
            } else {
                std::cout << hlc::pipeline::cmd_report(effective_config(g));
            }
        }
    } catch (const hlc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return unexpected;
    }
    return ok;
}
