#ifndef HLC_PIPELINE_HPP
#define HLC_PIPELINE_HPP

// Batch commands behind the hlc CLI. Each writes under the run directory
// named by the config hash and returns the text it would print. A command
// whose upstream artifact is absent recomputes it first.

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "hlc/backtest.hpp"
#include "hlc/config.hpp"
#include "hlc/csv.hpp"
#include "hlc/lti.hpp"
#include "hlc/regress.hpp"
#include "hlc/report.hpp"
#include "hlc/series.hpp"
#include "hlc/synthetic.hpp"

namespace hlc::pipeline {

namespace fs = std::filesystem;

inline constexpr const char* frame_file = "frame.csv";
inline constexpr const char* features_file = "features.csv";
inline constexpr const char* lagscan_file = "lagscan.csv";
inline constexpr const char* report_file = "report.json";
inline constexpr const char* plots_dir = "plots";

/// Units of the columns this pipeline writes, for reading frames back.
inline Unit unit_of_column(std::string_view name) {
    const backtest::Columns c;
    if (name == c.price || name == c.income || name == c.hlc || name == c.income + "_raw") return Unit::euros;
    if (name == c.rate || name == c.ltv || name == c.share || name == c.rate + "_raw") return Unit::fraction;
    if (name.starts_with(c.hlc + "_over_") || name.starts_with("d_" + c.hlc + "_over_")) return Unit::dimensionless;
    if (name.starts_with(c.hlc + "_lag") || name.starts_with("d_" + c.hlc) || name.starts_with("d_" + c.income) ||
        name.starts_with(c.income + "_lag") || name.starts_with("d_" + c.price)) {
        return Unit::euros;
    }
    if (name.starts_with("d_" + c.rate) || name.starts_with(c.rate + "_lag") || name.starts_with("d_" + c.ltv) ||
        name.starts_with(c.ltv + "_lag")) {
        return Unit::fraction;
    }
    return Unit::dimensionless;
}

inline fs::path prepare_run_dir(const config::RunConfig& cfg) {
    auto dir = config::run_dir(cfg);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create run directory '" + dir.string() + "': " + ec.message());
    return dir;
}

inline std::string frame_to_csv(const Frame& f) {
    std::ostringstream ss;
    csv::write_frame(ss, f);
    return ss.str();
}

inline Frame read_frame_file(const fs::path& path) {
    auto in = csv::open_in(path.string());
    return csv::read_frame(in, path.string(), unit_of_column);
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

/// Reads one configured series: quarterly file, yearly supplement, unit normalisation.
inline QuarterlySeries load_series(const config::RunConfig& cfg, const std::string& name,
                                   const config::SeriesSource& src) {
    const Unit unit = config::stored_unit(src.unit);
    std::optional<QuarterlySeries> quarterly;
    std::optional<QuarterlySeries> yearly;
    if (!src.path.empty()) {
        const auto path = cfg.resolve(src.path).string();
        auto in = csv::open_in(path);
        quarterly = csv::read_series(in, name, unit, path);
    }
    if (!src.yearly_path.empty()) {
        const auto path = cfg.resolve(src.yearly_path).string();
        auto in = csv::open_in(path);
        const auto values = csv::read_yearly(in, path);
        if (src.interpolate_yearly) {
            try {
                yearly = interpolate_yearly_to_quarterly(values, cfg.anchor_quarter, name, unit);
            } catch (const DataError& e) {
                throw DataError(path + ": " + e.what());
            }
        } else if (!values.empty()) {
            const QuarterIndex first(values.begin()->first, cfg.anchor_quarter);
            const QuarterIndex last(values.rbegin()->first, cfg.anchor_quarter);
            std::vector<Observation> v(static_cast<std::size_t>(last - first) + 1);
            for (const auto& [year, value] : values) {
                v[static_cast<std::size_t>(QuarterIndex(year, cfg.anchor_quarter) - first)] = value;
            }
            yearly = QuarterlySeries(name, unit, first, std::move(v));
        }
    }
    QuarterlySeries merged;
    if (quarterly && yearly) {
        const QuarterIndex lo = std::min(quarterly->start(), yearly->start());
        const QuarterIndex hi = std::max(quarterly->last(), yearly->last());
        std::vector<Observation> v(static_cast<std::size_t>(hi - lo) + 1);
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto q = lo + static_cast<long>(i);
            v[i] = quarterly->at(q) ? quarterly->at(q) : yearly->at(q);
        }
        merged = QuarterlySeries(name, unit, lo, std::move(v));
    } else {
        merged = quarterly ? *quarterly : *yearly;
    }

    const double factor = config::unit_factor(src.unit);
    if (factor == 1.0) return merged;
    std::vector<Observation> scaled(merged.values().begin(), merged.values().end());
    for (auto& v : scaled) {
        if (v) *v *= factor;
    }
    return QuarterlySeries(name, unit, merged.start(), std::move(scaled));
}

inline Frame ingest_frame(const config::RunConfig& cfg) {
    if (cfg.series.empty()) throw ConfigError("config lists no series");
    config::validate_paths(cfg);
    std::vector<QuarterlySeries> cols;
    for (const auto& [name, src] : cfg.series) cols.push_back(load_series(cfg, name, src));
    return align(cols);
}

inline std::string summary_table(const Frame& f) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-16s %5s %14s %14s %14s %14s %14s %14s\n", "Statistic", "N", "Mean", "St. Dev.",
                  "Min", "Pctl(25)", "Pctl(75)", "Max");
    out << line;
    for (const auto& c : f.columns()) {
        const auto s = summarize(c);
        std::snprintf(line, sizeof line, "%-16s %5zu %14.6g %14.6g %14.6g %14.6g %14.6g %14.6g\n", c.name().c_str(), s.n,
                      s.mean, s.sd, s.min, s.p25, s.p75, s.max);
        out << line;
    }
    return out.str();
}

inline std::string cmd_ingest(const config::RunConfig& cfg) {
    const Frame f = ingest_frame(cfg);
    const auto dir = prepare_run_dir(cfg);
    csv::write_file((dir / frame_file).string(), frame_to_csv(f));
    std::ostringstream out;
    out << "frame: " << f.rows() << " rows (" << f.start().to_string() << ".." << f.last().to_string() << "), "
        << f.columns().size() << " columns -> " << (dir / frame_file).string() << "\n\n";
    out << summary_table(f);
    return out.str();
}

// ---------------------------------------------------------------------------
// features, lagscan, backtest, report
// ---------------------------------------------------------------------------

inline Frame load_or_ingest(const config::RunConfig& cfg) {
    const auto path = config::run_dir(cfg) / frame_file;
    if (fs::exists(path)) return read_frame_file(path);
    cmd_ingest(cfg);
    return read_frame_file(path);
}

inline Frame compute_features(const config::RunConfig& cfg) {
    return backtest::build_features(load_or_ingest(cfg), cfg.lti, cfg.features, config::selected_specs(cfg));
}

inline std::string cmd_features(const config::RunConfig& cfg) {
    const Frame f = compute_features(cfg);
    const auto dir = prepare_run_dir(cfg);
    csv::write_file((dir / features_file).string(), frame_to_csv(f));
    std::ostringstream out;
    out << "features: " << f.rows() << " rows, " << f.columns().size() << " columns -> "
        << (dir / features_file).string() << '\n';
    return out.str();
}

inline Frame load_or_build_features(const config::RunConfig& cfg) {
    const auto path = config::run_dir(cfg) / features_file;
    if (!fs::exists(path)) cmd_features(cfg);
    return read_frame_file(path);
}

inline std::string cmd_lagscan(const config::RunConfig& cfg) {
    const Frame f = load_or_build_features(cfg);
    const auto& c = cfg.features.columns;
    const auto scan = regress::lag_scan(f.column(c.price), f.column(c.hlc), cfg.lags.lo, cfg.lags.hi);
    std::ostringstream table;
    table << "lag,r_squared,n_obs\n";
    std::ostringstream out;
    out << "R^2 of " << c.price << " on lagged " << c.hlc << '\n';
    for (const auto& e : scan.entries) {
        table << e.lag << ',' << (e.r_squared ? csv::format_number(*e.r_squared) : "") << ',' << e.n_obs << '\n';
        char line[128];
        if (e.r_squared) {
            std::snprintf(line, sizeof line, "  lag %2d  R^2 = %.6f  (n = %d)\n", e.lag, *e.r_squared, e.n_obs);
        } else {
            std::snprintf(line, sizeof line, "  lag %2d  unusable\n", e.lag);
        }
        out << line;
    }
    out << "best lag: " << (scan.best_lag ? std::to_string(*scan.best_lag) : "none") << '\n';
    const auto dir = prepare_run_dir(cfg);
    csv::write_file((dir / lagscan_file).string(), table.str());
    return out.str();
}

inline backtest::BacktestReport compute_backtest(const config::RunConfig& cfg) {
    const Frame f = load_or_build_features(cfg);
    backtest::GridOptions opts;
    opts.ecm_forecast = cfg.ecm_forecast;
    opts.columns = cfg.features.columns;
    return backtest::run_grid(f, config::selected_specs(cfg), cfg.split, opts);
}

inline std::string cmd_backtest(const config::RunConfig& cfg) {
    const auto rep = compute_backtest(cfg);
    const auto dir = prepare_run_dir(cfg);
    csv::write_file((dir / report_file).string(), report::dump(report::to_json(rep)));
    const auto files = report::emit_plot_data(rep, dir / plots_dir);
    std::ostringstream out;
    int failed = 0;
    for (const auto& v : rep.variants) {
        if (v.error) {
            ++failed;
            out << "variant " << v.spec.name << " (" << backtest::to_string(v.regime) << ") failed: " << *v.error << '\n';
        }
    }
    out << rep.variants.size() << " variants (" << failed << " failed) -> " << (dir / report_file).string() << ", "
        << files.size() << " plot files\n";
    return out.str();
}

inline std::string cmd_report(const fs::path& report_path) {
    report::json j;
    try {
        j = report::json::parse(csv::read_file(report_path.string()));
    } catch (const report::json::parse_error& e) {
        throw DataError(report_path.string() + ": " + e.what());
    }
    return report::render_tables(j);
}

inline std::string cmd_report(const config::RunConfig& cfg) {
    const auto path = config::run_dir(cfg) / report_file;
    if (!fs::exists(path)) cmd_backtest(cfg);
    return cmd_report(path);
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

/// Writes a synthetic dataset (one CSV per series), the generating truth, and
/// a ready-to-use config.json into `dir`.
inline std::string cmd_synth(const synthetic::ScenarioConfig& scenario, const fs::path& dir) {
    const auto s = synthetic::generate(scenario);
    const auto files = synthetic::write_series_csvs(s.frame, dir);

    config::RunConfig cfg;
    for (const auto& c : s.frame.columns()) {
        config::SeriesSource src;
        src.path = c.name() + ".csv";
        src.unit = c.unit() == Unit::euros      ? config::SourceUnit::euros
                   : c.unit() == Unit::fraction ? config::SourceUnit::fraction
                                                : config::SourceUnit::dimensionless;
        cfg.series.emplace_back(c.name(), src);
    }
    cfg.lti = scenario.params;
    cfg.features.smoothing_window = scenario.smoothing_window;
    cfg.output_dir = "runs";
    csv::write_file((dir / "config.json").string(), config::to_json(cfg).dump(2) + "\n");

    report::json truth = {{"seed", scenario.seed},
                          {"n_quarters", scenario.n_quarters},
                          {"noise_scale", scenario.noise_scale},
                          {"intercept", s.truth.intercept},
                          {"slope", s.truth.slope},
                          {"hlc_lag", s.truth.hlc_lag}};
    csv::write_file((dir / "truth.json").string(), truth.dump(2) + "\n");

    std::ostringstream out;
    out << "synthetic scenario (seed " << scenario.seed << ", " << scenario.n_quarters << " quarters): " << files.size()
        << " series -> " << dir.string() << '\n';
    return out.str();
}

}  // namespace hlc::pipeline

#endif  // HLC_PIPELINE_HPP
