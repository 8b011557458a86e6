#ifndef HLC_REPORT_HPP
#define HLC_REPORT_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "hlc/backtest.hpp"
#include "hlc/csv.hpp"
#include "hlc/regress.hpp"

namespace hlc::report {

using json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

namespace detail {

/// NaN and infinities become null.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace detail

/// Regression summary: coefficient name -> {estimate, stderr}, plus fit statistics.
inline json to_json(const regress::FitResult& f) {
    json coefs = json::object();
    for (const auto& c : f.coefficients) {
        coefs[c.name] = {{"estimate", detail::number(c.estimate)}, {"stderr", detail::number(c.std_error)}};
    }
    json out = {
        {"response", f.response_name},
        {"coefficients", coefs},
        {"r2", detail::number(f.r_squared)},
        {"adj_r2", detail::number(f.adj_r_squared)},
        {"resid_se", detail::number(f.residual_stderr)},
        {"f_stat", detail::number(f.f_statistic)},
        {"n", f.n_obs},
    };
    if (!f.warnings.empty()) out["warnings"] = f.warnings;
    return out;
}

inline json to_json(const regress::EcmFit& e) {
    json out = to_json(e.underlying);
    out["gamma"] = detail::number(e.gamma);
    json alphas = json::object();
    for (const auto& a : e.long_run) alphas[a.name] = detail::number(a.value);
    out["long_run"] = alphas;
    return out;
}

inline json to_json(const backtest::Metrics& m) {
    return {{"rmse", detail::number(m.rmse)}, {"mae", detail::number(m.mae)}, {"n", m.n_evaluated}};
}

inline json to_json(const backtest::BacktestReport& r) {
    json variants = json::array();
    for (const auto& v : r.variants) {
        json item = {
            {"name", v.spec.name},
            {"group", v.spec.group.empty() ? v.spec.name : v.spec.group},
            {"approach", backtest::to_string(v.spec.approach)},
            {"regime", backtest::to_string(v.regime)},
            {"metrics_all", v.metrics_all ? to_json(*v.metrics_all) : json(nullptr)},
            {"metrics_holdout", v.metrics_holdout ? to_json(*v.metrics_holdout) : json(nullptr)},
        };
        if (v.ols) {
            item["coefficients"] = to_json(*v.ols)["coefficients"];
            item["fit"] = to_json(*v.ols);
            item["fit"].erase("coefficients");
        } else if (v.ecm) {
            item["coefficients"] = to_json(*v.ecm)["coefficients"];
            item["fit"] = to_json(*v.ecm);
            item["fit"].erase("coefficients");
        } else {
            item["coefficients"] = json::object();
        }
        if (v.error) item["error"] = *v.error;
        variants.push_back(std::move(item));
    }
    return {
        {"schema_version", schema_version},
        {"unit", "euros"},
        {"cutoff", r.split.cutoff.to_string()},
        {"ecm_forecast", r.ecm_forecast == regress::ForecastMode::dynamic ? "dynamic" : "static"},
        {"groups", r.groups},
        {"variants", variants},
    };
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Plot-ready CSVs
// ---------------------------------------------------------------------------

inline std::string variant_file_stem(const backtest::VariantResult& v) {
    return v.spec.name + "_" + backtest::to_string(v.regime);
}

namespace detail {

inline std::string metric_cell(const std::optional<backtest::Metrics>& m, double backtest::Metrics::*field) {
    return m ? csv::format_number((*m).*field) : std::string();
}

/// Variants of one group in table order: OLS full, OLS truncated, ECM full, ECM truncated.
inline std::vector<const backtest::VariantResult*> table_rows(const backtest::BacktestReport& r, const std::string& group) {
    std::vector<const backtest::VariantResult*> rows;
    for (auto approach : {backtest::Approach::ols, backtest::Approach::ecm}) {
        for (auto regime : {backtest::Regime::full, backtest::Regime::truncated}) {
            for (const auto& v : r.variants) {
                const auto g = v.spec.group.empty() ? v.spec.name : v.spec.group;
                if (g == group && v.spec.approach == approach && v.regime == regime) rows.push_back(&v);
            }
        }
    }
    return rows;
}

}  // namespace detail

/// One CSV per variant (quarter, observed, fitted_or_forecast, regime) and a
/// summary.csv with every variant's metrics in euros. Returns the files written.
inline std::vector<std::filesystem::path> emit_plot_data(const backtest::BacktestReport& r,
                                                         const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create directory '" + dir.string() + "': " + ec.message());

    std::vector<std::filesystem::path> written;
    for (const auto& v : r.variants) {
        std::ostringstream out;
        out << "quarter,observed,fitted_or_forecast,regime\n";
        if (!v.observed.empty()) {
            QuarterIndex lo = v.observed.start();
            QuarterIndex hi = v.observed.last();
            if (!v.predicted.empty()) {
                lo = std::min(lo, v.predicted.start());
                hi = std::max(hi, v.predicted.last());
            }
            for (QuarterIndex q = lo; q <= hi; q = q.next()) {
                out << q.to_string() << ',' << csv::format_cell(v.observed.at(q)) << ','
                    << csv::format_cell(v.predicted.at(q)) << ',' << backtest::to_string(v.regime) << '\n';
            }
        }
        auto path = dir / (variant_file_stem(v) + ".csv");
        csv::write_file(path.string(), out.str());
        written.push_back(path);
    }

    std::ostringstream sum;
    sum << "group,name,approach,regime,rmse_all_eur,mae_all_eur,n_all,rmse_holdout_eur,mae_holdout_eur,n_holdout\n";
    for (const auto& g : r.groups) {
        for (const auto* v : detail::table_rows(r, g)) {
            sum << g << ',' << v->spec.name << ',' << backtest::to_string(v->spec.approach) << ','
                << backtest::to_string(v->regime) << ',' << detail::metric_cell(v->metrics_all, &backtest::Metrics::rmse)
                << ',' << detail::metric_cell(v->metrics_all, &backtest::Metrics::mae) << ','
                << (v->metrics_all ? std::to_string(v->metrics_all->n_evaluated) : "") << ','
                << detail::metric_cell(v->metrics_holdout, &backtest::Metrics::rmse) << ','
                << detail::metric_cell(v->metrics_holdout, &backtest::Metrics::mae) << ','
                << (v->metrics_holdout ? std::to_string(v->metrics_holdout->n_evaluated) : "") << '\n';
        }
    }
    auto path = dir / "summary.csv";
    csv::write_file(path.string(), sum.str());
    written.push_back(path);
    return written;
}

// ---------------------------------------------------------------------------
// Text tables from a report JSON document
// ---------------------------------------------------------------------------

namespace detail {

inline std::string thousands(const json& v) {
    if (v.is_null()) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v.get<double>() / 1000.0);
    return buf;
}

inline std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
}

}  // namespace detail

/// Per-group RMSE/MAE tables in thousands of euros, rows ordered OLS full,
/// OLS truncated, ECM full, ECM truncated. Holdout-only figures alongside.
inline std::string render_tables(const json& report) {
    if (!report.contains("schema_version") || report["schema_version"] != schema_version) {
        throw DataError("unsupported report schema version");
    }
    const auto cutoff = report.value("cutoff", std::string("?"));
    std::ostringstream out;
    for (const auto& g : report["groups"]) {
        const auto group = g.get<std::string>();
        out << "Model: " << group << "   (thousand euros)\n";
        out << "  " << std::string(34, ' ') << detail::pad("RMSE", 9) << detail::pad("MAE", 9)
            << detail::pad("RMSE(ho)", 10) << detail::pad("MAE(ho)", 9) << '\n';
        for (const char* approach : {"OLS", "ECM"}) {
            bool header = false;
            for (const char* regime : {"full", "truncated"}) {
                for (const auto& v : report["variants"]) {
                    if (v["group"] != group || v["approach"] != approach || v["regime"] != regime) continue;
                    if (!header) {
                        out << "  " << approach << '\n';
                        header = true;
                    }
                    std::string label = std::string(regime) == "full" ? "fit on all quarters"
                                                                      : "fit on quarters up to " + cutoff;
                    out << "    " << label << std::string(label.size() < 32 ? 32 - label.size() : 0, ' ');
                    if (v.contains("error")) {
                        out << "  failed: " << v["error"].get<std::string>() << '\n';
                        continue;
                    }
                    const auto& a = v["metrics_all"];
                    const auto& h = v["metrics_holdout"];
                    out << detail::pad(detail::thousands(a["rmse"]), 9) << detail::pad(detail::thousands(a["mae"]), 9)
                        << detail::pad(h.is_null() ? "n/a" : detail::thousands(h["rmse"]), 10)
                        << detail::pad(h.is_null() ? "n/a" : detail::thousands(h["mae"]), 9) << '\n';
                }
            }
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace hlc::report

#endif  // HLC_REPORT_HPP
