#ifndef HLC_BACKTEST_HPP
#define HLC_BACKTEST_HPP

// The comparative experiment: three house-price specifications (benchmark,
// HLC, benchmark + HLC/income), each fitted by OLS and as an ECM, on the full
// sample and on data up to a cutoff quarter, scored by RMSE and MAE.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hlc/error.hpp"
#include "hlc/lti.hpp"
#include "hlc/regress.hpp"
#include "hlc/series.hpp"

namespace hlc::backtest {

enum class Approach { ols, ecm };
enum class Transform { level, hlc_over_income };
enum class Regime { full, truncated };

inline std::string to_string(Approach a) { return a == Approach::ols ? "OLS" : "ECM"; }
inline std::string to_string(Regime r) { return r == Regime::full ? "full" : "truncated"; }

/// One regressor of a model specification. OLS uses `lag`; the ECM uses the
/// difference lagged by `diff_lag` and the level lagged by `level_lag`.
struct Term {
    std::string column;
    int lag = 0;
    Transform transform = Transform::level;
    int diff_lag = 0;
    int level_lag = 1;

    bool operator==(const Term&) const = default;
};

struct ModelSpec {
    std::string name;   ///< unique within a run
    std::string group;  ///< specification family the report tables are grouped by
    Approach approach = Approach::ols;
    std::vector<Term> regressors;

    bool operator==(const ModelSpec&) const = default;
};

/// Column names shared by the feature pipeline.
struct Columns {
    std::string price = "HP";
    std::string income = "I";
    std::string rate = "r";
    std::string ltv = "LTV";
    std::string share = "m";
    std::string hlc = "HLC";
    std::string stock_share = "io_stock_share";
    std::string transactions = "transactions";
    std::string households = "households";

    bool operator==(const Columns&) const = default;
};

inline std::string base_name(const Term& t, const Columns& cols = {}) {
    return t.transform == Transform::hlc_over_income ? t.column + "_over_" + cols.income : t.column;
}

inline std::string lagged_name(std::string base, int lag) {
    return lag == 0 ? base : base + "_lag" + std::to_string(lag);
}

/// Column name of the term as an OLS regressor.
inline std::string ols_term_name(const Term& t, const Columns& cols = {}) { return lagged_name(base_name(t, cols), t.lag); }
inline std::string ecm_short_name(const Term& t, const Columns& cols = {}) {
    return lagged_name("d_" + base_name(t, cols), t.diff_lag);
}
inline std::string ecm_level_name(const Term& t, const Columns& cols = {}) {
    return lagged_name(base_name(t, cols), t.level_lag);
}

/// The shipped grid. Lags: HLC at t-6 for OLS; for the ECM, the change in HLC
/// at t-4 and its level at t-5; benchmark variables enter the ECM as current
/// changes and levels at t-1.
inline std::vector<ModelSpec> default_specs(const Columns& c = {}) {
    const Term income{c.income, 0, Transform::level, 0, 1};
    const Term rate{c.rate, 0, Transform::level, 0, 1};
    const Term ltv{c.ltv, 0, Transform::level, 0, 1};
    const Term hlc{c.hlc, 6, Transform::level, 4, 5};
    const Term ratio{c.hlc, 6, Transform::hlc_over_income, 4, 5};
    return {
        {"benchmark_ols", "benchmark", Approach::ols, {income, rate, ltv}},
        {"benchmark_ecm", "benchmark", Approach::ecm, {income, rate, ltv}},
        {"hlc_ols", "hlc", Approach::ols, {hlc}},
        {"hlc_ecm", "hlc", Approach::ecm, {hlc}},
        {"benchmark_hlc_ols", "benchmark_hlc", Approach::ols, {income, rate, ltv, ratio}},
        {"benchmark_hlc_ecm", "benchmark_hlc", Approach::ecm, {income, rate, ltv, ratio}},
    };
}

/// Benchmark extended with a mortgage-debt-to-GDP column; not part of the default grid.
inline std::vector<ModelSpec> debt_gdp_specs(const std::string& column = "debt_gdp", const Columns& c = {}) {
    const Term income{c.income, 0, Transform::level, 0, 1};
    const Term rate{c.rate, 0, Transform::level, 0, 1};
    const Term ltv{c.ltv, 0, Transform::level, 0, 1};
    const Term debt{column, 0, Transform::level, 0, 1};
    return {
        {"benchmark_debt_gdp_ols", "benchmark_debt_gdp", Approach::ols, {income, rate, ltv, debt}},
        {"benchmark_debt_gdp_ecm", "benchmark_debt_gdp", Approach::ecm, {income, rate, ltv, debt}},
    };
}

inline void validate_specs(const std::vector<ModelSpec>& specs) {
    std::set<std::string> seen;
    for (const auto& s : specs) {
        if (s.name.empty()) throw ConfigError("model spec with empty name");
        if (!seen.insert(s.name).second) throw ConfigError("duplicate model spec name '" + s.name + "'");
        for (const auto& t : s.regressors) {
            if (t.lag < 0 || t.diff_lag < 0 || t.level_lag < 0) {
                throw ConfigError("model spec '" + s.name + "': negative lag on '" + t.column + "'");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Features
// ---------------------------------------------------------------------------

namespace detail {

inline QuarterlySeries base_series(const Frame& f, const Term& t, const Columns& cols) {
    const auto& x = f.column(t.column);
    if (t.transform == Transform::level) return x;
    return zip_with(
        x, f.column(cols.income), [](double a, double b) { return a / b; }, base_name(t, cols), Unit::dimensionless);
}

/// forward_fill starting at the first present value; leading gaps stay missing.
inline QuarterlySeries fill_after_first(const QuarterlySeries& s) {
    auto first = s.first_present();
    if (!first) return s;
    auto tail = s.reindexed(*first, static_cast<std::size_t>(s.last() - *first) + 1);
    auto filled = forward_fill(tail);
    return filled.reindexed(s.start(), s.size());
}

}  // namespace detail

/// Adds the columns `spec` regresses on (lagged levels for OLS; lagged
/// differences and lagged levels for the ECM). Existing columns are kept.
inline Frame materialize(const Frame& f, const ModelSpec& spec, const Columns& cols = {}) {
    Frame out = f;
    for (const auto& t : spec.regressors) {
        const auto base = detail::base_series(f, t, cols);
        if (spec.approach == Approach::ols) {
            const auto name = ols_term_name(t, cols);
            if (!out.has(name)) out = out.with_column(lag(base, t.lag).renamed(name));
        } else {
            const auto sname = ecm_short_name(t, cols);
            const auto lname = ecm_level_name(t, cols);
            if (!out.has(sname)) out = out.with_column(lag(diff(base), t.diff_lag).renamed(sname));
            if (!out.has(lname)) out = out.with_column(lag(base, t.level_lag).renamed(lname));
        }
    }
    return out;
}

struct FeatureConfig {
    int smoothing_window = 4;
    /// Interest-only share forced to 0 from this quarter on (regulatory shutdown).
    std::optional<QuarterIndex> interest_only_zero_from;
    Columns columns;

    bool operator==(const FeatureConfig&) const = default;
};

/// Smoothed income and rates, forward-filled LTV, the interest-only share
/// (given or derived from stock data), HLC, HLC/income, and every lagged
/// column the specs need.
inline Frame build_features(const Frame& raw, const lti::LtiParams& p, const FeatureConfig& cfg,
                            const std::vector<ModelSpec>& specs = default_specs()) {
    const auto& c = cfg.columns;
    for (const auto* name : {&c.price, &c.income, &c.rate, &c.ltv}) {
        if (!raw.has(*name)) throw DataError("raw frame is missing required column '" + *name + "'");
    }
    QuarterlySeries share;
    if (raw.has(c.share)) {
        share = raw.column(c.share);
    } else if (raw.has(c.stock_share) && raw.has(c.transactions) && raw.has(c.households)) {
        share = lti::derive_interest_only_share(raw.column(c.stock_share), raw.column(c.transactions),
                                                raw.column(c.households), c.share);
    } else {
        throw DataError("raw frame needs column '" + c.share + "' or all of '" + c.stock_share + "', '" +
                        c.transactions + "', '" + c.households + "'");
    }
    if (cfg.interest_only_zero_from) share = override_from(share, *cfg.interest_only_zero_from, 0.0);

    const auto& income_raw = raw.column(c.income);
    const auto& rate_raw = raw.column(c.rate);
    std::vector<QuarterlySeries> cols{
        raw.column(c.price),
        trailing_mean(income_raw, cfg.smoothing_window),
        trailing_mean(rate_raw, cfg.smoothing_window),
        detail::fill_after_first(raw.column(c.ltv)),
        share.reindexed(raw.start(), raw.rows()),
        income_raw.renamed(c.income + "_raw"),
        rate_raw.renamed(c.rate + "_raw"),
    };
    for (const auto& col : raw.columns()) {
        if (std::none_of(cols.begin(), cols.end(), [&](const auto& k) { return k.name() == col.name(); }) &&
            col.name() != c.stock_share && col.name() != c.transactions && col.name() != c.households) {
            cols.push_back(col);
        }
    }
    Frame f = align(cols);
    lti::HlcColumns hc{c.income, c.rate, c.share};
    const auto hlc = lti::hlc_series(f, p, hc, c.hlc);
    f = f.with_column(hlc);
    f = f.with_column(zip_with(
        hlc, f.column(c.income), [](double a, double b) { return a / b; }, c.hlc + "_over_" + c.income,
        Unit::dimensionless));
    for (const auto& s : specs) {
        try {
            f = materialize(f, s, c);
        } catch (const DataError&) {
            // Columns a spec needs but the data lacks surface as that variant's failure in run_grid.
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

struct Metrics {
    double rmse = 0.0;
    double mae = 0.0;
    int n_evaluated = 0;
};

enum class WindowKind { all_quarters, holdout_only };

inline std::string to_string(WindowKind w) { return w == WindowKind::all_quarters ? "all_quarters" : "holdout_only"; }

struct EvaluationWindow {
    WindowKind kind = WindowKind::all_quarters;
    QuarterIndex cutoff{2008, 2};  ///< holdout is every quarter strictly after this

    bool contains(QuarterIndex q) const { return kind == WindowKind::all_quarters || q > cutoff; }
};

/// RMSE and MAE over quarters inside `window` where both series are present.
inline Metrics evaluate(const QuarterlySeries& observed, const QuarterlySeries& predicted,
                        EvaluationWindow window = {}) {
    double sq = 0.0;
    double abs = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const auto q = observed.start() + static_cast<long>(i);
        if (!window.contains(q) || !observed[i]) continue;
        auto p = predicted.at(q);
        if (!p) continue;
        const double e = *observed[i] - *p;
        sq += e * e;
        abs += std::abs(e);
        ++n;
    }
    if (n == 0) {
        throw DataError("no overlapping observations between '" + observed.name() + "' and its prediction in the " +
                        to_string(window.kind) + " window");
    }
    return {std::sqrt(sq / n), abs / n, n};
}

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

struct SplitSpec {
    QuarterIndex cutoff{2008, 2};  ///< last quarter of the truncated training sample

    bool operator==(const SplitSpec&) const = default;
};

struct GridOptions {
    regress::ForecastMode ecm_forecast = regress::ForecastMode::dynamic;
    Columns columns;
};

struct VariantResult {
    ModelSpec spec;
    Regime regime = Regime::full;
    std::optional<std::string> error;
    std::optional<Metrics> metrics_all;
    std::optional<Metrics> metrics_holdout;
    std::optional<regress::FitResult> ols;
    std::optional<regress::EcmFit> ecm;
    QuarterlySeries observed;
    QuarterlySeries predicted;  ///< in-sample fit, then forecasts past the cutoff for the truncated regime
};

struct BacktestReport {
    SplitSpec split;
    regress::ForecastMode ecm_forecast = regress::ForecastMode::dynamic;
    std::vector<std::string> groups;  ///< table order: first appearance in the spec list
    std::vector<VariantResult> variants;  ///< ordered by spec name, then regime
};

namespace detail {

inline std::pair<regress::FitResult, QuarterlySeries> run_ols(const Frame& f, const ModelSpec& spec,
                                                              regress::RowRange range, const Columns& cols) {
    std::vector<std::string> names;
    for (const auto& t : spec.regressors) names.push_back(ols_term_name(t, cols));
    auto fit = regress::ols_fit(regress::make_design(f, cols.price, names, true, range));
    auto predicted = regress::predict(fit, f);
    return {std::move(fit), std::move(predicted)};
}

inline std::pair<regress::EcmFit, QuarterlySeries> run_ecm(const Frame& f, const ModelSpec& spec, Regime regime,
                                                           QuarterIndex cutoff, regress::ForecastMode mode,
                                                           const Columns& cols) {
    std::vector<QuarterlySeries> short_cols, level_cols;
    for (const auto& t : spec.regressors) {
        short_cols.push_back(f.column(ecm_short_name(t, cols)));
        level_cols.push_back(f.column(ecm_level_name(t, cols)));
    }
    const auto& y = f.column(cols.price);
    const Frame short_frame = align(short_cols);
    const Frame level_frame = align(level_cols);
    regress::RowRange range;
    if (regime == Regime::truncated) range.last = cutoff;
    auto fit = regress::ecm_fit(y, short_frame, level_frame, range);

    const Frame ef = regress::ecm_frame(y, short_frame, level_frame);
    auto first = y.first_present();
    if (!first) throw DataError("response '" + y.name() + "' has no observations");
    auto in_sample = regress::ecm_forecast(fit, ef, first->next(), regress::ForecastMode::static_);
    if (regime == Regime::full || cutoff >= ef.last()) return {std::move(fit), std::move(in_sample)};

    auto ahead = regress::ecm_forecast(fit, ef, cutoff.next(), mode);
    std::vector<Observation> merged(in_sample.size());
    for (std::size_t i = 0; i < merged.size(); ++i) {
        const auto q = in_sample.start() + static_cast<long>(i);
        merged[i] = q <= cutoff ? in_sample[i] : ahead.at(q);
    }
    return {std::move(fit), QuarterlySeries(y.name(), y.unit(), in_sample.start(), std::move(merged))};
}

}  // namespace detail

inline VariantResult run_variant(const Frame& features, const ModelSpec& spec, Regime regime, const SplitSpec& split,
                                 const GridOptions& opts = {}) {
    const auto& cols = opts.columns;
    VariantResult v;
    v.spec = spec;
    v.regime = regime;
    try {
        const Frame f = materialize(features, spec, cols);
        v.observed = f.column(cols.price);
        regress::RowRange range;
        if (regime == Regime::truncated) range.last = split.cutoff;
        if (spec.approach == Approach::ols) {
            auto [fit, predicted] = detail::run_ols(f, spec, range, cols);
            v.ols = std::move(fit);
            v.predicted = std::move(predicted);
        } else {
            auto [fit, predicted] = detail::run_ecm(f, spec, regime, split.cutoff, opts.ecm_forecast, cols);
            v.ecm = std::move(fit);
            v.predicted = std::move(predicted);
        }
        v.metrics_all = evaluate(v.observed, v.predicted, {WindowKind::all_quarters, split.cutoff});
        try {
            v.metrics_holdout = evaluate(v.observed, v.predicted, {WindowKind::holdout_only, split.cutoff});
        } catch (const DataError&) {
            // no quarters after the cutoff
        }
    } catch (const Error& e) {
        v.error = e.what();
        v.metrics_all.reset();
        v.metrics_holdout.reset();
    }
    return v;
}

/// Every spec under both regimes. A failing variant is recorded, not fatal.
inline BacktestReport run_grid(const Frame& features, const std::vector<ModelSpec>& specs, const SplitSpec& split,
                               const GridOptions& opts = {}) {
    validate_specs(specs);
    if (features.rows() == 0 || split.cutoff < features.start() || split.cutoff >= features.last()) {
        throw DataError("cutoff " + split.cutoff.to_string() + " must lie inside the sample and before its last quarter");
    }
    BacktestReport report;
    report.split = split;
    report.ecm_forecast = opts.ecm_forecast;
    for (const auto& s : specs) {
        const auto g = s.group.empty() ? s.name : s.group;
        if (std::find(report.groups.begin(), report.groups.end(), g) == report.groups.end()) report.groups.push_back(g);
    }
    std::vector<const ModelSpec*> ordered;
    for (const auto& s : specs) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(), [](const ModelSpec* a, const ModelSpec* b) { return a->name < b->name; });
    for (const auto* s : ordered) {
        for (auto regime : {Regime::full, Regime::truncated}) {
            report.variants.push_back(run_variant(features, *s, regime, split, opts));
        }
    }
    return report;
}

}  // namespace hlc::backtest

#endif  // HLC_BACKTEST_HPP
