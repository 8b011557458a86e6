#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "hlc/backtest.hpp"
#include "hlc/csv.hpp"
#include "hlc/report.hpp"
#include "hlc/synthetic.hpp"

namespace hlc::backtest {
namespace {

QuarterlySeries series(std::vector<Observation> v, std::string name = "s") {
    return QuarterlySeries(std::move(name), Unit::euros, {2000, 1}, std::move(v));
}

synthetic::Scenario scenario(double noise, std::uint64_t seed = 1) {
    synthetic::ScenarioConfig c;
    c.seed = seed;
    c.noise_scale = noise;
    return synthetic::generate(c);
}

TEST(Evaluate, IdenticalSeriesScoreZero) {
    auto s = series({1.0, 5.0, 2.0});
    auto m = evaluate(s, s);
    EXPECT_EQ(m.rmse, 0.0);
    EXPECT_EQ(m.mae, 0.0);
    EXPECT_EQ(m.n_evaluated, 3);
}

TEST(Evaluate, HandComputedResiduals) {
    auto m = evaluate(series({10.0, 10.0}), series({7.0, 14.0}));
    EXPECT_DOUBLE_EQ(m.mae, 3.5);
    EXPECT_DOUBLE_EQ(m.rmse, std::sqrt(12.5));
    auto one = evaluate(series({2.0}), series({-1.5}));
    EXPECT_EQ(one.rmse, 3.5);
    EXPECT_EQ(one.mae, 3.5);
}

TEST(Evaluate, WindowAndOverlap) {
    QuarterlySeries obs("o", Unit::euros, {2008, 1}, {1.0, 1.0, 1.0, 1.0});
    QuarterlySeries pred("p", Unit::euros, {2008, 1}, {1.0, 1.0, 3.0, std::nullopt});
    auto all = evaluate(obs, pred, {WindowKind::all_quarters, {2008, 2}});
    EXPECT_EQ(all.n_evaluated, 3);
    auto holdout = evaluate(obs, pred, {WindowKind::holdout_only, {2008, 2}});
    EXPECT_EQ(holdout.n_evaluated, 1);
    EXPECT_EQ(holdout.rmse, 2.0);
    EXPECT_THROW(evaluate(obs, pred, {WindowKind::holdout_only, {2008, 4}}), DataError);
}

TEST(Evaluate, ScalesWithUnitsAndMaeBelowRmse) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z(0.0, 1000.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Observation> o(20), p(20), ko(20), kp(20);
        for (int i = 0; i < 20; ++i) {
            o[i] = z(rng);
            p[i] = z(rng);
            ko[i] = *o[i] * 8.0;
            kp[i] = *p[i] * 8.0;
        }
        auto m = evaluate(series(o), series(p));
        auto km = evaluate(series(ko), series(kp));
        EXPECT_DOUBLE_EQ(km.rmse, 8.0 * m.rmse);
        EXPECT_DOUBLE_EQ(km.mae, 8.0 * m.mae);
        EXPECT_LE(m.mae, m.rmse);
    }
}

TEST(Features, BuildsSmoothedInputsHlcAndLags) {
    auto s = scenario(0.0);
    auto f = build_features(s.frame, lti::LtiParams{}, FeatureConfig{});
    for (const char* name : {"HP", "I", "r", "LTV", "m", "I_raw", "r_raw", "HLC", "HLC_over_I", "HLC_lag6",
                             "HLC_over_I_lag6", "d_HLC_lag4", "HLC_lag5", "d_HLC_over_I_lag4", "HLC_over_I_lag5",
                             "d_I", "I_lag1", "d_r", "r_lag1", "d_LTV", "LTV_lag1"}) {
        EXPECT_TRUE(f.has(name)) << name;
    }
    EXPECT_EQ(f.rows(), 92u);
    EXPECT_FALSE(f.column("I")[2].has_value());
    EXPECT_DOUBLE_EQ(*f.column("I")[3], (*s.frame.column("I")[0] + *s.frame.column("I")[1] +
                                          *s.frame.column("I")[2] + *s.frame.column("I")[3]) / 4.0);
    for (std::size_t t = 0; t < f.rows(); ++t) {
        if (auto h = f.column("HLC")[t]) {
            EXPECT_EQ(*h, *s.truth.hlc[t]);
        }
    }
    EXPECT_EQ(f.column("HLC_lag6")[20], f.column("HLC")[14]);
    EXPECT_EQ(f.column("HLC_over_I").unit(), Unit::dimensionless);
}

TEST(Features, SchemaErrorsNameTheColumn) {
    auto s = scenario(0.0);
    std::vector<QuarterlySeries> cols;
    for (const auto& c : s.frame.columns()) {
        if (c.name() != "LTV") cols.push_back(c);
    }
    try {
        build_features(align(cols), lti::LtiParams{}, FeatureConfig{});
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("LTV"), std::string::npos);
    }
}

TEST(Features, DerivesShareFromStockDataAndAppliesShutdown) {
    auto s = scenario(0.0);
    std::vector<QuarterlySeries> cols;
    std::vector<Observation> stock, tx, hh;
    for (std::size_t t = 0; t < s.frame.rows(); ++t) {
        stock.push_back(std::min(0.5, 0.005 * static_cast<double>(t)));
        tx.push_back(50.0);
        hh.push_back(1000.0);
    }
    for (const auto& c : s.frame.columns()) {
        if (c.name() != "m") cols.push_back(c);
    }
    cols.emplace_back("io_stock_share", Unit::fraction, s.frame.start(), stock);
    cols.emplace_back("transactions", Unit::dimensionless, s.frame.start(), tx);
    cols.emplace_back("households", Unit::dimensionless, s.frame.start(), hh);
    FeatureConfig cfg;
    cfg.interest_only_zero_from = QuarterIndex(2011, 1);
    auto f = build_features(align(cols), lti::LtiParams{}, cfg);
    const auto& m = f.column("m");
    EXPECT_FALSE(m[0].has_value());
    // stock rises 0.005 per quarter from 0 with 5% movers: a tenth of movers switch
    EXPECT_DOUBLE_EQ(*m[1], 0.1 + 0.9 * 0.0);
    EXPECT_DOUBLE_EQ(*m[2], 0.1 + 0.9 * 0.005);
    EXPECT_EQ(*m.at({2011, 1}), 0.0);
    EXPECT_EQ(*m.at({2017, 4}), 0.0);
    EXPECT_FALSE(f.has("io_stock_share"));
}

TEST(Features, LtvForwardFilledAfterFirstObservation) {
    auto s = scenario(0.0);
    std::vector<QuarterlySeries> cols;
    for (const auto& c : s.frame.columns()) {
        if (c.name() != "LTV") {
            cols.push_back(c);
            continue;
        }
        std::vector<Observation> v(c.values().begin(), c.values().end());
        v[0] = std::nullopt;
        for (std::size_t t = 2; t < v.size(); ++t) {
            if (t % 4 != 1) v[t] = std::nullopt;
        }
        cols.emplace_back("LTV", Unit::fraction, c.start(), v);
    }
    auto f = build_features(align(cols), lti::LtiParams{}, FeatureConfig{});
    const auto& ltv = f.column("LTV");
    EXPECT_FALSE(ltv[0].has_value());
    EXPECT_EQ(*ltv[2], *ltv[1]);
    EXPECT_EQ(*ltv[4], *ltv[1]);
    EXPECT_EQ(*ltv[6], *ltv[5]);
}

TEST(Grid, NoiselessHlcModelFitsExactlyInBothRegimes) {
    auto s = scenario(0.0);
    auto f = build_features(s.frame, lti::LtiParams{}, FeatureConfig{});
    auto report = run_grid(f, default_specs(), SplitSpec{});
    ASSERT_EQ(report.variants.size(), 12u);
    for (const auto& v : report.variants) {
        ASSERT_FALSE(v.error) << v.spec.name << ": " << *v.error;
        if (v.spec.name != "hlc_ols") continue;
        EXPECT_NEAR(v.ols->estimate("const"), s.truth.intercept, 1e-8 * s.truth.intercept);
        EXPECT_NEAR(v.ols->estimate("HLC_lag6"), s.truth.slope, 1e-8);
        EXPECT_LT(v.metrics_all->rmse, 1e-6);
        EXPECT_LT(v.metrics_holdout->rmse, 1e-6);
    }
}

TEST(Grid, TruncatedTrainingStopsAtCutoff) {
    auto s = scenario(0.02);
    auto f = build_features(s.frame, lti::LtiParams{}, FeatureConfig{});
    const SplitSpec split{{2008, 2}};
    auto report = run_grid(f, default_specs(), split);
    for (const auto& v : report.variants) {
        ASSERT_FALSE(v.error);
        const auto& rows = v.ols ? v.ols->rows : v.ecm->underlying.rows;
        if (v.regime == Regime::truncated) {
            EXPECT_LE(rows.back(), split.cutoff) << v.spec.name;
        } else {
            EXPECT_GT(rows.back(), split.cutoff) << v.spec.name;
        }
        EXPECT_GT(v.metrics_holdout->n_evaluated, 30);
        EXPECT_LE(v.metrics_all->mae, v.metrics_all->rmse);
    }
}

TEST(Grid, FullFitNeverWorseInSample) {
    // The full fit minimises squared error over a superset of rows. For the ECM
    // this holds for one-step (static) evaluation.
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto s = scenario(0.03, seed);
        auto f = build_features(s.frame, lti::LtiParams{}, FeatureConfig{});
        GridOptions opts;
        opts.ecm_forecast = regress::ForecastMode::static_;
        auto report = run_grid(f, default_specs(), SplitSpec{}, opts);
        for (std::size_t i = 0; i + 1 < report.variants.size(); i += 2) {
            const auto& full = report.variants[i];
            const auto& cut = report.variants[i + 1];
            ASSERT_EQ(full.regime, Regime::full);
            ASSERT_EQ(cut.regime, Regime::truncated);
            EXPECT_EQ(full.metrics_all->n_evaluated, cut.metrics_all->n_evaluated);
            EXPECT_LE(full.metrics_all->rmse, cut.metrics_all->rmse * (1.0 + 1e-12)) << full.spec.name;
        }
    }
}

TEST(Grid, AddingHlcNeverLowersInSampleRSquared) {
    auto s = scenario(0.03);
    auto f = build_features(s.frame, lti::LtiParams{}, FeatureConfig{});
    regress::RowRange all;
    // Same sample for both: rows where the lagged ratio exists.
    auto base = regress::make_design(f, "HP", {"I", "r", "LTV", "HLC_over_I_lag6"});
    auto nested = base;
    nested.regressors = base.regressors.leftCols(4);
    nested.names.resize(4);
    EXPECT_GE(regress::ols_fit(base).r_squared, regress::ols_fit(nested).r_squared);
}

TEST(Grid, FailuresAreIsolated) {
    auto s = scenario(0.01);
    auto f = build_features(s.frame, lti::LtiParams{}, FeatureConfig{});
    auto specs = default_specs();
    specs.push_back({"broken_ols", "broken", Approach::ols, {{"not_a_column", 0}}});
    specs.push_back({"collinear_ols", "broken", Approach::ols, {{"I"}, {"I_raw"}, {"I_lag1"}, {"I", 1}}});
    auto report = run_grid(f, specs, SplitSpec{});
    int failed = 0;
    for (const auto& v : report.variants) {
        if (v.spec.group == "broken") {
            EXPECT_TRUE(v.error.has_value());
            EXPECT_FALSE(v.metrics_all.has_value());
            ++failed;
        } else {
            EXPECT_FALSE(v.error.has_value());
        }
    }
    EXPECT_EQ(failed, 4);
}

TEST(Grid, RejectsDuplicateNamesAndBadCutoff) {
    auto s = scenario(0.01);
    auto f = build_features(s.frame, lti::LtiParams{}, FeatureConfig{});
    auto specs = default_specs();
    specs.push_back(specs.front());
    EXPECT_THROW(run_grid(f, specs, SplitSpec{}), ConfigError);
    EXPECT_THROW(run_grid(f, default_specs(), SplitSpec{{1990, 1}}), DataError);
    EXPECT_THROW(run_grid(f, default_specs(), SplitSpec{{2017, 4}}), DataError);
}

TEST(Grid, ReportJsonIsDeterministicAndOrdered) {
    auto s = scenario(0.01, 9);
    auto f = build_features(s.frame, lti::LtiParams{}, FeatureConfig{});
    const auto a = report::dump(report::to_json(run_grid(f, default_specs(), SplitSpec{})));
    const auto b = report::dump(report::to_json(run_grid(f, default_specs(), SplitSpec{})));
    EXPECT_EQ(a, b);
    auto j = report::json::parse(a);
    EXPECT_EQ(j["schema_version"], 1);
    std::vector<std::string> keys;
    for (const auto& v : j["variants"]) keys.push_back(v["name"].get<std::string>() + "/" + v["regime"].get<std::string>());
    auto sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(keys, sorted);
    const auto& hlc_full = j["variants"][10];
    EXPECT_EQ(hlc_full["name"], "hlc_ols");
    EXPECT_TRUE(hlc_full["coefficients"].contains("HLC_lag6"));
    EXPECT_TRUE(hlc_full["coefficients"]["HLC_lag6"].contains("stderr"));
    for (const char* k : {"r2", "adj_r2", "resid_se", "f_stat", "n"}) EXPECT_TRUE(hlc_full["fit"].contains(k)) << k;
    EXPECT_TRUE(j["variants"][0]["fit"].contains("gamma"));
}

TEST(Report, PlotDataAndTables) {
    auto s = scenario(0.01, 4);
    auto f = build_features(s.frame, lti::LtiParams{}, FeatureConfig{});
    auto rep = run_grid(f, default_specs(), SplitSpec{});
    const auto dir = std::filesystem::temp_directory_path() / "hlc_test_plots";
    std::filesystem::remove_all(dir);
    auto files = report::emit_plot_data(rep, dir);
    EXPECT_EQ(files.size(), 13u);
    const auto text = csv::read_file((dir / "hlc_ols_truncated.csv").string());
    EXPECT_EQ(text.substr(0, text.find('\n')), "quarter,observed,fitted_or_forecast,regime");
    EXPECT_NE(text.find("2017Q4,"), std::string::npos);
    const auto summary = csv::read_file((dir / "summary.csv").string());
    EXPECT_NE(summary.find("rmse_all_eur"), std::string::npos);

    const auto tables = report::render_tables(report::to_json(rep));
    const auto ols_full = tables.find("fit on all quarters");
    const auto ols_cut = tables.find("fit on quarters up to 2008Q2");
    const auto ecm = tables.find("ECM");
    EXPECT_LT(ols_full, ols_cut);
    EXPECT_LT(ols_cut, ecm);
    EXPECT_LT(tables.find("Model: benchmark "), tables.find("Model: hlc "));
    EXPECT_LT(tables.find("Model: hlc "), tables.find("Model: benchmark_hlc "));
    std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace hlc::backtest
