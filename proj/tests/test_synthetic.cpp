#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "hlc/backtest.hpp"
#include "hlc/csv.hpp"
#include "hlc/regress.hpp"
#include "hlc/synthetic.hpp"

namespace hlc::synthetic {
namespace {

ScenarioConfig config(std::uint64_t seed, double noise = 0.01) {
    ScenarioConfig c;
    c.seed = seed;
    c.noise_scale = noise;
    return c;
}

TEST(Synthetic, SameSeedSameFrame) {
    EXPECT_EQ(generate(config(42)).frame, generate(config(42)).frame);
    EXPECT_FALSE(generate(config(42)).frame == generate(config(43)).frame);
}

TEST(Synthetic, ShapeAndColumns) {
    const auto s = generate(config(1));
    EXPECT_EQ(s.frame.column_names(), (std::vector<std::string>{"HP", "I", "r", "LTV", "m"}));
    EXPECT_EQ(s.frame.start(), QuarterIndex(1995, 1));
    EXPECT_EQ(s.frame.last(), QuarterIndex(2017, 4));
    for (const auto& c : s.frame.columns()) EXPECT_EQ(c.count_present(), 92u) << c.name();
}

TEST(Synthetic, PlausibleRangesAcrossSeeds) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto s = generate(config(seed, 0.05));
        for (const auto& v : s.frame.column("r").values()) {
            EXPECT_GE(*v, 0.02);
            EXPECT_LE(*v, 0.09);
        }
        for (const auto& v : s.frame.column("m").values()) {
            EXPECT_GE(*v, 0.0);
            EXPECT_LE(*v, 0.5);
        }
        for (const auto& v : s.frame.column("LTV").values()) {
            EXPECT_GT(*v, 0.9);
            EXPECT_LT(*v, 1.1);
        }
        for (const auto& v : s.frame.column("HP").values()) EXPECT_GT(*v, 0.0);
    }
}

TEST(Synthetic, InterestOnlyShareRampsThenShutsDown) {
    const auto& m = generate(config(3)).frame.column("m");
    EXPECT_EQ(*m.at({1996, 4}), 0.0);
    EXPECT_GT(*m.at({2000, 1}), 0.0);
    EXPECT_LT(*m.at({2000, 1}), 0.46);
    EXPECT_EQ(*m.at({2008, 2}), 0.46);
    EXPECT_EQ(*m.at({2010, 4}), 0.46);
    EXPECT_EQ(*m.at({2011, 1}), 0.0);
    EXPECT_EQ(*m.at({2017, 4}), 0.0);
}

TEST(Synthetic, NoiselessPricesAreExactlyAffineInLaggedHlc) {
    for (std::uint64_t seed : {1u, 7u, 99u}) {
        const auto s = generate(config(seed, 0.0));
        const auto f = backtest::build_features(s.frame, lti::LtiParams{}, backtest::FeatureConfig{});
        const auto fit = regress::ols_fit(regress::make_design(f, "HP", {"HLC_lag6"}));
        EXPECT_NEAR(fit.estimate("const"), s.truth.intercept, 1e-8 * s.truth.intercept);
        EXPECT_NEAR(fit.estimate("HLC_lag6"), s.truth.slope, 1e-8);
        EXPECT_GT(fit.r_squared, 1.0 - 1e-12);
    }
}

TEST(Synthetic, NoiseBoundsRelativeDeviation) {
    const auto clean = generate(config(5, 0.0));
    const auto noisy = generate(config(5, 0.03));
    const auto& a = clean.frame.column("HP");
    const auto& b = noisy.frame.column("HP");
    for (std::size_t t = 0; t < a.size(); ++t) EXPECT_LE(std::abs(*b[t] / *a[t] - 1.0), 0.03);
}

TEST(Synthetic, RejectsBadConfig) {
    auto c = config(1);
    c.n_quarters = 20;
    EXPECT_THROW(generate(c), ConfigError);
    c = config(1, 0.7);
    EXPECT_THROW(generate(c), ConfigError);
}

TEST(Synthetic, CsvFilesRoundTrip) {
    const auto s = generate(config(11));
    const auto dir = std::filesystem::temp_directory_path() / "hlc_test_synth";
    std::filesystem::remove_all(dir);
    const auto files = write_series_csvs(s.frame, dir);
    ASSERT_EQ(files.size(), 5u);
    std::ifstream in(dir / "HP.csv");
    EXPECT_EQ(csv::read_series(in, "HP", Unit::euros), s.frame.column("HP"));
    std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace hlc::synthetic
