#ifndef HLC_SYNTHETIC_HPP
#define HLC_SYNTHETIC_HPP

// Seeded generator of boom-bust housing datasets for exercising the pipeline
// without external data. The shapes are calibration only: income grows with
// a fourth-quarter bonus, rates fall, the interest-only share ramps up and is
// shut down by regulation, and prices are affine in lagged HLC.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hlc/csv.hpp"
#include "hlc/error.hpp"
#include "hlc/lti.hpp"
#include "hlc/series.hpp"

namespace hlc::synthetic {

struct ScenarioConfig {
    std::uint64_t seed = 1;
    int n_quarters = 92;
    double noise_scale = 0.01;  ///< relative half-width of the multiplicative price noise
    QuarterIndex start{1995, 1};
    QuarterIndex regime_change_quarter{2011, 1};
    lti::LtiParams params;
    int smoothing_window = 4;
    int hlc_lag = 6;
    double intercept = 20000.0;
    double slope = 0.55;

    void validate() const {
        if (n_quarters < 40) throw ConfigError("synthetic scenario needs at least 40 quarters");
        if (!(noise_scale >= 0.0 && noise_scale < 0.5)) throw ConfigError("noise_scale must be in [0, 0.5)");
        if (smoothing_window < 1 || hlc_lag < 0) throw ConfigError("bad smoothing window or lag");
        params.validate();
    }
};

/// Generating coefficients, for oracle checks: HP_t = intercept + slope * HLC_{t-lag}.
struct Truth {
    double intercept = 0.0;
    double slope = 0.0;
    int hlc_lag = 0;
    QuarterlySeries hlc;  ///< HLC as the feature pipeline computes it
};

struct Scenario {
    Frame frame;  ///< HP, I, r, LTV, m
    Truth truth;
};

namespace detail {

/// Uniform on [-1, 1) from the top 53 bits of the engine output.
inline double symmetric_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

}  // namespace detail

inline Scenario generate(const ScenarioConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    const auto n = static_cast<std::size_t>(cfg.n_quarters);
    const double span = static_cast<double>(n - 1);
    const QuarterIndex ramp_start = cfg.start + 8;
    const QuarterIndex plateau = cfg.start + 53;

    std::vector<Observation> income(n), rate(n), ltv(n), share(n);
    for (std::size_t t = 0; t < n; ++t) {
        const QuarterIndex q = cfg.start + static_cast<long>(t);
        const double frac = static_cast<double>(t) / span;
        const double td = static_cast<double>(t);

        const double seasonal = q.quarter() == 4 ? 0.12 : -0.04;
        income[t] = 11200.0 * std::pow(1.0085, td) * (1.0 + seasonal) * (1.0 + 0.005 * detail::symmetric_unit(rng));

        rate[t] = 0.03 + 0.05 * std::exp(-2.2 * frac) + 0.004 * std::sin(2.0 * std::numbers::pi * td / 24.0) +
                  0.001 * detail::symmetric_unit(rng);

        ltv[t] = 0.96 + 0.077 * std::sin(std::numbers::pi * frac) + 0.002 * detail::symmetric_unit(rng);

        double m = 0.0;
        if (q >= cfg.regime_change_quarter) {
            m = 0.0;
        } else if (q >= plateau) {
            m = 0.46;
        } else if (q >= ramp_start) {
            m = 0.46 * static_cast<double>(q - ramp_start) / static_cast<double>(plateau - ramp_start);
        }
        share[t] = m;
    }

    QuarterlySeries I("I", Unit::euros, cfg.start, std::move(income));
    QuarterlySeries r("r", Unit::fraction, cfg.start, std::move(rate));
    QuarterlySeries L("LTV", Unit::fraction, cfg.start, std::move(ltv));
    QuarterlySeries m("m", Unit::fraction, cfg.start, std::move(share));

    const Frame smoothed = align({trailing_mean(I, cfg.smoothing_window), trailing_mean(r, cfg.smoothing_window), m});
    auto hlc = lti::hlc_series(smoothed, cfg.params);
    const auto lagged = lag(hlc, cfg.hlc_lag);
    const auto first = lagged.first_present();
    if (!first) throw ConfigError("synthetic scenario too short for the HLC lag");
    const double warmup = *lagged.at(*first);

    std::vector<Observation> price(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double x = lagged[t] ? *lagged[t] : warmup;
        price[t] = (cfg.intercept + cfg.slope * x) * (1.0 + cfg.noise_scale * detail::symmetric_unit(rng));
    }
    QuarterlySeries HP("HP", Unit::euros, cfg.start, std::move(price));

    Scenario s;
    s.frame = align({HP, I, r, L, m});
    s.truth = {cfg.intercept, cfg.slope, cfg.hlc_lag, std::move(hlc)};
    return s;
}

/// Writes one `quarter,value` CSV per column into `dir`; returns the paths.
inline std::vector<std::filesystem::path> write_series_csvs(const Frame& f, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create directory '" + dir.string() + "': " + ec.message());
    std::vector<std::filesystem::path> out;
    for (const auto& c : f.columns()) {
        std::ostringstream ss;
        csv::write_series(ss, c);
        auto path = dir / (c.name() + ".csv");
        csv::write_file(path.string(), ss.str());
        out.push_back(path);
    }
    return out;
}

}  // namespace hlc::synthetic

#endif  // HLC_SYNTHETIC_HPP
