#ifndef HLC_CONFIG_HPP
#define HLC_CONFIG_HPP

// Run configuration: a single JSON document holding every knob of a run.
// Relative paths resolve against the directory of the config file.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hlc/backtest.hpp"
#include "hlc/csv.hpp"
#include "hlc/error.hpp"
#include "hlc/lti.hpp"
#include "hlc/quarter.hpp"
#include "hlc/regress.hpp"

namespace hlc::config {

using json = nlohmann::ordered_json;

/// Declared unit of a source file; percent and thousands are normalised on ingestion.
enum class SourceUnit { euros, thousand_euros, percent, fraction, dimensionless };

struct SeriesSource {
    std::string path;         ///< quarterly CSV (quarter,value); may be empty when only yearly data exists
    std::string yearly_path;  ///< optional yearly CSV (year,value) filling quarters the quarterly file lacks
    SourceUnit unit = SourceUnit::dimensionless;
    bool interpolate_yearly = true;  ///< false: yearly value placed at the anchor quarter only

    bool operator==(const SeriesSource&) const = default;
};

struct LagRange {
    int lo = 0;
    int hi = 6;
    bool operator==(const LagRange&) const = default;
};

/// Parses `a..b`.
inline LagRange parse_lag_range(const std::string& text) {
    auto dots = text.find("..");
    if (dots == std::string::npos) throw ConfigError("lag range must look like a..b, got '" + text + "'");
    try {
        std::size_t used = 0;
        LagRange r;
        r.lo = std::stoi(text.substr(0, dots), &used);
        if (used != dots) throw ConfigError("bad lag range '" + text + "'");
        const auto tail = text.substr(dots + 2);
        r.hi = std::stoi(tail, &used);
        if (used != tail.size()) throw ConfigError("bad lag range '" + text + "'");
        if (r.lo < 0 || r.hi < r.lo) throw ConfigError("lag range must satisfy 0 <= a <= b, got '" + text + "'");
        return r;
    } catch (const std::logic_error&) {
        throw ConfigError("bad lag range '" + text + "'");
    }
}

struct RunConfig {
    std::vector<std::pair<std::string, SeriesSource>> series;
    lti::LtiParams lti;
    backtest::FeatureConfig features;
    int anchor_quarter = 4;
    backtest::SplitSpec split;
    regress::ForecastMode ecm_forecast = regress::ForecastMode::dynamic;
    LagRange lags;
    std::vector<std::string> grid{"benchmark", "hlc", "benchmark_hlc"};
    std::vector<backtest::ModelSpec> custom_specs;
    std::string output_dir = "runs";

    /// Directory relative paths resolve against; not serialised.
    std::filesystem::path base_dir = ".";

    bool operator==(const RunConfig& o) const {
        return series == o.series && lti == o.lti && features == o.features && anchor_quarter == o.anchor_quarter &&
               split == o.split && ecm_forecast == o.ecm_forecast && lags == o.lags && grid == o.grid &&
               custom_specs == o.custom_specs && output_dir == o.output_dir;
    }

    std::filesystem::path resolve(const std::string& p) const {
        std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    }
};

// ---------------------------------------------------------------------------
// JSON mapping
// ---------------------------------------------------------------------------

namespace detail {

inline const std::vector<std::pair<SourceUnit, std::string>>& unit_names() {
    static const std::vector<std::pair<SourceUnit, std::string>> names{
        {SourceUnit::euros, "euros"},     {SourceUnit::thousand_euros, "thousand_euros"},
        {SourceUnit::percent, "percent"}, {SourceUnit::fraction, "fraction"},
        {SourceUnit::dimensionless, "dimensionless"},
    };
    return names;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    try {
        return j[key].get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
}

inline std::string approach_name(backtest::Approach a) { return a == backtest::Approach::ols ? "ols" : "ecm"; }

}  // namespace detail

inline std::string to_string(SourceUnit u) {
    for (const auto& [k, v] : detail::unit_names()) {
        if (k == u) return v;
    }
    return "dimensionless";
}

inline SourceUnit parse_source_unit(const std::string& s) {
    for (const auto& [k, v] : detail::unit_names()) {
        if (v == s) return k;
    }
    throw ConfigError("unknown unit '" + s + "'");
}

inline Unit stored_unit(SourceUnit u) {
    switch (u) {
        case SourceUnit::euros:
        case SourceUnit::thousand_euros: return Unit::euros;
        case SourceUnit::percent:
        case SourceUnit::fraction: return Unit::fraction;
        case SourceUnit::dimensionless: return Unit::dimensionless;
    }
    return Unit::dimensionless;
}

inline double unit_factor(SourceUnit u) {
    switch (u) {
        case SourceUnit::thousand_euros: return 1000.0;
        case SourceUnit::percent: return 0.01;
        default: return 1.0;
    }
}

inline json spec_to_json(const backtest::ModelSpec& s) {
    json regs = json::array();
    for (const auto& t : s.regressors) {
        regs.push_back({{"column", t.column},
                        {"lag", t.lag},
                        {"transform", t.transform == backtest::Transform::level ? "level" : "hlc_over_income"},
                        {"diff_lag", t.diff_lag},
                        {"level_lag", t.level_lag}});
    }
    return {{"name", s.name}, {"group", s.group}, {"approach", detail::approach_name(s.approach)}, {"regressors", regs}};
}

inline backtest::ModelSpec spec_from_json(const json& j) {
    backtest::ModelSpec s;
    s.name = detail::get_or<std::string>(j, "name", "");
    s.group = detail::get_or<std::string>(j, "group", s.name);
    const auto approach = detail::get_or<std::string>(j, "approach", "ols");
    if (approach != "ols" && approach != "ecm") throw ConfigError("spec '" + s.name + "': approach must be ols or ecm");
    s.approach = approach == "ols" ? backtest::Approach::ols : backtest::Approach::ecm;
    if (!j.contains("regressors") || !j["regressors"].is_array()) {
        throw ConfigError("spec '" + s.name + "' needs a regressors array");
    }
    for (const auto& r : j["regressors"]) {
        backtest::Term t;
        t.column = detail::get_or<std::string>(r, "column", "");
        if (t.column.empty()) throw ConfigError("spec '" + s.name + "': regressor without column");
        t.lag = detail::get_or(r, "lag", 0);
        const auto tr = detail::get_or<std::string>(r, "transform", "level");
        if (tr != "level" && tr != "hlc_over_income") throw ConfigError("unknown transform '" + tr + "'");
        t.transform = tr == "level" ? backtest::Transform::level : backtest::Transform::hlc_over_income;
        t.diff_lag = detail::get_or(r, "diff_lag", 0);
        t.level_lag = detail::get_or(r, "level_lag", t.diff_lag + 1);
        s.regressors.push_back(std::move(t));
    }
    return s;
}

inline json to_json(const RunConfig& c) {
    json series = json::object();
    for (const auto& [name, src] : c.series) {
        json s = {{"path", src.path}, {"unit", to_string(src.unit)}};
        if (!src.yearly_path.empty()) {
            s["yearly_path"] = src.yearly_path;
            s["yearly_fill"] = src.interpolate_yearly ? "interpolate" : "anchor_only";
        }
        series[name] = s;
    }
    json specs = json::array();
    for (const auto& s : c.custom_specs) specs.push_back(spec_to_json(s));
    return {
        {"series", series},
        {"lti",
         {{"woonquote", c.lti.woonquote},
          {"deduction_rate", c.lti.deduction_rate},
          {"cost_rate", c.lti.cost_rate},
          {"term_months", c.lti.term_months}}},
        {"features",
         {{"smoothing_window", c.features.smoothing_window},
          {"anchor_quarter", c.anchor_quarter},
          {"interest_only_zero_from",
           c.features.interest_only_zero_from ? json(c.features.interest_only_zero_from->to_string()) : json(nullptr)}}},
        {"split", {{"cutoff", c.split.cutoff.to_string()}}},
        {"ecm_forecast", c.ecm_forecast == regress::ForecastMode::dynamic ? "dynamic" : "static"},
        {"lags", std::to_string(c.lags.lo) + ".." + std::to_string(c.lags.hi)},
        {"grid", c.grid},
        {"specs", specs},
        {"output_dir", c.output_dir},
    };
}

inline RunConfig from_json(const json& j, std::filesystem::path base_dir = ".") {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    c.base_dir = std::move(base_dir);
    try {
        if (j.contains("series")) {
            for (const auto& [name, s] : j["series"].items()) {
                SeriesSource src;
                src.path = detail::get_or<std::string>(s, "path", "");
                src.yearly_path = detail::get_or<std::string>(s, "yearly_path", "");
                src.unit = parse_source_unit(detail::get_or<std::string>(s, "unit", "dimensionless"));
                const auto fill = detail::get_or<std::string>(s, "yearly_fill", "interpolate");
                if (fill != "interpolate" && fill != "anchor_only") throw ConfigError("unknown yearly_fill '" + fill + "'");
                src.interpolate_yearly = fill == "interpolate";
                if (src.path.empty() && src.yearly_path.empty()) {
                    throw ConfigError("series '" + name + "' needs a path or a yearly_path");
                }
                c.series.emplace_back(name, std::move(src));
            }
        }
        if (j.contains("lti")) {
            const auto& l = j["lti"];
            c.lti.woonquote = detail::get_or(l, "woonquote", c.lti.woonquote);
            c.lti.deduction_rate = detail::get_or(l, "deduction_rate", c.lti.deduction_rate);
            c.lti.cost_rate = detail::get_or(l, "cost_rate", c.lti.cost_rate);
            c.lti.term_months = detail::get_or(l, "term_months", c.lti.term_months);
        }
        if (j.contains("features")) {
            const auto& f = j["features"];
            c.features.smoothing_window = detail::get_or(f, "smoothing_window", c.features.smoothing_window);
            c.anchor_quarter = detail::get_or(f, "anchor_quarter", c.anchor_quarter);
            const auto zero_from = detail::get_or<std::string>(f, "interest_only_zero_from", "");
            if (!zero_from.empty()) c.features.interest_only_zero_from = parse_quarter(zero_from);
        }
        if (j.contains("split")) c.split.cutoff = parse_quarter(detail::get_or<std::string>(j["split"], "cutoff", "2008Q2"));
        const auto mode = detail::get_or<std::string>(j, "ecm_forecast", "dynamic");
        if (mode != "dynamic" && mode != "static") throw ConfigError("ecm_forecast must be dynamic or static");
        c.ecm_forecast = mode == "dynamic" ? regress::ForecastMode::dynamic : regress::ForecastMode::static_;
        if (j.contains("lags")) c.lags = parse_lag_range(detail::get_or<std::string>(j, "lags", "0..6"));
        c.grid = detail::get_or(j, "grid", c.grid);
        if (j.contains("specs")) {
            for (const auto& s : j["specs"]) c.custom_specs.push_back(spec_from_json(s));
        }
        c.output_dir = detail::get_or<std::string>(j, "output_dir", c.output_dir);
    } catch (const ParseError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (c.anchor_quarter < 1 || c.anchor_quarter > 4) throw ConfigError("anchor_quarter must be in 1..4");
    if (c.features.smoothing_window < 1) throw ConfigError("smoothing_window must be >= 1");
    try {
        c.lti.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("lti: ") + e.what());
    }
    return c;
}

inline RunConfig load(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(csv::read_file(path.string()));
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    auto base = path.parent_path();
    return from_json(j, base.empty() ? std::filesystem::path(".") : base);
}

/// Every referenced input file must exist.
inline void validate_paths(const RunConfig& c) {
    for (const auto& [name, src] : c.series) {
        for (const auto* p : {&src.path, &src.yearly_path}) {
            if (!p->empty() && !std::filesystem::exists(c.resolve(*p))) {
                throw ConfigError("series '" + name + "': file '" + c.resolve(*p).string() + "' does not exist");
            }
        }
    }
}

/// Model specs selected by the grid names plus any custom specs.
inline std::vector<backtest::ModelSpec> selected_specs(const RunConfig& c) {
    const auto cols = c.features.columns;
    std::vector<backtest::ModelSpec> out;
    for (const auto& g : c.grid) {
        std::vector<backtest::ModelSpec> pool =
            g == "benchmark_debt_gdp" ? backtest::debt_gdp_specs("debt_gdp", cols) : backtest::default_specs(cols);
        bool found = false;
        for (auto& s : pool) {
            if (s.group == g) {
                out.push_back(std::move(s));
                found = true;
            }
        }
        if (!found) throw ConfigError("unknown grid entry '" + g + "'");
    }
    out.insert(out.end(), c.custom_specs.begin(), c.custom_specs.end());
    backtest::validate_specs(out);
    return out;
}

/// 64-bit FNV-1a of the canonical JSON; names the run directory.
inline std::string config_hash(const RunConfig& c) {
    const auto text = to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::filesystem::path run_dir(const RunConfig& c) {
    return c.resolve(c.output_dir) / ("run-" + config_hash(c));
}

}  // namespace hlc::config

#endif  // HLC_CONFIG_HPP
