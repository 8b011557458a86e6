#ifndef HLC_SERIES_HPP
#define HLC_SERIES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hlc/error.hpp"
#include "hlc/quarter.hpp"

namespace hlc {

/// Unit a series' values are expressed in. Rates and LTV are stored as
/// fractions (0.0538, not 5.38); currency in euros.
enum class Unit { euros, fraction, dimensionless };

inline std::string_view to_string(Unit unit) {
    switch (unit) {
        case Unit::euros: return "euros";
        case Unit::fraction: return "fraction";
        case Unit::dimensionless: return "dimensionless";
    }
    return "dimensionless";
}

using Observation = std::optional<double>;

/// Contiguous quarterly observations starting at `start`. Gaps are explicit
/// empty optionals, never skipped indices.
class QuarterlySeries {
public:
    QuarterlySeries() = default;

    QuarterlySeries(std::string name, Unit unit, QuarterIndex start, std::vector<Observation> values)
        : name_(std::move(name)), unit_(unit), start_(start), values_(std::move(values)) {}

    const std::string& name() const noexcept { return name_; }
    Unit unit() const noexcept { return unit_; }
    QuarterIndex start() const noexcept { return start_; }
    /// Last quarter covered; only meaningful when !empty().
    QuarterIndex last() const { return start_ + static_cast<long>(values_.size()) - 1; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    std::span<const Observation> values() const noexcept { return values_; }

    const Observation& operator[](std::size_t i) const { return values_[i]; }

    bool covers(QuarterIndex q) const noexcept {
        return !values_.empty() && q >= start_ && q <= last();
    }

    /// Value at `q`, or empty when `q` is outside the series or missing.
    Observation at(QuarterIndex q) const {
        if (!covers(q)) return std::nullopt;
        return values_[static_cast<std::size_t>(q - start_)];
    }

    std::size_t count_present() const {
        return static_cast<std::size_t>(
            std::count_if(values_.begin(), values_.end(), [](const Observation& v) { return v.has_value(); }));
    }

    std::optional<QuarterIndex> first_present() const {
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (values_[i]) return start_ + static_cast<long>(i);
        }
        return std::nullopt;
    }

    std::optional<QuarterIndex> last_present() const {
        for (std::size_t i = values_.size(); i-- > 0;) {
            if (values_[i]) return start_ + static_cast<long>(i);
        }
        return std::nullopt;
    }

    QuarterlySeries renamed(std::string name) const {
        return QuarterlySeries(std::move(name), unit_, start_, values_);
    }

    /// Same data over [start, start + length); quarters outside the source are missing.
    QuarterlySeries reindexed(QuarterIndex start, std::size_t length) const {
        std::vector<Observation> out(length);
        for (std::size_t i = 0; i < length; ++i) out[i] = at(start + static_cast<long>(i));
        return QuarterlySeries(name_, unit_, start, std::move(out));
    }

    bool operator==(const QuarterlySeries&) const = default;

private:
    std::string name_;
    Unit unit_ = Unit::dimensionless;
    QuarterIndex start_;
    std::vector<Observation> values_;
};

// ---------------------------------------------------------------------------
// Transforms. Each returns a new series and carries the unit through.
// ---------------------------------------------------------------------------

/// Linear interpolation of yearly values placed at `anchor_quarter` of each year.
/// Quarters outside the first and last anchor are missing.
inline QuarterlySeries interpolate_yearly_to_quarterly(const std::map<int, double>& yearly,
                                                       int anchor_quarter = 4,
                                                       std::string name = "yearly",
                                                       Unit unit = Unit::dimensionless) {
    if (anchor_quarter < 1 || anchor_quarter > 4) {
        throw DomainError("anchor quarter must be in 1..4, got " + std::to_string(anchor_quarter));
    }
    if (yearly.size() < 2) {
        throw DataError("interpolation of '" + name + "' needs at least 2 yearly values, got " +
                        std::to_string(yearly.size()));
    }
    const QuarterIndex start(yearly.begin()->first, anchor_quarter);
    const QuarterIndex end(yearly.rbegin()->first, anchor_quarter);
    std::vector<Observation> values(static_cast<std::size_t>(end - start) + 1);

    for (auto it = yearly.begin(), nx = std::next(it); nx != yearly.end(); ++it, ++nx) {
        const QuarterIndex a(it->first, anchor_quarter);
        const long span = QuarterIndex(nx->first, anchor_quarter) - a;
        const double lo = it->second;
        const double hi = nx->second;
        const auto offset = static_cast<std::size_t>(a - start);
        values[offset] = lo;
        for (long k = 1; k < span; ++k) {
            values[offset + static_cast<std::size_t>(k)] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(span);
        }
    }
    values.back() = yearly.rbegin()->second;
    return QuarterlySeries(std::move(name), unit, start, std::move(values));
}

/// Mean of the last `window` quarters; missing during warm-up and whenever the
/// window contains a missing value.
inline QuarterlySeries trailing_mean(const QuarterlySeries& s, int window) {
    if (window < 1) throw DomainError("trailing_mean window must be >= 1, got " + std::to_string(window));
    const auto w = static_cast<std::size_t>(window);
    std::vector<Observation> out(s.size());
    for (std::size_t t = w - 1; t < s.size(); ++t) {
        double sum = 0.0;
        bool complete = true;
        for (std::size_t j = t + 1 - w; j <= t; ++j) {
            if (!s[j]) {
                complete = false;
                break;
            }
            sum += *s[j];
        }
        if (complete) out[t] = sum / static_cast<double>(w);
    }
    return QuarterlySeries(s.name(), s.unit(), s.start(), std::move(out));
}

/// Replaces each missing value with the most recent present one.
inline QuarterlySeries forward_fill(const QuarterlySeries& s) {
    if (s.empty()) return s;
    if (!s[0]) {
        throw DataError("forward_fill of '" + s.name() + "': first observation (" + s.start().to_string() +
                        ") is missing, nothing to fill from");
    }
    std::vector<Observation> out(s.values().begin(), s.values().end());
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (!out[i]) out[i] = out[i - 1];
    }
    return QuarterlySeries(s.name(), s.unit(), s.start(), std::move(out));
}

/// Value at t is s[t-k]. Keeps the index range; the first k positions become missing.
inline QuarterlySeries lag(const QuarterlySeries& s, int k) {
    if (k < 0) throw DomainError("lag must be >= 0, got " + std::to_string(k));
    std::vector<Observation> out(s.size());
    for (std::size_t t = static_cast<std::size_t>(k); t < s.size(); ++t) out[t] = s[t - static_cast<std::size_t>(k)];
    return QuarterlySeries(s.name(), s.unit(), s.start(), std::move(out));
}

/// First difference s[t] - s[t-1].
inline QuarterlySeries diff(const QuarterlySeries& s) {
    std::vector<Observation> out(s.size());
    for (std::size_t t = 1; t < s.size(); ++t) {
        if (s[t] && s[t - 1]) out[t] = *s[t] - *s[t - 1];
    }
    return QuarterlySeries(s.name(), s.unit(), s.start(), std::move(out));
}

/// Elementwise op over the union of both ranges; missing where either side is.
inline QuarterlySeries zip_with(const QuarterlySeries& a, const QuarterlySeries& b,
                                const std::function<double(double, double)>& op, std::string name, Unit unit) {
    if (a.empty() || b.empty()) return QuarterlySeries(std::move(name), unit, a.start(), {});
    const QuarterIndex start = std::min(a.start(), b.start());
    const QuarterIndex end = std::max(a.last(), b.last());
    std::vector<Observation> out(static_cast<std::size_t>(end - start) + 1);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const QuarterIndex q = start + static_cast<long>(i);
        auto x = a.at(q);
        auto y = b.at(q);
        if (x && y) out[i] = op(*x, *y);
    }
    return QuarterlySeries(std::move(name), unit, start, std::move(out));
}

/// Values from quarter `from` onward (inclusive) replaced by `value`.
inline QuarterlySeries override_from(const QuarterlySeries& s, QuarterIndex from, double value) {
    std::vector<Observation> out(s.values().begin(), s.values().end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (s.start() + static_cast<long>(i) >= from) out[i] = value;
    }
    return QuarterlySeries(s.name(), s.unit(), s.start(), std::move(out));
}

// ---------------------------------------------------------------------------
// Frame
// ---------------------------------------------------------------------------

/// Named series sharing one index range.
class Frame {
public:
    Frame() = default;

    QuarterIndex start() const noexcept { return start_; }
    QuarterIndex last() const { return start_ + static_cast<long>(length_) - 1; }
    std::size_t rows() const noexcept { return length_; }
    QuarterIndex quarter(std::size_t row) const { return start_ + static_cast<long>(row); }

    const std::vector<QuarterlySeries>& columns() const noexcept { return columns_; }

    std::vector<std::string> column_names() const {
        std::vector<std::string> names;
        names.reserve(columns_.size());
        for (const auto& c : columns_) names.push_back(c.name());
        return names;
    }

    bool has(std::string_view name) const {
        return std::any_of(columns_.begin(), columns_.end(), [&](const auto& c) { return c.name() == name; });
    }

    const QuarterlySeries& column(std::string_view name) const {
        for (const auto& c : columns_) {
            if (c.name() == name) return c;
        }
        throw DataError("frame has no column '" + std::string(name) + "'");
    }

    /// Adds or replaces a column, restricted to the frame's index range.
    Frame with_column(const QuarterlySeries& s) const {
        Frame out = *this;
        auto aligned = s.reindexed(start_, length_);
        for (auto& c : out.columns_) {
            if (c.name() == s.name()) {
                c = std::move(aligned);
                return out;
            }
        }
        out.columns_.push_back(std::move(aligned));
        return out;
    }

    /// Longest contiguous run of rows where every column is present.
    std::optional<std::pair<QuarterIndex, QuarterIndex>> complete_range() const {
        std::optional<std::pair<QuarterIndex, QuarterIndex>> best;
        std::size_t best_len = 0;
        std::size_t run_start = 0;
        for (std::size_t r = 0; r <= length_; ++r) {
            const bool ok = r < length_ && std::all_of(columns_.begin(), columns_.end(),
                                                       [&](const auto& c) { return c[r].has_value(); });
            if (ok) continue;
            const std::size_t len = r - run_start;
            if (len > best_len) {
                best_len = len;
                best = std::make_pair(quarter(run_start), quarter(r - 1));
            }
            run_start = r + 1;
        }
        return best;
    }

    bool operator==(const Frame&) const = default;

    friend Frame align(std::span<const QuarterlySeries> columns);

private:
    QuarterIndex start_;
    std::size_t length_ = 0;
    std::vector<QuarterlySeries> columns_;
};

/// Aligns series over the union of their index ranges.
inline Frame align(std::span<const QuarterlySeries> columns) {
    if (columns.empty()) throw DataError("align needs at least one column");
    for (std::size_t i = 0; i < columns.size(); ++i) {
        for (std::size_t j = i + 1; j < columns.size(); ++j) {
            if (columns[i].name() == columns[j].name()) {
                throw DataError("duplicate column name '" + columns[i].name() + "'");
            }
        }
    }
    std::optional<QuarterIndex> lo;
    std::optional<QuarterIndex> hi;
    for (const auto& c : columns) {
        if (c.empty()) continue;
        lo = lo ? std::min(*lo, c.start()) : c.start();
        hi = hi ? std::max(*hi, c.last()) : c.last();
    }
    Frame f;
    if (!lo) {
        f.start_ = columns.front().start();
        f.length_ = 0;
    } else {
        f.start_ = *lo;
        f.length_ = static_cast<std::size_t>(*hi - *lo) + 1;
    }
    for (const auto& c : columns) f.columns_.push_back(c.reindexed(f.start_, f.length_));
    return f;
}

inline Frame align(std::initializer_list<QuarterlySeries> columns) {
    return align(std::span<const QuarterlySeries>(columns.begin(), columns.size()));
}

// ---------------------------------------------------------------------------
// Summary statistics, in the layout of a descriptive-statistics table.
// ---------------------------------------------------------------------------

struct SummaryStats {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;  // sample (n - 1) standard deviation
    double min = 0.0;
    double p25 = 0.0;
    double p75 = 0.0;
    double max = 0.0;
};

/// Quantile with linear interpolation between order statistics (R type 7).
inline double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) return std::nan("");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline SummaryStats summarize(const QuarterlySeries& s) {
    std::vector<double> xs;
    for (const auto& v : s.values()) {
        if (v) xs.push_back(*v);
    }
    SummaryStats out;
    out.n = xs.size();
    if (xs.empty()) return out;
    std::sort(xs.begin(), xs.end());
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    out.min = xs.front();
    out.max = xs.back();
    out.p25 = quantile_sorted(xs, 0.25);
    out.p75 = quantile_sorted(xs, 0.75);
    return out;
}

}  // namespace hlc

#endif  // HLC_SERIES_HPP
