#ifndef HLC_QUARTER_HPP
#define HLC_QUARTER_HPP

#include <charconv>
#include <compare>
#include <string>
#include <string_view>

#include "hlc/error.hpp"

namespace hlc {

/// A calendar quarter. Ordered lexicographically by (year, quarter).
class QuarterIndex {
public:
    constexpr QuarterIndex() = default;

    constexpr QuarterIndex(int year, int quarter) : year_(year), quarter_(quarter) {
        if (quarter < 1 || quarter > 4) {
            throw DomainError("quarter must be in 1..4, got " + std::to_string(quarter));
        }
    }

    /// Inverse of ordinal().
    static constexpr QuarterIndex from_ordinal(long ordinal) {
        long year = ordinal >= 0 ? ordinal / 4 : (ordinal - 3) / 4;
        return QuarterIndex(static_cast<int>(year), static_cast<int>(ordinal - year * 4) + 1);
    }

    constexpr int year() const noexcept { return year_; }
    constexpr int quarter() const noexcept { return quarter_; }

    /// Quarters since year 0 Q1; differences of ordinals count quarters.
    constexpr long ordinal() const noexcept { return static_cast<long>(year_) * 4 + (quarter_ - 1); }

    constexpr QuarterIndex operator+(long quarters) const { return from_ordinal(ordinal() + quarters); }
    constexpr QuarterIndex operator-(long quarters) const { return from_ordinal(ordinal() - quarters); }
    constexpr long operator-(QuarterIndex other) const noexcept { return ordinal() - other.ordinal(); }

    constexpr QuarterIndex next() const { return *this + 1; }
    constexpr QuarterIndex prev() const { return *this - 1; }

    constexpr auto operator<=>(const QuarterIndex&) const = default;

    std::string to_string() const {
        return std::to_string(year_) + "Q" + std::to_string(quarter_);
    }

private:
    int year_ = 1970;
    int quarter_ = 1;
};

/// Accepts `YYYYQn` and `YYYY-Qn`.
inline QuarterIndex parse_quarter(std::string_view text) {
    auto fail = [&](const char* why) -> ParseError {
        return ParseError("malformed quarter '" + std::string(text) + "': " + why);
    };
    auto q = text.find_first_of("Qq");
    if (q == std::string_view::npos || q == 0 || q + 2 != text.size()) {
        throw fail("expected YYYYQn or YYYY-Qn");
    }
    auto year_part = text.substr(0, q);
    if (year_part.back() == '-') year_part.remove_suffix(1);
    if (year_part.size() != 4) throw fail("year must have 4 digits");

    int year = 0;
    auto [ptr, ec] = std::from_chars(year_part.data(), year_part.data() + year_part.size(), year);
    if (ec != std::errc{} || ptr != year_part.data() + year_part.size()) throw fail("bad year");

    char qc = text[q + 1];
    if (qc < '1' || qc > '4') throw fail("quarter out of range");
    return QuarterIndex(year, qc - '0');
}

}  // namespace hlc

#endif  // HLC_QUARTER_HPP
