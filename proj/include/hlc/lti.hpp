#ifndef HLC_LTI_HPP
#define HLC_LTI_HPP

// Loan-to-income formulas: the maximum mortgage a lender grants the average
// household under an interest-only and under an annuity product, and the
// market-share-weighted household lending capacity (HLC).
//
// Income is quarterly throughout. The interest-only formula annualises it
// (x4); the annuity formula works on the monthly budget (/3).

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "hlc/error.hpp"
#include "hlc/series.hpp"

namespace hlc::lti {

struct LtiParams {
    double woonquote = 0.30;       ///< share of income a lender assumes goes to housing costs
    double deduction_rate = 0.40;  ///< marginal tax rate at which mortgage interest is deductible
    double cost_rate = 0.025;      ///< other yearly housing costs as a fraction of the home value
    int term_months = 360;

    void validate() const {
        if (!(woonquote > 0.0 && woonquote < 1.0)) throw DomainError("woonquote must be in (0,1)");
        if (!(deduction_rate >= 0.0 && deduction_rate < 1.0)) throw DomainError("deduction_rate must be in [0,1)");
        if (!(cost_rate >= 0.0 && cost_rate < 1.0)) throw DomainError("cost_rate must be in [0,1)");
        if (term_months <= 0) throw DomainError("term_months must be positive");
    }

    bool operator==(const LtiParams&) const = default;
};

struct HouseholdInputs {
    double quarterly_income = 0.0;     ///< euros per quarter
    double interest_rate = 0.0;        ///< annual nominal, as a fraction
    double interest_only_share = 0.0;  ///< market share of interest-only products among new mortgages

    void validate() const {
        if (!(quarterly_income > 0.0)) throw DomainError("quarterly income must be positive");
        if (!(interest_rate >= 0.0)) throw DomainError("interest rate must be non-negative");
        if (!(interest_only_share >= 0.0 && interest_only_share <= 1.0)) {
            throw DomainError("interest-only share must be in [0,1]");
        }
    }
};

/// Yearly carrying cost per euro of mortgage after the interest deduction.
inline double effective_rate(double interest_rate, const LtiParams& p) {
    return (1.0 - p.deduction_rate) * interest_rate + p.cost_rate;
}

/// Present value of a unit monthly payment over `term_months` at annual rate `x`:
/// (1 - (1 + x/12)^-n) / (x/12), with limit n at x = 0.
inline double annuity_factor(double x, int term_months = 360) {
    if (term_months <= 0) throw DomainError("term_months must be positive");
    if (!(x >= 0.0)) throw DomainError("annuity_factor needs a non-negative rate, got " + std::to_string(x));
    if (x == 0.0) return static_cast<double>(term_months);
    const double monthly = x / 12.0;
    return -std::expm1(-static_cast<double>(term_months) * std::log1p(monthly)) / monthly;
}

inline double max_interest_only(const HouseholdInputs& h, const LtiParams& p) {
    const double rate = effective_rate(h.interest_rate, p);
    if (!(rate > 0.0)) throw DomainError("effective rate must be positive for an interest-only maximum");
    return 4.0 * h.quarterly_income * p.woonquote / rate;
}

inline double max_annuity(const HouseholdInputs& h, const LtiParams& p) {
    return h.quarterly_income / 3.0 * p.woonquote * annuity_factor(effective_rate(h.interest_rate, p), p.term_months);
}

/// Interest-only and annuity maxima weighted by the interest-only share.
inline double hlc(const HouseholdInputs& h, const LtiParams& p) {
    const double m = h.interest_only_share;
    if (!(m >= 0.0 && m <= 1.0)) throw DomainError("interest-only share must be in [0,1]");
    return m * max_interest_only(h, p) + (1.0 - m) * max_annuity(h, p);
}

struct HlcColumns {
    std::string income = "I";
    std::string rate = "r";
    std::string share = "m";
};

/// Per-quarter HLC over a frame; missing wherever an input is missing.
inline QuarterlySeries hlc_series(const Frame& frame, const LtiParams& p, const HlcColumns& cols = {},
                                  std::string name = "HLC") {
    p.validate();
    const auto& income = frame.column(cols.income);
    const auto& rate = frame.column(cols.rate);
    const auto& share = frame.column(cols.share);
    std::vector<Observation> out(frame.rows());
    for (std::size_t t = 0; t < frame.rows(); ++t) {
        if (!income[t] || !rate[t] || !share[t]) continue;
        HouseholdInputs h{*income[t], *rate[t], *share[t]};
        try {
            h.validate();
        } catch (const DomainError& e) {
            throw DomainError(frame.quarter(t).to_string() + ": " + e.what());
        }
        out[t] = hlc(h, p);
    }
    return QuarterlySeries(std::move(name), Unit::euros, frame.start(), std::move(out));
}

// ---------------------------------------------------------------------------
// Interest-only share of new mortgages, derived from the share in the stock.
// ---------------------------------------------------------------------------

/// Share of new mortgages that are interest-only in a period where a fraction
/// `mover_share` of households took a new mortgage and the stock share moved
/// by `delta_stock` from `prior_stock`.
///
/// Growth in the stock is attributed to movers switching into the product;
/// the remaining movers renew what they had, pro rata to the prior stock.
/// A shrinking stock is read as movers leaving the product, floored at 0.
inline double new_mortgage_interest_only_share(double mover_share, double delta_stock, double prior_stock) {
    if (mover_share == 0.0) {
        if (delta_stock != 0.0) throw DataError("stock share changed with no movers");
        return std::clamp(prior_stock, 0.0, 1.0);
    }
    if (!(mover_share > 0.0 && mover_share <= 1.0)) throw DataError("mover share must be in (0,1]");
    const double switched = delta_stock / mover_share;
    if (switched >= 0.0) {
        const double switch_share = std::min(switched, 1.0);
        return std::clamp(switch_share + (1.0 - switch_share) * prior_stock, 0.0, 1.0);
    }
    return std::clamp(prior_stock + switched, 0.0, 1.0);
}

/// Series form: mover share = transactions / households, delta from the
/// previous quarter's stock share. The first quarter has no delta and is missing.
inline QuarterlySeries derive_interest_only_share(const QuarterlySeries& stock_share,
                                                  const QuarterlySeries& transactions,
                                                  const QuarterlySeries& households, std::string name = "m") {
    auto f = align({stock_share.renamed("stock"), transactions.renamed("tx"), households.renamed("hh")});
    const auto& s = f.column("stock");
    const auto& tx = f.column("tx");
    const auto& hh = f.column("hh");
    std::vector<Observation> out(f.rows());
    for (std::size_t t = 1; t < f.rows(); ++t) {
        if (!s[t] || !s[t - 1] || !tx[t] || !hh[t]) continue;
        const auto q = f.quarter(t).to_string();
        if (!(*hh[t] > 0.0)) throw DataError(q + ": household count must be positive");
        if (*tx[t] < 0.0 || *tx[t] > *hh[t]) throw DataError(q + ": transactions must be in [0, households]");
        if (*s[t] < 0.0 || *s[t] > 1.0 || *s[t - 1] < 0.0 || *s[t - 1] > 1.0) {
            throw DataError(q + ": stock share must be in [0,1]");
        }
        try {
            out[t] = new_mortgage_interest_only_share(*tx[t] / *hh[t], *s[t] - *s[t - 1], *s[t - 1]);
        } catch (const DataError& e) {
            throw DataError(q + ": " + e.what());
        }
    }
    return QuarterlySeries(std::move(name), Unit::fraction, f.start(), std::move(out));
}

}  // namespace hlc::lti

#endif  // HLC_LTI_HPP
