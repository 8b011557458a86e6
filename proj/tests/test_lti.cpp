#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "hlc/lti.hpp"
#include "oracles.hpp"

namespace hlc::lti {
namespace {

TEST(AnnuityFactor, ZeroRateLimit) {
    EXPECT_EQ(annuity_factor(0.0, 360), 360.0);
    EXPECT_NEAR(annuity_factor(1e-12, 360), 360.0, 1e-6);
}

TEST(AnnuityFactor, MatchesAmortizationOracle) {
    // Frozen from a discounted-cash-flow sum.
    EXPECT_NEAR(annuity_factor(0.05), 186.2816170460759, 1e-9);
    EXPECT_NEAR(annuity_factor(0.12), 97.21833107906447, 1e-9);
    for (double x : {0.05, 0.12}) {
        EXPECT_LT(std::abs(oracle::amortization_residual(annuity_factor(x), x, 360)), 1e-9);
    }
}

TEST(AnnuityFactor, StrictlyDecreasingInRate) {
    double prev = annuity_factor(0.0);
    for (int i = 1; i <= 300; ++i) {
        const double f = annuity_factor(0.0005 * i);
        EXPECT_LT(f, prev);
        prev = f;
    }
}

TEST(AnnuityFactor, RejectsNegativeRate) {
    EXPECT_THROW(annuity_factor(-0.01), DomainError);
    EXPECT_THROW(annuity_factor(0.05, 0), DomainError);
}

TEST(MaxInterestOnly, ClosedForm) {
    LtiParams p{0.25, 0.0, 0.02, 360};
    EXPECT_DOUBLE_EQ(max_interest_only({10000.0, 0.08, 0.0}, p), 100000.0);
    // 4 * 17500 * 0.30 / (0.6 * 0.05 + 0.025) = 21000 / 0.055
    EXPECT_NEAR(max_interest_only({17500.0, 0.05, 0.0}, LtiParams{}), 381818.18181818182, 1e-6);
}

TEST(MaxInterestOnly, LinearInIncome) {
    const LtiParams p;
    for (double income : {5000.0, 12345.0, 20000.0}) {
        EXPECT_EQ(max_interest_only({2 * income, 0.04, 0.0}, p), 2 * max_interest_only({income, 0.04, 0.0}, p));
    }
}

TEST(MaxInterestOnly, PrimitiveFormWithoutDeductionOrCost) {
    // Annual housing budget over the bare interest rate.
    LtiParams p{0.30, 0.0, 0.0, 360};
    const double income = 15000.0;
    const double r = 0.045;
    EXPECT_DOUBLE_EQ(max_interest_only({income, r, 0.0}, p), 4.0 * income * 0.30 / r);
    EXPECT_THROW(max_interest_only({income, 0.0, 0.0}, p), DomainError);
}

TEST(MaxAnnuity, Examples) {
    LtiParams zero{0.30, 0.0, 0.0, 360};
    EXPECT_DOUBLE_EQ(max_annuity({12000.0, 0.0, 0.0}, zero), 120.0 * 12000.0 * 0.30);
    // 1750 * f(0.055), f frozen from the discounted-cash-flow oracle
    EXPECT_NEAR(max_annuity({17500.0, 0.05, 0.0}, LtiParams{}), 1750.0 * 176.1217631246162, 1e-6);
}

TEST(MaxAnnuity, BelowInterestOnlyForPositiveRates) {
    const LtiParams p;
    for (int i = 0; i <= 150; ++i) {
        const HouseholdInputs h{15000.0, 0.001 * i, 0.0};
        EXPECT_LT(max_annuity(h, p), max_interest_only(h, p)) << "r = " << h.interest_rate;
    }
}

TEST(Hlc, DegenerateWeights) {
    const LtiParams p;
    HouseholdInputs h{16000.0, 0.047, 0.0};
    EXPECT_EQ(hlc(h, p), max_annuity(h, p));
    h.interest_only_share = 1.0;
    EXPECT_EQ(hlc(h, p), max_interest_only(h, p));
    h.interest_only_share = 0.5;
    EXPECT_EQ(hlc(h, p), (max_annuity(h, p) + max_interest_only(h, p)) / 2.0);
    h.interest_only_share = 1.2;
    EXPECT_THROW(hlc(h, p), DomainError);
}

TEST(Hlc, MonotoneInRateAndIncome) {
    const LtiParams p;
    for (double m : {0.0, 0.3, 1.0}) {
        double prev = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 100; ++i) {
            const double v = hlc({15000.0, 0.001 * i, m}, p);
            EXPECT_LE(v, prev);
            prev = v;
        }
        prev = 0.0;
        for (int i = 1; i <= 100; ++i) {
            const double v = hlc({500.0 * i, 0.05, m}, p);
            EXPECT_GT(v, prev);
            prev = v;
        }
    }
}

TEST(HlcSeries, MissingPropagatesAndSchemaChecked) {
    auto f = align({QuarterlySeries("I", Unit::euros, {2000, 1}, {15000.0, 15100.0, std::nullopt}),
                    QuarterlySeries("r", Unit::fraction, {2000, 1}, {0.05, 0.05, 0.05}),
                    QuarterlySeries("m", Unit::fraction, {2000, 1}, {0.2, std::nullopt, 0.2})});
    auto s = hlc_series(f, LtiParams{});
    EXPECT_EQ(s.unit(), Unit::euros);
    EXPECT_DOUBLE_EQ(*s[0], hlc({15000.0, 0.05, 0.2}, LtiParams{}));
    EXPECT_FALSE(s[1].has_value());
    EXPECT_FALSE(s[2].has_value());

    auto missing = align({QuarterlySeries("I", Unit::euros, {2000, 1}, {1.0})});
    EXPECT_THROW(hlc_series(missing, LtiParams{}), DataError);
}

TEST(Params, Validation) {
    EXPECT_NO_THROW(LtiParams{}.validate());
    EXPECT_THROW((LtiParams{1.0, 0.4, 0.025, 360}.validate()), DomainError);
    EXPECT_THROW((LtiParams{0.3, 1.0, 0.025, 360}.validate()), DomainError);
    EXPECT_THROW((LtiParams{0.3, 0.4, -0.1, 360}.validate()), DomainError);
    EXPECT_THROW((LtiParams{0.3, 0.4, 0.025, 0}.validate()), DomainError);
}

TEST(InterestOnlyShare, WorkedExample) {
    // 5% movers, stock share up 2.5 points from 40%: half the movers switched,
    // the other half renew pro rata (0.5 * 0.4), 70% of new mortgages.
    EXPECT_DOUBLE_EQ(new_mortgage_interest_only_share(0.05, 0.025, 0.40), 0.70);
}

TEST(InterestOnlyShare, NoSwitchingKeepsStockShare) {
    for (double s : {0.0, 0.17, 0.4, 1.0}) EXPECT_EQ(new_mortgage_interest_only_share(0.05, 0.0, s), s);
}

TEST(InterestOnlyShare, ClampsAtFullSwitch) {
    EXPECT_EQ(new_mortgage_interest_only_share(0.10, 0.10, 0.0), 1.0);
    EXPECT_EQ(new_mortgage_interest_only_share(0.10, 0.30, 0.2), 1.0);
}

TEST(InterestOnlyShare, DecliningStockFloorsAtZero) {
    EXPECT_DOUBLE_EQ(new_mortgage_interest_only_share(0.05, -0.01, 0.40), 0.20);
    EXPECT_EQ(new_mortgage_interest_only_share(0.05, -0.04, 0.40), 0.0);
}

TEST(InterestOnlyShare, NoMoversIsInconsistentWithChange) {
    EXPECT_THROW(new_mortgage_interest_only_share(0.0, 0.01, 0.4), DataError);
    EXPECT_EQ(new_mortgage_interest_only_share(0.0, 0.0, 0.4), 0.4);
}

TEST(InterestOnlyShare, SeriesFormStaysInUnitInterval) {
    std::vector<Observation> stock, tx, hh;
    double s = 0.1;
    for (int t = 0; t < 60; ++t) {
        s = std::clamp(s + 0.02 * std::sin(0.3 * t), 0.0, 1.0);
        stock.push_back(s);
        tx.push_back(300.0 + 50.0 * std::cos(0.2 * t));
        hh.push_back(7000.0);
    }
    auto m = derive_interest_only_share(QuarterlySeries("st", Unit::fraction, {1995, 1}, stock),
                                        QuarterlySeries("tx", Unit::dimensionless, {1995, 1}, tx),
                                        QuarterlySeries("hh", Unit::dimensionless, {1995, 1}, hh));
    EXPECT_FALSE(m[0].has_value());
    for (std::size_t t = 1; t < m.size(); ++t) {
        ASSERT_TRUE(m[t].has_value());
        EXPECT_GE(*m[t], 0.0);
        EXPECT_LE(*m[t], 1.0);
    }
}

TEST(InterestOnlyShare, SeriesRejectsMoreTransactionsThanHouseholds) {
    auto one = [](std::vector<Observation> v) { return QuarterlySeries("x", Unit::dimensionless, {1995, 1}, v); };
    EXPECT_THROW(derive_interest_only_share(one({0.1, 0.2}), one({10.0, 200.0}), one({100.0, 100.0})), DataError);
}

}  // namespace
}  // namespace hlc::lti
