#include "credcurve/cashflow.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "support.hpp"

namespace credcurve {
namespace {

BondInstrument make_bond(Date issue, Date maturity, double rate, int freq, double face = 100.0) {
    BondInstrument b;
    b.bond_id = "B1";
    b.issuer_id = "ISS";
    b.issue_date = issue;
    b.maturity_date = maturity;
    b.coupon_rate = rate;
    b.coupon_freq = freq;
    b.face = face;
    return b;
}

TEST(Schedule, SemiannualTwoYears) {
    const auto bond = make_bond(Date::from_ymd(2022, 3, 15), Date::from_ymd(2026, 3, 15), 0.05, 2, 1000.0);
    const auto cf = generate_schedule(bond, Date::from_ymd(2024, 3, 15));
    ASSERT_EQ(cf.size(), 4u);
    const std::vector<double> times{0.5, 1.0, 1.5, 2.0};
    const std::vector<double> amounts{25, 25, 25, 1025};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(cf.times[i], times[i], 3.0 / 365.0);
        EXPECT_DOUBLE_EQ(cf.amounts[i], amounts[i]);
    }
}

TEST(Schedule, ZeroCoupon) {
    const auto bond = make_bond(Date::from_ymd(2020, 6, 1), Date::from_ymd(2029, 6, 1), 0.0, 0);
    const auto cf = generate_schedule(bond, Date::from_ymd(2024, 6, 1));
    ASSERT_EQ(cf.size(), 1u);
    EXPECT_NEAR(cf.times[0], 5.0, 2.0 / 365.0);
    EXPECT_DOUBLE_EQ(cf.amounts[0], 100.0);
}

TEST(Schedule, AnnualThreeYears) {
    const auto bond = make_bond(Date::from_ymd(2021, 9, 30), Date::from_ymd(2027, 9, 30), 0.10, 1);
    const auto cf = generate_schedule(bond, Date::from_ymd(2024, 9, 30));
    ASSERT_EQ(cf.size(), 3u);
    EXPECT_DOUBLE_EQ(cf.amounts[0], 10.0);
    EXPECT_DOUBLE_EQ(cf.amounts[1], 10.0);
    EXPECT_DOUBLE_EQ(cf.amounts[2], 110.0);
    EXPECT_NEAR(cf.times[2], 3.0, 2.0 / 365.0);
}

TEST(Schedule, PastPaymentsDropped) {
    const auto bond = make_bond(Date::from_ymd(2020, 1, 15), Date::from_ymd(2025, 1, 15), 0.04, 2);
    const auto cf = generate_schedule(bond, Date::from_ymd(2024, 1, 15));
    ASSERT_EQ(cf.size(), 2u);
    for (double t : cf.times) EXPECT_GT(t, 0.0);
}

TEST(Schedule, RejectsNonVanilla) {
    auto bond = make_bond(Date::from_ymd(2020, 1, 1), Date::from_ymd(2030, 1, 1), 0.05, 2);
    bond.flags.callable = true;
    EXPECT_ERROR_CODE(generate_schedule(bond, Date::from_ymd(2024, 1, 1)), ErrorCode::rejected_instrument);
    bond.flags.callable = false;
    bond.flags.senior = false;
    EXPECT_ERROR_CODE(generate_schedule(bond, Date::from_ymd(2024, 1, 1)), ErrorCode::rejected_instrument);
}

TEST(Schedule, RejectsMatured) {
    const auto bond = make_bond(Date::from_ymd(2020, 1, 1), Date::from_ymd(2024, 1, 1), 0.05, 2);
    EXPECT_ERROR_CODE(generate_schedule(bond, Date::from_ymd(2024, 1, 1)), ErrorCode::matured_instrument);
    EXPECT_ERROR_CODE(generate_schedule(bond, Date::from_ymd(2025, 1, 1)), ErrorCode::matured_instrument);
}

TEST(Schedule, InvalidInstrument) {
    auto bond = make_bond(Date::from_ymd(2024, 1, 1), Date::from_ymd(2023, 1, 1), 0.05, 2);
    EXPECT_ERROR_CODE(bond.validate(), ErrorCode::domain);
    bond = make_bond(Date::from_ymd(2020, 1, 1), Date::from_ymd(2030, 1, 1), -0.01, 2);
    EXPECT_ERROR_CODE(bond.validate(), ErrorCode::domain);
    bond = make_bond(Date::from_ymd(2020, 1, 1), Date::from_ymd(2030, 1, 1), 0.05, 2, 0.0);
    EXPECT_ERROR_CODE(bond.validate(), ErrorCode::domain);
}

TEST(Schedule, RandomScheduleShape) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> day(0, 20000), len(2, 360), pick(0, 3);
    const int freqs[] = {1, 2, 4, 12};
    for (int trial = 0; trial < 500; ++trial) {
        const Date issue = Date::from_serial(day(rng));
        const int months = len(rng);
        const int freq = freqs[pick(rng)];
        const auto bond = make_bond(issue, issue.add_months(months), 0.06, freq);
        const Date val = issue.add_days(std::uniform_int_distribution<int>(0, (bond.maturity_date - issue) - 1)(rng));
        const auto cf = generate_schedule(bond, val);
        const double years = year_fraction(val, bond.maturity_date);
        const double n = static_cast<double>(cf.size());
        const double slack = 0.15 + 0.001 * years * freq;
        EXPECT_GT(n, years * freq - slack);
        EXPECT_LT(n - 1.0, years * freq + slack);
        EXPECT_NEAR(cf.final_time(), years, 1.0 / 365.0);
        EXPECT_DOUBLE_EQ(cf.amounts.back(), 100.0 + 6.0 / freq);
        for (std::size_t i = 0; i < cf.size(); ++i) {
            EXPECT_GT(cf.times[i], 0.0);
            EXPECT_GT(cf.amounts[i], 0.0);
            if (i > 0) { EXPECT_GT(cf.times[i], cf.times[i - 1]); }
        }
    }
}

TEST(Accrued, PaperLiteral) {
    EXPECT_DOUBLE_EQ(accrued_interest(25, 0.25, 0.5), 12.5);
    EXPECT_DOUBLE_EQ(accrued_interest(25, 0.0, 0.5, AccrualConvention::paper_literal), 0.0);
    EXPECT_DOUBLE_EQ(accrued_interest(25, 0.1, 0.5, AccrualConvention::paper_literal), 5.0);
}

TEST(Accrued, ElapsedFraction) {
    EXPECT_DOUBLE_EQ(accrued_interest(25, 0.25, 0.5, AccrualConvention::elapsed_fraction), 12.5);
    EXPECT_DOUBLE_EQ(accrued_interest(25, 0.0, 0.5, AccrualConvention::elapsed_fraction), 25.0);
    EXPECT_DOUBLE_EQ(accrued_interest(25, 0.1, 0.5, AccrualConvention::elapsed_fraction), 20.0);
}

TEST(Accrued, DomainErrors) {
    EXPECT_ERROR_CODE(accrued_interest(25, 0.6, 0.5), ErrorCode::domain);
    EXPECT_ERROR_CODE(accrued_interest(-1, 0.1, 0.5), ErrorCode::domain);
    EXPECT_ERROR_CODE(accrued_interest(25, -0.1, 0.5), ErrorCode::domain);
    EXPECT_ERROR_CODE(accrued_interest(25, 0.0, 0.0), ErrorCode::domain);
}

TEST(Accrued, BoundedByCoupon) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double c = 50.0 * u(rng), tc = 0.01 + u(rng), tn = tc * u(rng);
        for (auto conv : {AccrualConvention::paper_literal, AccrualConvention::elapsed_fraction}) {
            const double a = accrued_interest(c, tn, tc, conv);
            EXPECT_GE(a, 0.0);
            EXPECT_LE(a, c);
        }
    }
}

TEST(Accrued, PerHundredFromBond) {
    const auto bond = make_bond(Date::from_ymd(2020, 1, 15), Date::from_ymd(2030, 1, 15), 0.05, 2, 1000.0);
    const Date val = Date::from_ymd(2024, 4, 15);
    const auto p = coupon_period(bond, val);
    EXPECT_DOUBLE_EQ(p.c_next, 25.0);
    EXPECT_NEAR(p.t_next, 91.0 / 365.0, 1e-12);
    EXPECT_NEAR(p.t_coupon, 182.0 / 365.0, 1e-12);
    EXPECT_NEAR(accrued_per_hundred(bond, val, AccrualConvention::paper_literal), 2.5 * 91.0 / 182.0, 1e-12);
    EXPECT_NEAR(accrued_per_hundred(bond, val, AccrualConvention::elapsed_fraction), 2.5 * 91.0 / 182.0, 1e-12);
    const auto zero = make_bond(Date::from_ymd(2020, 1, 15), Date::from_ymd(2030, 1, 15), 0.0, 0);
    EXPECT_EQ(accrued_per_hundred(zero, val, AccrualConvention::paper_literal), 0.0);
}

CashFlowSequence two_year_bond() { return {{0.5, 1.0, 1.5, 2.0}, {25, 25, 25, 1025}}; }

TEST(PresentValue, UnitDiscountSumsPayments) {
    EXPECT_DOUBLE_EQ(present_value(two_year_bond(), [](double) { return 1.0; }), 1100.0);
}

TEST(PresentValue, ExponentialDiscount) {
    const auto cf = two_year_bond();
    auto d = [](double t) { return std::exp(-0.05 * t); };
    const double expected = oracle::brute_pv(cf.times, cf.amounts, d);
    EXPECT_NEAR(expected, 998.815, 1e-3);
    EXPECT_NEAR(present_value(cf, d), expected, 1e-12);
}

TEST(PresentValue, SinglePayment) {
    const CashFlowSequence cf{{1.0}, {100.0}};
    EXPECT_DOUBLE_EQ(present_value(cf, [](double) { return 0.9; }), 90.0);
}

TEST(PresentValue, EmptyIsDomainError) {
    EXPECT_ERROR_CODE(present_value(CashFlowSequence{}, [](double) { return 1.0; }), ErrorCode::domain);
}

TEST(PresentValue, Properties) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 0.1), s(0.1, 10.0);
    for (int i = 0; i < 300; ++i) {
        const auto cf = oracle::random_schedule(rng);
        const double r = u(rng), shift = u(rng), a = s(rng);
        auto d = [&](double t) { return std::exp(-r * t); };
        auto lower = [&](double t) { return std::exp(-(r + shift) * t); };
        const double pv = present_value(cf, d);
        EXPECT_NEAR(present_value(cf.scaled(a), d), a * pv, 1e-10 * a * pv);
        EXPECT_NEAR(present_value(cf, [](double) { return 1.0; }), cf.total(), 1e-10);
        EXPECT_LE(present_value(cf, lower), pv);
        EXPECT_LE(pv, cf.total() + 1e-12);
    }
}

}  // namespace
}  // namespace credcurve
