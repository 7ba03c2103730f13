/**
 * @file cashflow.hpp
 * @brief Vanilla bond schedules, accrued interest and present value
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "credcurve/date.hpp"
#include "credcurve/error.hpp"

namespace credcurve {

struct BondFlags {
    bool callable = false;
    bool convertible = false;
    bool variable_rate = false;
    bool senior = true;
};

/// Static description of one bond.
struct BondInstrument {
    std::string bond_id;
    std::string issuer_id;
    Date issue_date;
    Date maturity_date;
    double coupon_rate = 0.0;  // fraction of face per year
    int coupon_freq = 0;       // payments per year, 0 for zero-coupon
    double face = 100.0;
    BondFlags flags;

    bool is_vanilla() const {
        return !flags.callable && !flags.convertible && !flags.variable_rate && flags.senior;
    }

    void validate() const {
        require(maturity_date > issue_date, ErrorCode::domain,
                "bond " + bond_id + ": maturity must follow issue date");
        require(coupon_rate >= 0.0 && std::isfinite(coupon_rate), ErrorCode::domain,
                "bond " + bond_id + ": coupon rate must be nonnegative");
        require(face > 0.0 && std::isfinite(face), ErrorCode::domain,
                "bond " + bond_id + ": face must be positive");
        require(coupon_freq >= 0 && (coupon_freq == 0 || 12 % coupon_freq == 0), ErrorCode::domain,
                "bond " + bond_id + ": coupon frequency must divide 12");
    }
};

/// Remaining payments of a bond, timed in ACT/365 years from the valuation date.
struct CashFlowSequence {
    std::vector<double> times;
    std::vector<double> amounts;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
    double final_time() const { return times.back(); }
    double total() const { return std::accumulate(amounts.begin(), amounts.end(), 0.0); }

    CashFlowSequence scaled(double factor) const {
        CashFlowSequence out = *this;
        for (double& a : out.amounts) a *= factor;
        return out;
    }
};

/// Quoted and dirty price of one bond on one date, per 100 face.
struct PriceObservation {
    std::string bond_id;
    Date trade_date;
    double clean_price = 0.0;
    double dirty_price = 0.0;
    double weight = 1.0;
};

enum class AccrualConvention {
    paper_literal,     // c_next * t_next / t_coupon (time until the next coupon)
    elapsed_fraction,  // c_next * (t_coupon - t_next) / t_coupon (market accrual)
};

namespace detail {

inline void check_schedulable(const BondInstrument& bond, Date valuation_date) {
    bond.validate();
    require(bond.is_vanilla(), ErrorCode::rejected_instrument,
            "bond " + bond.bond_id + " is not vanilla");
    require(valuation_date < bond.maturity_date, ErrorCode::matured_instrument,
            "bond " + bond.bond_id + " matured on " + bond.maturity_date.iso());
}

/// Coupon dates strictly after the valuation date, ascending, stepped back from maturity.
inline std::vector<Date> remaining_coupon_dates(const BondInstrument& bond, Date valuation_date) {
    std::vector<Date> dates;
    const int step = 12 / bond.coupon_freq;
    for (int i = 0;; ++i) {
        Date d = bond.maturity_date.add_months(-i * step);
        if (d <= valuation_date) break;
        dates.push_back(d);
    }
    std::reverse(dates.begin(), dates.end());
    return dates;
}

}  // namespace detail

/// Remaining cash flows of a vanilla bond in the bond's own currency units.
inline CashFlowSequence generate_schedule(const BondInstrument& bond, Date valuation_date) {
    detail::check_schedulable(bond, valuation_date);
    CashFlowSequence cf;
    if (bond.coupon_freq == 0) {
        cf.times.push_back(year_fraction(valuation_date, bond.maturity_date));
        cf.amounts.push_back(bond.face);
        return cf;
    }
    const double coupon = bond.face * bond.coupon_rate / bond.coupon_freq;
    for (Date d : detail::remaining_coupon_dates(bond, valuation_date)) {
        if (coupon <= 0.0 && d != bond.maturity_date) continue;
        cf.times.push_back(year_fraction(valuation_date, d));
        cf.amounts.push_back(coupon);
    }
    cf.amounts.back() += bond.face;
    return cf;
}

/// Current coupon period seen from the valuation date.
struct CouponPeriod {
    double c_next = 0.0;    // next coupon amount (excluding principal)
    double t_next = 0.0;    // years until the next coupon
    double t_coupon = 0.0;  // length of the coupon period in years
};

inline CouponPeriod coupon_period(const BondInstrument& bond, Date valuation_date) {
    detail::check_schedulable(bond, valuation_date);
    if (bond.coupon_freq == 0) return {};
    auto dates = detail::remaining_coupon_dates(bond, valuation_date);
    const int step = 12 / bond.coupon_freq;
    const Date next = dates.front();
    const Date prev = bond.maturity_date.add_months(-static_cast<int>(dates.size()) * step);
    return {bond.face * bond.coupon_rate / bond.coupon_freq, year_fraction(valuation_date, next),
            year_fraction(prev, next)};
}

inline double accrued_interest(double c_next, double t_next, double t_coupon,
                               AccrualConvention convention = AccrualConvention::paper_literal) {
    require(c_next >= 0.0 && t_next >= 0.0 && t_coupon > 0.0 && t_next <= t_coupon,
            ErrorCode::domain, "accrued interest needs 0 <= t_next <= t_coupon, c_next >= 0");
    switch (convention) {
        case AccrualConvention::paper_literal: return c_next * t_next / t_coupon;
        case AccrualConvention::elapsed_fraction: return c_next * (t_coupon - t_next) / t_coupon;
    }
    return 0.0;
}

/// Accrued interest per 100 face for a bond on a valuation date.
inline double accrued_per_hundred(const BondInstrument& bond, Date valuation_date,
                                  AccrualConvention convention) {
    CouponPeriod p = coupon_period(bond, valuation_date);
    if (p.t_coupon <= 0.0) return 0.0;
    return accrued_interest(p.c_next, p.t_next, p.t_coupon, convention) * 100.0 / bond.face;
}

/// Inner product of cash flows with a discount function evaluated at the payment times.
template <typename Discount>
double present_value(const CashFlowSequence& cf, Discount&& discount) {
    require(!cf.empty(), ErrorCode::domain, "present value of an empty cash-flow sequence");
    double pv = 0.0;
    for (std::size_t i = 0; i < cf.size(); ++i) pv += cf.amounts[i] * discount(cf.times[i]);
    return pv;
}

}  // namespace credcurve
