/**
 * @file synth.hpp
 * @brief Synthetic issuers with known spread curves, priced off a Treasury curve
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "credcurve/cashflow.hpp"
#include "credcurve/csv.hpp"
#include "credcurve/curves.hpp"
#include "credcurve/date.hpp"
#include "credcurve/error.hpp"
#include "credcurve/ingest.hpp"

namespace credcurve {

enum class SpreadShape { flat, linear, widening };

/// True default spread s(t) at state index `state` (0-based).
struct SpreadFunction {
    SpreadShape shape = SpreadShape::flat;
    double level = 0.0;  // flat level, linear intercept, or initial widening level
    double slope = 0.0;  // per year (linear) or per state (widening)

    static SpreadFunction flat(double s) { return {SpreadShape::flat, s, 0.0}; }
    static SpreadFunction linear(double a, double b) { return {SpreadShape::linear, a, b}; }
    static SpreadFunction widening(double s0, double per_state) { return {SpreadShape::widening, s0, per_state}; }

    double operator()(double t, int state) const {
        switch (shape) {
            case SpreadShape::flat: return level;
            case SpreadShape::linear: return level + slope * t;
            case SpreadShape::widening: return level + slope * state;
        }
        return level;
    }
};

struct SyntheticIssuerSpec {
    std::string issuer_id;
    SpreadFunction spread;
    std::vector<double> bond_terms{1, 2, 3, 5, 7, 10, 20, 30};
    double coupon_rate = 0.05;
    int coupon_freq = 2;
    double noise_sd = 0.0;  // per 100 face, on the dirty price
    std::uint64_t seed = 1;

    void validate() const {
        require(!issuer_id.empty(), ErrorCode::domain, "synthetic issuer needs an id");
        require(!bond_terms.empty(), ErrorCode::domain, "synthetic issuer needs bonds");
        for (double t : bond_terms) require(t > 0.0, ErrorCode::domain, "bond terms must be positive");
        require(noise_sd >= 0.0 && std::isfinite(noise_sd), ErrorCode::domain, "noise_sd must be >= 0");
        require(coupon_rate >= 0.0, ErrorCode::domain, "coupon rate must be >= 0");
    }
};

/// Standard normal draws from mt19937_64 via Box-Muller, identical on every platform.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;          // [0, 1)
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Days between issue and the first state; puts every bond mid coupon period.
inline constexpr int kSyntheticSeasoningDays = 45;

/// Bonds of a synthetic issuer, one per term, issued before `start`.
inline std::vector<IssueRecord> synthetic_bonds(const SyntheticIssuerSpec& spec, Date start) {
    std::vector<IssueRecord> out;
    const Date issue = start.add_days(-kSyntheticSeasoningDays);
    for (double term : spec.bond_terms) {
        const int months = static_cast<int>(std::lround(term * 12.0));
        char suffix[16];
        std::snprintf(suffix, sizeof suffix, "-%03dM", months);
        IssueRecord r;
        r.bond_id = spec.issuer_id + suffix;
        r.issuer_id = spec.issuer_id;
        r.issue_date = issue;
        r.maturity_date = issue.add_months(months);
        r.coupon_rate = spec.coupon_rate;
        r.coupon_freq = spec.coupon_freq;
        r.face = 100.0;
        out.push_back(r);
    }
    return out;
}

/// Issuer total discount d_time(t) * d_risk(t) with d_risk(t) = exp(-s(t) t).
inline double synthetic_discount(const SpreadFunction& spread, const TreasuryCurve& treasury, double t, int state) {
    return treasury.discount(t) * std::exp(-spread(t, state) * t);
}

/// Noiseless dirty price per 100 face.
inline double synthetic_dirty_price(const IssueRecord& bond, Date as_of, const SpreadFunction& spread,
                                    const TreasuryCurve& treasury, int state) {
    const CashFlowSequence cf = generate_schedule(bond, as_of).scaled(100.0 / bond.face);
    return present_value(cf, [&](double t) { return synthetic_discount(spread, treasury, t, state); });
}

/// Weekdays starting at `start` (rolled forward off a weekend).
inline std::vector<Date> business_days(Date start, int n) {
    std::vector<Date> out;
    Date d = start;
    while (static_cast<int>(out.size()) < n) {
        if (!d.is_weekend()) out.push_back(d);
        d = d.add_days(1);
    }
    return out;
}

struct UniverseSpec {
    Date start;
    int n_states = 1;
    std::vector<SyntheticIssuerSpec> issuers;
    AccrualConvention accrual = AccrualConvention::paper_literal;
    TenorGrid grid = TenorGrid::standard();
};

struct SyntheticUniverse {
    std::vector<Date> dates;
    std::vector<IssueRecord> issues;
    std::vector<PriceRecord> prices;
    std::vector<SpreadCurve> truth;  // issuer-major, then state
    TreasuryCurve treasury;
    TenorGrid grid;

    std::string issues_csv() const {
        std::ostringstream out;
        out << "bond_id,issuer_id,issue_date,maturity_date,coupon_rate,coupon_freq,face,callable,convertible,"
               "variable_rate,senior\n";
        auto b = [](bool v) { return v ? "true" : "false"; };
        for (const auto& r : issues)
            out << r.bond_id << ',' << r.issuer_id << ',' << r.issue_date.iso() << ',' << r.maturity_date.iso() << ','
                << format_number(r.coupon_rate, 17) << ',' << r.coupon_freq << ',' << format_number(r.face, 17) << ','
                << b(r.flags.callable) << ',' << b(r.flags.convertible) << ',' << b(r.flags.variable_rate) << ','
                << b(r.flags.senior) << '\n';
        return out.str();
    }

    std::string prices_csv() const {
        std::ostringstream out;
        out << "bond_id,trade_date,clean_price\n";
        for (const auto& p : prices)
            out << p.bond_id << ',' << p.trade_date.iso() << ',' << format_number(p.clean_price, 17) << '\n';
        return out.str();
    }

    std::string treasury_csv() const {
        std::ostringstream out;
        out << "tenor_years,zero_yield\n";
        for (double t : grid.tenors) out << format_number(t, 17) << ',' << format_number(treasury.yield(t), 17) << '\n';
        return out.str();
    }

    std::string truth_csv() const {
        std::ostringstream out;
        out << "issuer_id,state_date,tenor,true_spread\n";
        for (const auto& c : truth)
            for (std::size_t i = 0; i < c.tenors.size(); ++i)
                out << c.issuer_id << ',' << c.as_of.iso() << ',' << format_number(c.tenors[i], 17) << ','
                    << format_number(c.spread[i], 17) << '\n';
        return out.str();
    }
};

/// Prices every issuer's bonds on `n_states` consecutive business days.
inline SyntheticUniverse generate_universe(const UniverseSpec& spec, const TreasuryCurve& treasury) {
    require(spec.n_states >= 1, ErrorCode::domain, "need at least one state");
    spec.grid.validate();
    SyntheticUniverse u;
    u.treasury = treasury;
    u.grid = spec.grid;
    u.dates = business_days(spec.start, spec.n_states);
    for (const SyntheticIssuerSpec& is : spec.issuers) {
        is.validate();
        const auto bonds = synthetic_bonds(is, u.dates.front());
        u.issues.insert(u.issues.end(), bonds.begin(), bonds.end());
        GaussianStream noise(is.seed);
        for (int s = 0; s < spec.n_states; ++s) {
            const Date d = u.dates[static_cast<std::size_t>(s)];
            for (const IssueRecord& bond : bonds) {
                if (bond.maturity_date <= d) continue;
                const double dirty = synthetic_dirty_price(bond, d, is.spread, treasury, s) + is.noise_sd * noise.next();
                u.prices.push_back({bond.bond_id, d, dirty - accrued_per_hundred(bond, d, spec.accrual)});
            }
            SpreadCurve truth{is.issuer_id, d, spec.grid.tenors, {}, {}, {}, {}, {}};
            for (double t : spec.grid.tenors) {
                truth.spread.push_back(is.spread(t, s));
                truth.violation.push_back(false);
            }
            truth.band_lo = truth.spread;
            truth.band_hi = truth.spread;
            detail::fill_risk(truth);
            u.truth.push_back(std::move(truth));
        }
    }
    return u;
}

}  // namespace credcurve
