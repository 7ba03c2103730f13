/**
 * @file curves.hpp
 * @brief Zero yields, default spreads, integrated risk and the Treasury curve
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "credcurve/basis.hpp"
#include "credcurve/bayes.hpp"
#include "credcurve/date.hpp"
#include "credcurve/error.hpp"
#include "credcurve/lsq.hpp"

namespace credcurve {

struct TenorGrid {
    std::vector<double> tenors;

    /// 0.25y to 30y in quarter-year steps.
    static TenorGrid standard() {
        TenorGrid g;
        for (int i = 1; i <= 120; ++i) g.tenors.push_back(0.25 * i);
        return g;
    }

    void validate() const {
        require(!tenors.empty(), ErrorCode::domain, "tenor grid is empty");
        for (std::size_t i = 0; i < tenors.size(); ++i) {
            require(tenors[i] > 0.0, ErrorCode::domain, "tenors must be positive");
            if (i > 0) require(tenors[i] > tenors[i - 1], ErrorCode::domain, "tenors must increase");
        }
    }
};

/// Continuously compounded zero yield -log(d)/t.
inline double yield_from_discount(double d_value, double t) {
    require(t > 0.0, ErrorCode::domain, "yield at nonpositive tenor");
    require(d_value > 0.0, ErrorCode::domain,
            "discount-violation: nonpositive discount " + std::to_string(d_value) + " at tenor " + std::to_string(t));
    return -std::log(d_value) / t;
}

inline double discount_from_yield(double y, double t) { return std::exp(-y * t); }

enum class TreasuryMode { fitted, tabulated };

/// Risk-free discount curve, either a fitted basis curve or tabulated zero yields.
class TreasuryCurve {
public:
    static TreasuryCurve fitted(Date as_of, Eigen::VectorXd beta, const BasisConfig& cfg) {
        cfg.validate();
        require(beta.size() == cfg.K, ErrorCode::domain, "Treasury beta must have K entries");
        require(std::abs(beta.sum() - 1.0) <= 1e-10, ErrorCode::domain, "Treasury beta must sum to one");
        TreasuryCurve c;
        c.as_of_ = as_of;
        c.mode_ = TreasuryMode::fitted;
        c.beta_ = std::move(beta);
        c.basis_ = cfg;
        return c;
    }

    /// Knots of (tenor, zero yield); interpolated linearly in yield, flat outside.
    static TreasuryCurve tabulated(Date as_of, std::vector<std::pair<double, double>> knots) {
        require(!knots.empty(), ErrorCode::domain, "tabulated Treasury curve needs knots");
        for (std::size_t i = 0; i < knots.size(); ++i) {
            require(knots[i].first > 0.0 && std::isfinite(knots[i].second), ErrorCode::domain,
                    "Treasury knots need positive tenors and finite yields");
            if (i > 0) require(knots[i].first > knots[i - 1].first, ErrorCode::domain, "Treasury tenors must increase");
        }
        TreasuryCurve c;
        c.as_of_ = as_of;
        c.mode_ = TreasuryMode::tabulated;
        c.knots_ = std::move(knots);
        return c;
    }

    Date as_of() const { return as_of_; }
    TreasuryMode mode() const { return mode_; }
    const Eigen::VectorXd& beta() const { return beta_; }
    const BasisConfig& basis() const { return basis_; }
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

    double yield(double t) const {
        if (mode_ == TreasuryMode::fitted) return yield_from_discount(discount_value(beta_, t, basis_), t);
        if (t <= knots_.front().first) return knots_.front().second;
        if (t >= knots_.back().first) return knots_.back().second;
        auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                                   [](double v, const auto& k) { return v < k.first; });
        const auto& hi = *it;
        const auto& lo = *std::prev(it);
        const double w = (t - lo.first) / (hi.first - lo.first);
        return lo.second + w * (hi.second - lo.second);
    }

    double discount(double t) const {
        if (mode_ == TreasuryMode::fitted) return discount_value(beta_, t, basis_);
        return discount_from_yield(yield(t), t);
    }

private:
    Date as_of_;
    TreasuryMode mode_ = TreasuryMode::tabulated;
    Eigen::VectorXd beta_;
    BasisConfig basis_;
    std::vector<std::pair<double, double>> knots_;
};

struct TreasuryFit {
    TreasuryCurve curve;
    PointFit fit;
    bool ridge_fallback = false;
    std::string warning;
};

/// Fits the Treasury curve by WLS, falling back to ridge when the panel is too thin.
inline TreasuryFit treasury_from_panel(const BasisDesign& design, Date as_of, double lambda = 1.0) {
    require(!design.empty(), ErrorCode::empty_panel, "Treasury panel is empty");
    TreasuryFit out;
    try {
        out.fit = fit_wls(design);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::rank_deficient) throw;
        out.fit = fit_rwls(design, lambda);
        out.ridge_fallback = true;
        out.warning = "Treasury panel rank deficient (N=" + std::to_string(design.rows()) + "); used ridge fit";
    }
    out.curve = TreasuryCurve::fitted(as_of, out.fit.beta_full, design.cfg);
    return out;
}

/// Basis prices of a 100-face zero-coupon bond maturing at t.
inline Eigen::VectorXd zero_coupon_basis(double t, const BasisConfig& cfg) { return 100.0 * basis_vector(t, cfg); }

/// Which uncertainty the spread bands carry.
enum class BandKind {
    observation,  // predictive for a priced zero-coupon bond, includes price noise
    mean,         // posterior of the discount function itself
};

struct SpreadCurve {
    std::string issuer_id;
    Date as_of;
    std::vector<double> tenors;
    std::vector<double> spread;   // NaN where withheld
    std::vector<double> band_lo;
    std::vector<double> band_hi;
    std::vector<bool> violation;  // issuer discount nonpositive at this tenor
    std::map<double, double> risk_to;

    std::vector<double> violation_tenors() const {
        std::vector<double> out;
        for (std::size_t i = 0; i < tenors.size(); ++i)
            if (violation[i]) out.push_back(tenors[i]);
        return out;
    }

    /// Spread at a tenor on the grid (exact match within 1e-9).
    double at(double tenor) const {
        for (std::size_t i = 0; i < tenors.size(); ++i)
            if (std::abs(tenors[i] - tenor) < 1e-9) return spread[i];
        fail(ErrorCode::domain, "tenor not on the spread grid");
    }
};

/// Trapezoidal integral of the spread from 0 to T; [0, t1] uses s(t1) * t1.
inline double integrated_risk(const SpreadCurve& curve, double T) {
    require(!curve.tenors.empty(), ErrorCode::domain, "empty spread curve");
    require(T > 0.0 && T <= curve.tenors.back() + 1e-12, ErrorCode::domain, "risk horizon beyond the tenor grid");
    const auto& t = curve.tenors;
    const auto& s = curve.spread;
    if (T <= t[0]) return s[0] * T;
    double total = s[0] * t[0];
    for (std::size_t i = 1; i < t.size() && t[i - 1] < T; ++i) {
        const double right = std::min(t[i], T);
        const double s_right = s[i - 1] + (s[i] - s[i - 1]) * (right - t[i - 1]) / (t[i] - t[i - 1]);
        total += 0.5 * (s[i - 1] + s_right) * (right - t[i - 1]);
    }
    return total;
}

inline const std::vector<double>& standard_risk_horizons() {
    static const std::vector<double> h{1, 2, 3, 5, 7, 10, 20, 30};
    return h;
}

namespace detail {

inline void fill_risk(SpreadCurve& c) {
    for (double T : standard_risk_horizons())
        if (T <= c.tenors.back() + 1e-12) c.risk_to[T] = integrated_risk(c, T);
}

}  // namespace detail

/// Spread curve for an arbitrary issuer total discount function; no bands.
template <typename Discount>
SpreadCurve spread_curve_from_discount(std::string issuer_id, Date as_of, Discount&& discount,
                                       const TreasuryCurve& treasury, const TenorGrid& grid) {
    grid.validate();
    SpreadCurve c{std::move(issuer_id), as_of, grid.tenors, {}, {}, {}, {}, {}};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double t : grid.tenors) {
        const double d = discount(t);
        const bool bad = !(d > 0.0);
        const double s = bad ? nan : yield_from_discount(d, t) - treasury.yield(t);
        c.spread.push_back(s);
        c.band_lo.push_back(s);
        c.band_hi.push_back(s);
        c.violation.push_back(bad);
    }
    detail::fill_risk(c);
    return c;
}

/// Spread curve for a point estimate of the full coefficient vector.
inline SpreadCurve spread_curve(std::string issuer_id, Date as_of, const Eigen::VectorXd& beta_full,
                                const BasisConfig& cfg, const TreasuryCurve& treasury, const TenorGrid& grid) {
    require(beta_full.size() == cfg.K, ErrorCode::domain, "beta must have K entries");
    return spread_curve_from_discount(
        std::move(issuer_id), as_of, [&](double t) { return discount_value(beta_full, t, cfg); }, treasury, grid);
}

/// Spread curve with credible bands from a posterior over the reduced coefficients.
inline SpreadCurve spread_curve(std::string issuer_id, Date as_of, const NIGParams& posterior,
                                const BasisConfig& cfg, const TreasuryCurve& treasury, const TenorGrid& grid,
                                double level, BandKind bands = BandKind::observation) {
    grid.validate();
    require(posterior.dim() == cfg.reduced_dim(), ErrorCode::domain, "posterior dimension does not match basis");
    SpreadCurve c{std::move(issuer_id), as_of, grid.tenors, {}, {}, {}, {}, {}};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double t : grid.tenors) {
        const Eigen::VectorXd b = zero_coupon_basis(t, cfg);
        const Eigen::VectorXd x = reduced_row(b);
        const PredictiveT pred = bands == BandKind::observation ? predictive(posterior, x) : mean_posterior(posterior, x);
        const auto [lo, hi] = credible_interval(pred, level);
        const double offset = b(cfg.K - 1);
        const double d = (pred.location + offset) / 100.0;
        const double d_lo = (lo + offset) / 100.0;
        const double d_hi = (hi + offset) / 100.0;
        const double y_t = treasury.yield(t);
        const bool bad = !(d > 0.0);
        c.violation.push_back(bad);
        c.spread.push_back(bad ? nan : yield_from_discount(d, t) - y_t);
        // higher discount means lower yield
        c.band_lo.push_back(d_hi > 0.0 ? yield_from_discount(d_hi, t) - y_t : nan);
        c.band_hi.push_back(d_lo > 0.0 ? yield_from_discount(d_lo, t) - y_t
                                       : std::numeric_limits<double>::infinity());
    }
    detail::fill_risk(c);
    return c;
}

}  // namespace credcurve
