/**
 * @file basis.hpp
 * @brief Exponential (Vasicek) discount basis and the constraint-reduced regression design
 *
 * The discount function is modelled as d(t) = sum_k beta_k exp(-alpha k t) with
 * sum_k beta_k = 1 so that d(0) = 1. The equality constraint is removed by
 * regressing on differences against the last basis column, which leaves an
 * unconstrained problem in K-1 coefficients; beta_K is recovered as 1 - sum.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "credcurve/cashflow.hpp"
#include "credcurve/error.hpp"

namespace credcurve {

struct BasisConfig {
    int K = 8;
    double basis_decay = 0.05;  // per-year decay rate of the first basis function

    int reduced_dim() const { return K - 1; }

    void validate() const {
        require(K >= 2, ErrorCode::domain, "basis needs K >= 2");
        require(basis_decay > 0.0 && std::isfinite(basis_decay), ErrorCode::domain,
                "basis decay must be positive");
    }
};

inline double basis_fn(int k, double t, const BasisConfig& cfg) {
    require(k >= 1 && k <= cfg.K, ErrorCode::domain, "basis index out of range");
    require(t >= 0.0, ErrorCode::domain, "basis evaluated at negative time");
    return std::exp(-cfg.basis_decay * k * t);
}

/// Basis vector phi_t = [exp(-alpha t), ..., exp(-alpha K t)].
inline Eigen::VectorXd basis_vector(double t, const BasisConfig& cfg) {
    Eigen::VectorXd phi(cfg.K);
    for (int k = 1; k <= cfg.K; ++k) phi(k - 1) = basis_fn(k, t, cfg);
    return phi;
}

/// d(t) = phi_t' beta for a full K-vector of coefficients.
inline double discount_value(const Eigen::VectorXd& beta, double t, const BasisConfig& cfg) {
    require(beta.size() == cfg.K, ErrorCode::domain, "beta must have K entries");
    require(std::abs(beta.sum() - 1.0) <= 1e-10, ErrorCode::domain, "beta must sum to one");
    return basis_vector(t, cfg).dot(beta);
}

/// Entry k is the present value of the cash flows under the k-th basis discount function.
inline Eigen::VectorXd basis_price_vector(const CashFlowSequence& cf, const BasisConfig& cfg) {
    require(!cf.empty(), ErrorCode::domain, "basis prices of an empty schedule");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(cfg.K);
    for (std::size_t i = 0; i < cf.size(); ++i)
        for (int k = 1; k <= cfg.K; ++k) b(k - 1) += cf.amounts[i] * basis_fn(k, cf.times[i], cfg);
    return b;
}

/// Full coefficient vector from the reduced one: beta_K = 1 - sum(reduced).
inline Eigen::VectorXd full_beta(const Eigen::VectorXd& reduced) {
    Eigen::VectorXd full(reduced.size() + 1);
    full.head(reduced.size()) = reduced;
    full(reduced.size()) = 1.0 - reduced.sum();
    return full;
}

/// Reduced regressor row sqrt(w) * (b_1 - b_K, ..., b_{K-1} - b_K).
inline Eigen::VectorXd reduced_row(const Eigen::VectorXd& basis_prices, double weight = 1.0) {
    const Eigen::Index k = basis_prices.size();
    Eigen::VectorXd x = basis_prices.head(k - 1).array() - basis_prices(k - 1);
    return std::sqrt(weight) * x;
}

enum class WeightScheme { inverse_term, proportional_term, uniform };

/// Unnormalised weight of a bond whose last payment is `final_time` years away.
inline double raw_weight(WeightScheme scheme, double final_time) {
    switch (scheme) {
        case WeightScheme::inverse_term: return 1.0 / final_time;
        case WeightScheme::proportional_term: return final_time;
        case WeightScheme::uniform: return 1.0;
    }
    return 1.0;
}

/// One priced bond of a panel.
struct PanelMember {
    PriceObservation obs;
    CashFlowSequence flows;
};

/// Weighted, constraint-reduced regression inputs for one issuer on one date.
struct BasisDesign {
    BasisConfig cfg;
    Eigen::VectorXd y;       // sqrt(W) (p - B_K)
    Eigen::MatrixXd X;       // sqrt(W) [B_1 - B_K, ..., B_{K-1} - B_K]
    Eigen::VectorXd weights; // normalised to mean one
    Eigen::MatrixXd raw_B;   // N x K basis prices
    Eigen::VectorXd prices;  // dirty prices
    std::vector<std::string> bond_ids;
    double weight_scale = 1.0;  // raw weight * weight_scale = normalised weight

    Eigen::Index rows() const { return y.size(); }
    bool empty() const { return y.size() == 0; }
    /// Fewer observations than reduced coefficients.
    bool underdetermined() const { return rows() < cfg.reduced_dim(); }

    /// A design with no observations; posterior updates treat it as the identity.
    static BasisDesign none(const BasisConfig& cfg) {
        BasisDesign d;
        d.cfg = cfg;
        d.X.resize(0, cfg.reduced_dim());
        d.raw_B.resize(0, cfg.K);
        return d;
    }
};

/// Assembles a design from basis prices, dirty prices and already-normalised weights.
inline BasisDesign assemble_design(const BasisConfig& cfg, const Eigen::MatrixXd& raw_B,
                                   const Eigen::VectorXd& prices, const Eigen::VectorXd& weights,
                                   std::vector<std::string> bond_ids = {}) {
    cfg.validate();
    const Eigen::Index n = raw_B.rows();
    require(raw_B.cols() == cfg.K && prices.size() == n && weights.size() == n, ErrorCode::domain,
            "design dimensions disagree");
    require((weights.array() > 0.0).all(), ErrorCode::domain, "weights must be positive");
    BasisDesign d;
    d.cfg = cfg;
    d.raw_B = raw_B;
    d.prices = prices;
    d.weights = weights;
    d.bond_ids = std::move(bond_ids);
    const Eigen::ArrayXd root = weights.array().sqrt();
    d.y = (root * (prices.array() - raw_B.col(cfg.K - 1).array())).matrix();
    d.X.resize(n, cfg.K - 1);
    for (int k = 0; k < cfg.K - 1; ++k)
        d.X.col(k) = (root * (raw_B.col(k).array() - raw_B.col(cfg.K - 1).array())).matrix();
    return d;
}

/// Builds the weighted reduced design for one issuer-date panel.
inline BasisDesign build_design(std::span<const PanelMember> members, const BasisConfig& cfg,
                                WeightScheme scheme = WeightScheme::inverse_term) {
    cfg.validate();
    require(!members.empty(), ErrorCode::empty_panel, "cannot build a design from no observations");
    const auto n = static_cast<Eigen::Index>(members.size());
    std::set<std::string> seen;
    Eigen::MatrixXd B(n, cfg.K);
    Eigen::VectorXd p(n), w(n);
    std::vector<std::string> ids;
    ids.reserve(members.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const PanelMember& m = members[static_cast<std::size_t>(i)];
        require(seen.insert(m.obs.bond_id).second, ErrorCode::duplicate_observation,
                "bond " + m.obs.bond_id + " observed twice");
        require(m.obs.trade_date == members.front().obs.trade_date, ErrorCode::mixed_panel,
                "observations span several trade dates");
        require(std::isfinite(m.obs.dirty_price) && m.obs.dirty_price > 0.0, ErrorCode::domain,
                "bond " + m.obs.bond_id + ": dirty price must be positive");
        B.row(i) = basis_price_vector(m.flows, cfg).transpose();
        p(i) = m.obs.dirty_price;
        w(i) = raw_weight(scheme, m.flows.final_time());
        ids.push_back(m.obs.bond_id);
    }
    const double scale = static_cast<double>(n) / w.sum();
    BasisDesign d = assemble_design(cfg, B, p, w * scale, std::move(ids));
    d.weight_scale = scale;
    return d;
}

/// Concatenates two designs that share a basis configuration.
inline BasisDesign stack(const BasisDesign& a, const BasisDesign& b) {
    require(a.cfg.K == b.cfg.K, ErrorCode::domain, "cannot stack designs of different K");
    BasisDesign d = a;
    auto cat_rows = [](const auto& top, const auto& bottom, auto& out) {
        out.resize(top.rows() + bottom.rows(), top.cols());
        out << top, bottom;
    };
    cat_rows(a.y, b.y, d.y);
    cat_rows(a.X, b.X, d.X);
    cat_rows(a.weights, b.weights, d.weights);
    cat_rows(a.raw_B, b.raw_B, d.raw_B);
    cat_rows(a.prices, b.prices, d.prices);
    d.bond_ids.insert(d.bond_ids.end(), b.bond_ids.begin(), b.bond_ids.end());
    return d;
}

}  // namespace credcurve
