/**
 * @file lsq.hpp
 * @brief Closed-form OLS, WLS and ridge-WLS fits of the reduced basis design
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "credcurve/basis.hpp"
#include "credcurve/error.hpp"

namespace credcurve {

enum class FitMethod { ols, wls, rwls };

inline const char* to_string(FitMethod m) {
    switch (m) {
        case FitMethod::ols: return "ols";
        case FitMethod::wls: return "wls";
        case FitMethod::rwls: return "rwls";
    }
    return "?";
}

struct PointFit {
    Eigen::VectorXd beta_reduced;
    Eigen::VectorXd beta_full;
    Eigen::VectorXd residuals;  // dirty price minus fitted price, per observation
    FitMethod method = FitMethod::ols;
    double lambda = 0.0;
    double condition_number = 1.0;  // of the (regularised) normal matrix
};

/// Normal matrices above this condition number are treated as singular.
inline constexpr double kMaxCondition = 1e12;

namespace detail {

inline double condition_of(const Eigen::MatrixXd& symmetric) {
    if (symmetric.rows() == 0) return 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

inline PointFit finish(const BasisDesign& design, Eigen::VectorXd reduced, FitMethod method,
                       double lambda, double condition) {
    PointFit fit;
    fit.beta_full = full_beta(reduced);
    fit.beta_reduced = std::move(reduced);
    fit.method = method;
    fit.lambda = lambda;
    fit.condition_number = condition;
    fit.residuals = design.prices - design.raw_B * fit.beta_full;
    return fit;
}

inline std::string format_condition(double cond) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", cond);
    return buf;
}

inline PointFit solve_normal(const BasisDesign& design, FitMethod method) {
    require(!design.empty(), ErrorCode::empty_panel, "least squares on an empty design");
    const Eigen::MatrixXd A = design.X.transpose() * design.X;
    const double cond = condition_of(A);
    if (design.underdetermined() || !(cond < kMaxCondition)) {
        fail(ErrorCode::rank_deficient,
             "normal equations are singular (N=" + std::to_string(design.rows()) +
                 ", K-1=" + std::to_string(design.cfg.reduced_dim()) +
                 ", condition=" + format_condition(cond) + "); use the ridge fit instead");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    require(llt.info() == Eigen::Success, ErrorCode::rank_deficient,
            "normal matrix is not positive definite; use the ridge fit instead");
    return finish(design, llt.solve(design.X.transpose() * design.y), method, 0.0, cond);
}

}  // namespace detail

/// Ordinary least squares; the design must carry unit weights.
inline PointFit fit_ols(const BasisDesign& design) {
    require((design.weights.array() == 1.0).all(), ErrorCode::domain,
            "OLS expects a design built with uniform weights");
    return detail::solve_normal(design, FitMethod::ols);
}

/// Weighted least squares. The weights are already folded into y and X.
inline PointFit fit_wls(const BasisDesign& design) {
    return detail::solve_normal(design, FitMethod::wls);
}

/// Ridge-weighted least squares (X'X + lambda I)^-1 X'y; defined for any N >= 1.
inline PointFit fit_rwls(const BasisDesign& design, double lambda) {
    require(lambda > 0.0 && std::isfinite(lambda), ErrorCode::domain, "ridge lambda must be positive");
    require(!design.empty(), ErrorCode::empty_panel, "least squares on an empty design");
    Eigen::MatrixXd A = design.X.transpose() * design.X;
    A.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    require(llt.info() == Eigen::Success, ErrorCode::rank_deficient, "ridge system not positive definite");
    return detail::finish(design, llt.solve(design.X.transpose() * design.y), FitMethod::rwls, lambda,
                          detail::condition_of(A));
}

/// Ridge objective ||y - X b||^2 + lambda ||b||^2 in the reduced coordinates.
inline double ridge_objective(const BasisDesign& design, const Eigen::VectorXd& reduced, double lambda) {
    return (design.y - design.X * reduced).squaredNorm() + lambda * reduced.squaredNorm();
}

/// Rows of `design` selected by index, keeping its weights.
inline BasisDesign select_rows(const BasisDesign& design, std::span<const Eigen::Index> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd B(n, design.cfg.K);
    Eigen::VectorXd p(n), w(n);
    std::vector<std::string> ids;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index r = rows[static_cast<std::size_t>(i)];
        B.row(i) = design.raw_B.row(r);
        p(i) = design.prices(r);
        w(i) = design.weights(r);
        if (!design.bond_ids.empty()) ids.push_back(design.bond_ids[static_cast<std::size_t>(r)]);
    }
    BasisDesign out = assemble_design(design.cfg, B, p, w, std::move(ids));
    out.weight_scale = design.weight_scale;
    return out;
}

struct LambdaScore {
    double lambda = 0.0;
    double mean_squared_error = 0.0;  // weighted held-out residual, averaged over held-out rows
};

struct LambdaSearch {
    double best_lambda = 0.0;
    std::vector<LambdaScore> scores;
};

/// Grid search for the ridge strength over caller-supplied held-out folds.
inline LambdaSearch cross_validate_lambda(const BasisDesign& design, std::span<const double> grid,
                                          const std::vector<std::vector<Eigen::Index>>& folds) {
    require(!grid.empty() && !folds.empty(), ErrorCode::domain, "need a lambda grid and folds");
    LambdaSearch out;
    double best = std::numeric_limits<double>::infinity();
    for (double lambda : grid) {
        double sse = 0.0;
        std::size_t count = 0;
        for (const auto& held : folds) {
            std::vector<Eigen::Index> train;
            for (Eigen::Index r = 0; r < design.rows(); ++r)
                if (std::find(held.begin(), held.end(), r) == held.end()) train.push_back(r);
            require(!train.empty() && !held.empty(), ErrorCode::domain, "fold leaves no training rows");
            PointFit fit = fit_rwls(select_rows(design, train), lambda);
            for (Eigen::Index r : held) {
                const double e = design.y(r) - design.X.row(r).dot(fit.beta_reduced);
                sse += e * e;
                ++count;
            }
        }
        LambdaScore s{lambda, sse / static_cast<double>(count)};
        out.scores.push_back(s);
        if (s.mean_squared_error < best) {
            best = s.mean_squared_error;
            out.best_lambda = lambda;
        }
    }
    return out;
}

}  // namespace credcurve
