/**
 * @file bayes.hpp
 * @brief Conjugate Normal-Inverse-Gamma regression on the reduced basis design
 *
 * Model: y_n ~ N(x_n' beta, sigma^2), beta | sigma^2 ~ N(mu, sigma^2 Lambda),
 * sigma^2 ~ InvGamma(shape, scale). The posterior stays in the same family and
 * the predictive for a new regressor row is a location-scale Student-t.
 */

#pragma once

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "credcurve/basis.hpp"
#include "credcurve/error.hpp"

namespace credcurve {

struct NIGParams {
    Eigen::VectorXd mu;      // location of beta (reduced coordinates)
    Eigen::MatrixXd Lambda;  // covariance of beta in units of sigma^2
    double ig_shape = 0.0;   // inverse-gamma shape
    double ig_scale = 0.0;   // inverse-gamma scale

    Eigen::Index dim() const { return mu.size(); }

    /// E[sigma^2]; requires shape > 1.
    double noise_mean() const { return ig_scale / (ig_shape - 1.0); }

    /// Var[sigma^2]; requires shape > 2.
    double noise_variance() const {
        const double m = noise_mean();
        return m * m / (ig_shape - 2.0);
    }

    void validate() const {
        require(Lambda.rows() == mu.size() && Lambda.cols() == mu.size(), ErrorCode::domain,
                "NIG covariance shape does not match location");
        require(mu.allFinite() && Lambda.allFinite(), ErrorCode::domain, "NIG parameters not finite");
        require((Lambda - Lambda.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + Lambda.cwiseAbs().maxCoeff()),
                ErrorCode::domain, "NIG covariance is not symmetric");
        require(ig_shape > 0.0 && std::isfinite(ig_shape), ErrorCode::domain, "inverse-gamma shape must be positive");
        require(ig_scale > 0.0 && std::isfinite(ig_scale), ErrorCode::negative_scale,
                "inverse-gamma scale must be positive");
        if (mu.size() > 0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Lambda, Eigen::EigenvaluesOnly);
            require(es.eigenvalues().minCoeff() > 0.0, ErrorCode::domain, "NIG covariance not positive definite");
        }
    }
};

/// Smallest default shape: keeps a finite noise variance with a small margin above 2.
inline constexpr double kDefaultPriorShape = 2.01;

/// Ridge-like prior: mu = 1/K everywhere, Lambda = I / lambda, E[sigma^2] = noise_mean.
inline NIGParams default_prior(const BasisConfig& cfg, double lambda = 1.0, double noise_mean = 1.0) {
    cfg.validate();
    require(lambda > 0.0, ErrorCode::domain, "prior precision lambda must be positive");
    require(noise_mean > 0.0, ErrorCode::domain, "prior noise mean must be positive");
    const int d = cfg.reduced_dim();
    NIGParams p;
    p.mu = Eigen::VectorXd::Constant(d, 1.0 / cfg.K);
    p.Lambda = Eigen::MatrixXd::Identity(d, d) / lambda;
    p.ig_shape = kDefaultPriorShape;
    p.ig_scale = noise_mean * (kDefaultPriorShape - 1.0);
    return p;
}

/// Posterior after observing `design`. An empty design returns the prior unchanged.
inline NIGParams posterior_update(const NIGParams& prior, const BasisDesign& design) {
    if (design.empty()) return prior;
    require(design.X.cols() == prior.dim(), ErrorCode::domain, "design and prior dimensions differ");
    const Eigen::Index d = prior.dim();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);

    Eigen::LLT<Eigen::MatrixXd> prior_llt(prior.Lambda);
    require(prior_llt.info() == Eigen::Success, ErrorCode::domain, "prior covariance not positive definite");
    Eigen::MatrixXd prior_precision = prior_llt.solve(I);
    prior_precision = 0.5 * (prior_precision + prior_precision.transpose());

    const Eigen::MatrixXd A = design.X.transpose() * design.X + prior_precision;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    require(llt.info() == Eigen::Success, ErrorCode::rank_deficient, "posterior precision not positive definite");

    NIGParams post;
    const Eigen::VectorXd prior_term = prior_precision * prior.mu;
    post.mu = llt.solve(design.X.transpose() * design.y + prior_term);
    post.Lambda = llt.solve(I);
    post.Lambda = 0.5 * (post.Lambda + post.Lambda.transpose());
    post.ig_shape = prior.ig_shape + 0.5 * static_cast<double>(design.rows());
    post.ig_scale = prior.ig_scale +
                    0.5 * (design.y.squaredNorm() + prior.mu.dot(prior_term) - post.mu.dot(A * post.mu));
    if (!(post.ig_scale > 0.0)) {
        fail(ErrorCode::negative_scale,
             "posterior inverse-gamma scale " + std::to_string(post.ig_scale) + " (prior scale " +
                 std::to_string(prior.ig_scale) + ", y'y " + std::to_string(design.y.squaredNorm()) +
                 "); prior and data are on inconsistent scales");
    }
    return post;
}

/// Location-scale Student-t.
struct PredictiveT {
    double dof = 0.0;
    double location = 0.0;
    double scale = 0.0;

    /// Variance of the distribution; infinite for dof <= 2.
    double variance() const {
        return dof > 2.0 ? scale * scale * dof / (dof - 2.0) : std::numeric_limits<double>::infinity();
    }
};

/// Predictive distribution of a new observation with regressor row `x_new`.
inline PredictiveT predictive(const NIGParams& post, const Eigen::VectorXd& x_new) {
    require(x_new.size() == post.dim(), ErrorCode::domain, "regressor row has wrong length");
    const double s2 = post.ig_scale / post.ig_shape * (1.0 + x_new.dot(post.Lambda * x_new));
    return {2.0 * post.ig_shape, x_new.dot(post.mu), std::sqrt(s2)};
}

/// Marginal posterior of the noiseless mean x_new' beta.
inline PredictiveT mean_posterior(const NIGParams& post, const Eigen::VectorXd& x_new) {
    require(x_new.size() == post.dim(), ErrorCode::domain, "regressor row has wrong length");
    const double s2 = post.ig_scale / post.ig_shape * x_new.dot(post.Lambda * x_new);
    return {2.0 * post.ig_shape, x_new.dot(post.mu), std::sqrt(s2)};
}

/// Upper (1+level)/2 quantile of the standard Student-t with `dof` degrees of freedom.
inline double student_t_half_width(double dof, double level) {
    require(level > 0.0 && level < 1.0, ErrorCode::domain, "credible level must lie in (0,1)");
    require(dof > 0.0 && std::isfinite(dof), ErrorCode::domain, "degrees of freedom must be positive");
    boost::math::students_t dist(dof);
    return boost::math::quantile(dist, 0.5 * (1.0 + level));
}

/// Symmetric interval location +/- q * scale with central mass `level`.
inline std::pair<double, double> credible_interval(const PredictiveT& pred, double level) {
    const double half = student_t_half_width(pred.dof, level) * pred.scale;
    return {pred.location - half, pred.location + half};
}

}  // namespace credcurve
