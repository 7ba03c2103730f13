/**
 * @file statespace.hpp
 * @brief Random-walk evolution of the issuer posterior across trading dates
 *
 * Between states the coefficient location is carried unchanged (martingale),
 * the covariance gains a ridge bump, and the inverse-gamma prior on the noise
 * is moment-matched so its mean grows by delta^2 and its variance by epsilon.
 */

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "credcurve/basis.hpp"
#include "credcurve/bayes.hpp"
#include "credcurve/date.hpp"
#include "credcurve/error.hpp"

namespace credcurve {

struct FilterConfig {
    double delta_sq = 1e-4;    // variance amplifier added to E[sigma^2] per transition
    double epsilon = 1e-6;     // floor added to Var[sigma^2] per transition
    double ridge_bump = 1e-3;  // added to the covariance diagonal per transition
    bool daily_propagation = false;  // scale delta_sq by elapsed weekdays

    void validate() const {
        require(delta_sq >= 0.0 && std::isfinite(delta_sq), ErrorCode::domain, "delta_sq must be >= 0");
        require(epsilon >= 0.0 && std::isfinite(epsilon), ErrorCode::domain, "epsilon must be >= 0");
        require(ridge_bump >= 0.0 && std::isfinite(ridge_bump), ErrorCode::domain, "ridge_bump must be >= 0");
    }
};

/// Prior for the next state from the previous posterior.
inline NIGParams propagate_prior(const NIGParams& prev, const FilterConfig& cfg) {
    cfg.validate();
    require(prev.ig_shape > 2.0, ErrorCode::undefined_variance,
            "inverse-gamma shape " + std::to_string(prev.ig_shape) + " <= 2 has no variance");
    NIGParams next;
    next.mu = prev.mu;
    next.Lambda = prev.Lambda;
    next.Lambda.diagonal().array() += cfg.ridge_bump;

    const double mean = prev.ig_scale / (prev.ig_shape - 1.0) + cfg.delta_sq;
    const double var = prev.noise_variance() + cfg.epsilon;
    next.ig_shape = mean * mean / var + 2.0;
    next.ig_scale = mean * (next.ig_shape - 1.0);
    return next;
}

struct TrackState {
    Date date;
    NIGParams posterior;
    std::size_t n_obs = 0;
};

/// Filtered posterior history of one issuer.
struct IssuerTrack {
    std::string issuer_id;
    BasisConfig basis;
    FilterConfig config;
    std::vector<TrackState> states;

    const TrackState& last() const { return states.back(); }
};

inline IssuerTrack initialize_track(std::string issuer_id, const BasisDesign& first_design, Date state_date,
                                    const FilterConfig& cfg, const NIGParams& prior) {
    cfg.validate();
    require(!first_design.empty(), ErrorCode::empty_panel, "track needs a nonempty first design");
    IssuerTrack track{std::move(issuer_id), first_design.cfg, cfg, {}};
    track.states.push_back({state_date, posterior_update(prior, first_design),
                            static_cast<std::size_t>(first_design.rows())});
    return track;
}

inline IssuerTrack initialize_track(std::string issuer_id, const BasisDesign& first_design, Date state_date,
                                    const FilterConfig& cfg, double lambda = 1.0) {
    return initialize_track(std::move(issuer_id), first_design, state_date, cfg,
                            default_prior(first_design.cfg, lambda));
}

/// Appends the state for `state_date` in place; `design` may be empty.
inline void advance(IssuerTrack& track, const BasisDesign& design, Date state_date) {
    require(!track.states.empty(), ErrorCode::domain, "track has no initial state");
    require(state_date > track.last().date, ErrorCode::ordering,
            "state " + state_date.iso() + " does not follow " + track.last().date.iso());
    FilterConfig step = track.config;
    if (step.daily_propagation)
        step.delta_sq *= std::max(1, weekdays_between(track.last().date, state_date));
    NIGParams prior = propagate_prior(track.last().posterior, step);
    track.states.push_back({state_date, posterior_update(prior, design), static_cast<std::size_t>(design.rows())});
}

inline IssuerTrack filter_step(IssuerTrack track, const BasisDesign& design, Date state_date) {
    advance(track, design, state_date);
    return track;
}

// Track files: line-oriented "key value..." text, doubles at 17 significant digits.

inline constexpr const char* kTrackMagic = "credcurve-track";
inline constexpr int kTrackVersion = 1;

namespace detail {

inline std::string exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::istringstream expect_line(std::istream& in, const std::string& key) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::parse, "track file truncated before '" + key + "'");
    std::istringstream ls(line);
    std::string got;
    ls >> got;
    require(got == key, ErrorCode::parse, "track file: expected '" + key + "', found '" + got + "'");
    return ls;
}

inline double read_double(std::istream& ls, const std::string& what) {
    std::string tok;
    require(static_cast<bool>(ls >> tok), ErrorCode::parse, "track file: missing " + what);
    try {
        std::size_t used = 0;
        double v = std::stod(tok, &used);
        require(used == tok.size(), ErrorCode::parse, "track file: bad number for " + what);
        return v;
    } catch (const std::logic_error&) {
        fail(ErrorCode::parse, "track file: bad number for " + what);
    }
}

inline double read_double(std::istringstream&& ls, const std::string& what) {
    return read_double(static_cast<std::istream&>(ls), what);
}

}  // namespace detail

inline void write_track(std::ostream& out, const IssuerTrack& track) {
    using detail::exact;
    out << kTrackMagic << ' ' << kTrackVersion << '\n';
    out << "issuer_id " << track.issuer_id << '\n';
    out << "K " << track.basis.K << '\n';
    out << "basis_decay " << exact(track.basis.basis_decay) << '\n';
    out << "delta_sq " << exact(track.config.delta_sq) << '\n';
    out << "epsilon " << exact(track.config.epsilon) << '\n';
    out << "ridge_bump " << exact(track.config.ridge_bump) << '\n';
    out << "daily_propagation " << (track.config.daily_propagation ? 1 : 0) << '\n';
    out << "states " << track.states.size() << '\n';
    for (const TrackState& s : track.states) {
        out << "state " << s.date.iso() << ' ' << s.n_obs << '\n';
        out << "ig " << exact(s.posterior.ig_shape) << ' ' << exact(s.posterior.ig_scale) << '\n';
        out << "mu";
        for (Eigen::Index i = 0; i < s.posterior.mu.size(); ++i) out << ' ' << exact(s.posterior.mu(i));
        out << '\n';
        out << "Lambda";
        for (Eigen::Index i = 0; i < s.posterior.Lambda.rows(); ++i)
            for (Eigen::Index j = 0; j < s.posterior.Lambda.cols(); ++j)
                out << ' ' << exact(s.posterior.Lambda(i, j));
        out << '\n';
    }
}

inline IssuerTrack read_track(std::istream& in) {
    using detail::expect_line;
    using detail::read_double;
    IssuerTrack track;
    {
        auto ls = expect_line(in, kTrackMagic);
        int version = 0;
        ls >> version;
        require(version == kTrackVersion, ErrorCode::parse, "unsupported track file version");
    }
    {
        auto ls = expect_line(in, "issuer_id");
        ls >> track.issuer_id;
        require(!track.issuer_id.empty(), ErrorCode::parse, "track file: empty issuer id");
    }
    {
        auto ls = expect_line(in, "K");
        ls >> track.basis.K;
    }
    track.basis.basis_decay = read_double(expect_line(in, "basis_decay"), "basis_decay");
    track.basis.validate();
    track.config.delta_sq = read_double(expect_line(in, "delta_sq"), "delta_sq");
    track.config.epsilon = read_double(expect_line(in, "epsilon"), "epsilon");
    track.config.ridge_bump = read_double(expect_line(in, "ridge_bump"), "ridge_bump");
    {
        auto ls = expect_line(in, "daily_propagation");
        int flag = 0;
        ls >> flag;
        track.config.daily_propagation = flag != 0;
    }
    track.config.validate();
    std::size_t n = 0;
    {
        auto ls = expect_line(in, "states");
        require(static_cast<bool>(ls >> n), ErrorCode::parse, "track file: bad state count");
    }
    const int d = track.basis.reduced_dim();
    for (std::size_t s = 0; s < n; ++s) {
        TrackState st;
        {
            auto ls = expect_line(in, "state");
            std::string date;
            ls >> date >> st.n_obs;
            st.date = Date::parse(date);
        }
        {
            auto ls = expect_line(in, "ig");
            st.posterior.ig_shape = read_double(ls, "ig_shape");
            st.posterior.ig_scale = read_double(ls, "ig_scale");
        }
        {
            auto ls = expect_line(in, "mu");
            st.posterior.mu.resize(d);
            for (int i = 0; i < d; ++i) st.posterior.mu(i) = read_double(ls, "mu");
        }
        {
            auto ls = expect_line(in, "Lambda");
            st.posterior.Lambda.resize(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) st.posterior.Lambda(i, j) = read_double(ls, "Lambda");
        }
        if (!track.states.empty())
            require(st.date > track.last().date, ErrorCode::ordering, "track file states out of order");
        track.states.push_back(std::move(st));
    }
    return track;
}

}  // namespace credcurve
