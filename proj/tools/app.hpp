/**
 * @file app.hpp
 * @brief credcurve command-line application: fit, filter and simulate
 *
 * Kept as a header so the test suites can drive the subcommands in-process.
 */

#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "credcurve/basis.hpp"
#include "credcurve/bayes.hpp"
#include "credcurve/cashflow.hpp"
#include "credcurve/csv.hpp"
#include "credcurve/curves.hpp"
#include "credcurve/ingest.hpp"
#include "credcurve/lsq.hpp"
#include "credcurve/statespace.hpp"
#include "credcurve/synth.hpp"

namespace credcurve::app {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kValidation = 2, kDataError = 3 };

enum class Estimator { ols, wls, rwls, bayes, filter };

struct RunConfig {
    std::string issues_path;
    std::string prices_path;
    std::string treasury_path;
    std::string out_dir;
    Estimator estimator = Estimator::bayes;
    std::string as_of;
    std::string from;
    std::string to;
    BasisConfig basis;
    FilterConfig filter;
    double lambda = 1.0;
    double prior_noise_sd = 1.0;  // prior E[sigma^2] = prior_noise_sd^2, price units per 100
    double level = 0.95;
    WeightScheme weights = WeightScheme::inverse_term;
    AccrualConvention accrual = AccrualConvention::paper_literal;
    BandKind bands = BandKind::observation;
    bool strict = false;
    std::string resume;
    int jobs = 1;
};

/// Raised for problems the user must fix before any work starts.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- output helpers

/// Value rounded to 12 significant digits; null for non-finite values.
inline json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return std::stod(format_number(v, 12));
}

inline json number_array(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
    return a;
}

inline json number_array(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

/// Writes `content` to `path` through a temporary file and a rename.
inline void write_atomic(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), ErrorCode::io, "cannot write " + tmp.string());
        out << content;
        require(static_cast<bool>(out), ErrorCode::io, "write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

inline std::string spread_csv(const SpreadCurve& c) {
    std::ostringstream out;
    out << "tenor,spread,band_lo,band_hi\n";
    for (std::size_t i = 0; i < c.tenors.size(); ++i)
        out << format_number(c.tenors[i]) << ',' << format_number(c.spread[i]) << ',' << format_number(c.band_lo[i])
            << ',' << format_number(c.band_hi[i]) << '\n';
    return out.str();
}

inline json spread_json(const SpreadCurve& c) {
    json j;
    j["issuer_id"] = c.issuer_id;
    j["as_of"] = c.as_of.iso();
    j["tenors"] = number_array(c.tenors);
    j["spread"] = number_array(c.spread);
    j["band_lo"] = number_array(c.band_lo);
    j["band_hi"] = number_array(c.band_hi);
    json risk = json::object();
    for (const auto& [T, v] : c.risk_to) risk[format_number(T)] = number(v);
    j["risk_to"] = risk;
    return j;
}

inline json posterior_json(const NIGParams& p) {
    json j;
    j["mu"] = number_array(p.mu);
    json rows = json::array();
    for (Eigen::Index i = 0; i < p.Lambda.rows(); ++i) rows.push_back(number_array(Eigen::VectorXd(p.Lambda.row(i))));
    j["Lambda"] = rows;
    j["ig_shape"] = number(p.ig_shape);
    j["ig_scale"] = number(p.ig_scale);
    return j;
}

// ---------------------------------------------------------------- parsing of flags

inline Estimator parse_estimator(const std::string& s) {
    if (s == "ols") return Estimator::ols;
    if (s == "wls") return Estimator::wls;
    if (s == "rwls") return Estimator::rwls;
    if (s == "bayes") return Estimator::bayes;
    if (s == "filter") return Estimator::filter;
    throw ValidationError("--estimator: unknown estimator '" + s + "'");
}

inline const char* to_string(Estimator e) {
    switch (e) {
        case Estimator::ols: return "ols";
        case Estimator::wls: return "wls";
        case Estimator::rwls: return "rwls";
        case Estimator::bayes: return "bayes";
        case Estimator::filter: return "filter";
    }
    return "?";
}

inline WeightScheme parse_weights(const std::string& s) {
    if (s == "inverse_term") return WeightScheme::inverse_term;
    if (s == "proportional_term") return WeightScheme::proportional_term;
    if (s == "uniform") return WeightScheme::uniform;
    throw ValidationError("--weights: unknown scheme '" + s + "'");
}

inline AccrualConvention parse_accrual(const std::string& s) {
    if (s == "paper_literal") return AccrualConvention::paper_literal;
    if (s == "elapsed_fraction") return AccrualConvention::elapsed_fraction;
    throw ValidationError("--accrual: unknown convention '" + s + "'");
}

inline BandKind parse_bands(const std::string& s) {
    if (s == "observation") return BandKind::observation;
    if (s == "mean") return BandKind::mean;
    throw ValidationError("--bands: unknown band kind '" + s + "'");
}

inline Date parse_date_flag(const std::string& flag, const std::string& text) {
    try {
        return Date::parse(text);
    } catch (const Error&) {
        throw ValidationError(flag + ": not an ISO date '" + text + "'");
    }
}

inline void require_file(const std::string& flag, const std::string& path) {
    if (path.empty()) throw ValidationError(flag + " is required");
    if (!fs::is_regular_file(path)) throw ValidationError(flag + ": file not found '" + path + "'");
}

inline void validate_common(const RunConfig& cfg) {
    require_file("--issues", cfg.issues_path);
    require_file("--prices", cfg.prices_path);
    require_file("--treasury", cfg.treasury_path);
    if (cfg.out_dir.empty()) throw ValidationError("--out is required");
    try {
        cfg.basis.validate();
    } catch (const Error& e) {
        throw ValidationError(std::string("--K/--alpha-decay: ") + e.what());
    }
    try {
        cfg.filter.validate();
    } catch (const Error& e) {
        throw ValidationError(std::string("--delta-sq/--epsilon: ") + e.what());
    }
    if (!(cfg.lambda > 0.0)) throw ValidationError("--lambda must be positive");
    if (!(cfg.prior_noise_sd > 0.0)) throw ValidationError("--prior-noise-sd must be positive");
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw ValidationError("--level must lie in (0,1)");
    if (cfg.jobs < 1) throw ValidationError("--jobs must be at least 1");
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec || !fs::is_directory(cfg.out_dir)) throw ValidationError("--out: cannot create '" + cfg.out_dir + "'");
}

// ---------------------------------------------------------------- inputs

struct Inputs {
    std::vector<IssueRecord> issues;
    std::vector<PriceRecord> prices;
    TreasuryBook treasury;
    std::vector<std::string> warnings;
};

inline Inputs load_inputs(const RunConfig& cfg) {
    Inputs in;
    std::ifstream issues(cfg.issues_path), prices(cfg.prices_path), treasury(cfg.treasury_path);
    auto ir = parse_issues(issues, cfg.strict);
    auto pr = parse_prices(prices, cfg.strict);
    in.issues = std::move(ir.records);
    in.prices = std::move(pr.records);
    in.warnings = std::move(ir.warnings);
    in.warnings.insert(in.warnings.end(), pr.warnings.begin(), pr.warnings.end());
    in.treasury = TreasuryBook::parse(treasury);
    return in;
}

inline NIGParams prior_for(const RunConfig& cfg) {
    return default_prior(cfg.basis, cfg.lambda, cfg.prior_noise_sd * cfg.prior_noise_sd);
}

inline WeightScheme weights_for(const RunConfig& cfg) {
    return cfg.estimator == Estimator::ols ? WeightScheme::uniform : cfg.weights;
}

/// Runs `work(i)` for i in [0, n) on up to `jobs` threads; first error per index is kept.
template <typename Fn>
std::vector<std::optional<std::string>> parallel_for(std::size_t n, int jobs, Fn&& work) {
    std::vector<std::optional<std::string>> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                work(i);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const auto threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), std::max<std::size_t>(n, 1));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return errors;
}

inline json tally_json(const ExclusionTally& t, std::size_t kept) {
    json j;
    j["kept"] = kept;
    j["off_date"] = t.off_date;
    j["unresolved"] = t.unresolved;
    j["non_vanilla"] = t.non_vanilla;
    j["not_on_the_run"] = t.not_on_the_run;
    j["matured"] = t.matured;
    j["duplicate"] = t.duplicate;
    j["invalid"] = t.invalid;
    return j;
}

// ---------------------------------------------------------------- fit

struct IssuerFit {
    std::string issuer_id;
    Date as_of;
    std::optional<PointFit> point;
    std::optional<NIGParams> posterior;
    SpreadCurve curve;
    std::size_t n_obs = 0;
    double condition_number = 0.0;
    bool underdetermined = false;
};

inline IssuerFit fit_panel(const Panel& panel, const RunConfig& cfg, const TreasuryCurve& treasury) {
    const BasisDesign design = build_design(panel.members, cfg.basis, weights_for(cfg));
    IssuerFit out;
    out.issuer_id = panel.issuer_id;
    out.as_of = panel.as_of;
    out.n_obs = static_cast<std::size_t>(design.rows());
    out.underdetermined = design.underdetermined();
    const TenorGrid grid = TenorGrid::standard();
    switch (cfg.estimator) {
        case Estimator::ols: out.point = fit_ols(design); break;
        case Estimator::wls: out.point = fit_wls(design); break;
        case Estimator::rwls: out.point = fit_rwls(design, cfg.lambda); break;
        case Estimator::bayes:
        case Estimator::filter: out.posterior = posterior_update(prior_for(cfg), design); break;
    }
    if (out.point) {
        out.condition_number = out.point->condition_number;
        out.curve = spread_curve(panel.issuer_id, panel.as_of, out.point->beta_full, cfg.basis, treasury, grid);
    } else {
        Eigen::MatrixXd precision = design.X.transpose() * design.X;
        precision += prior_for(cfg).Lambda.inverse();
        out.condition_number = detail::condition_of(precision);
        out.curve = spread_curve(panel.issuer_id, panel.as_of, *out.posterior, cfg.basis, treasury, grid, cfg.level,
                                 cfg.bands);
    }
    return out;
}

inline json curve_json(const IssuerFit& f, const RunConfig& cfg) {
    json j;
    j["issuer_id"] = f.issuer_id;
    j["as_of"] = f.as_of.iso();
    j["estimator"] = to_string(cfg.estimator);
    j["basis"] = {{"K", cfg.basis.K}, {"alpha_decay", number(cfg.basis.basis_decay)}};
    if (f.point) {
        j["beta"] = number_array(f.point->beta_full);
        j["lambda"] = number(f.point->lambda);
    } else {
        j["beta"] = number_array(full_beta(f.posterior->mu));
        j["lambda"] = number(cfg.lambda);
        j["posterior"] = posterior_json(*f.posterior);
        j["level"] = number(cfg.level);
    }
    j["diagnostics"] = {{"n_obs", f.n_obs},
                        {"underdetermined", f.underdetermined},
                        {"condition_number", number(f.condition_number)},
                        {"discount_violation_tenors", number_array(f.curve.violation_tenors())}};
    j["spread_curve"] = spread_json(f.curve);
    return j;
}

inline Date resolve_as_of(const RunConfig& cfg, const std::vector<PriceRecord>& prices) {
    if (!cfg.as_of.empty()) return parse_date_flag("--as-of", cfg.as_of);
    const auto dates = trade_dates(prices);
    if (dates.size() == 1) return dates.front();
    if (dates.empty()) throw ValidationError("--prices: no price records");
    throw ValidationError("--as-of is required: price file holds " + std::to_string(dates.size()) + " dates");
}

inline int cmd_fit(const RunConfig& cfg, std::ostream& err = std::cerr) {
    try {
        if (cfg.estimator == Estimator::filter)
            throw ValidationError("--estimator filter is run by the 'filter' subcommand");
        validate_common(cfg);
        if (!cfg.as_of.empty()) parse_date_flag("--as-of", cfg.as_of);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }
    try {
        Inputs in = load_inputs(cfg);
        Date as_of;
        try {
            as_of = resolve_as_of(cfg, in.prices);
        } catch (const ValidationError& e) {
            err << "error: " << e.what() << '\n';
            return kValidation;
        }
        const TreasuryCurve treasury = in.treasury.curve_for(as_of);
        PanelSet ps = build_panels(in.issues, in.prices, as_of, {cfg.accrual, cfg.strict});
        for (const auto& w : in.warnings) err << "warning: " << w << '\n';
        for (const auto& w : ps.warnings) err << "warning: " << w << '\n';

        const auto errors = parallel_for(ps.panels.size(), cfg.jobs, [&](std::size_t i) {
            const IssuerFit f = fit_panel(ps.panels[i], cfg, treasury);
            const fs::path dir = fs::path(cfg.out_dir) / f.issuer_id;
            write_atomic(dir / "spread.csv", spread_csv(f.curve));
            write_atomic(dir / "curve.json", curve_json(f, cfg).dump(2) + "\n");
        });
        json summary;
        summary["as_of"] = as_of.iso();
        summary["estimator"] = to_string(cfg.estimator);
        summary["records"] = tally_json(ps.excluded, ps.kept);
        json failed = json::object();
        for (std::size_t i = 0; i < errors.size(); ++i) {
            if (!errors[i]) continue;
            if (cfg.strict) {
                err << "error: issuer " << ps.panels[i].issuer_id << ": " << *errors[i] << '\n';
                return kDataError;
            }
            err << "warning: issuer " << ps.panels[i].issuer_id << " skipped: " << *errors[i] << '\n';
            failed[ps.panels[i].issuer_id] = *errors[i];
        }
        summary["failed_issuers"] = failed;
        write_atomic(fs::path(cfg.out_dir) / "summary.json", summary.dump(2) + "\n");
        return kOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return cfg.strict ? kDataError : kValidation;
    }
}

// ---------------------------------------------------------------- filter

inline std::string timeseries_csv(const IssuerTrack& track, const TreasuryBook& book, const RunConfig& cfg) {
    std::ostringstream out;
    out << "state_date,tenor,spread,band_lo,band_hi,risk_5y\n";
    const TenorGrid grid = TenorGrid::standard();
    for (const TrackState& s : track.states) {
        const SpreadCurve c = spread_curve(track.issuer_id, s.date, s.posterior, track.basis, book.curve_for(s.date),
                                           grid, cfg.level, cfg.bands);
        const auto risk = c.risk_to.find(5.0);
        const std::string risk5 = format_number(risk == c.risk_to.end() ? std::nan("") : risk->second);
        for (std::size_t i = 0; i < c.tenors.size(); ++i)
            out << s.date.iso() << ',' << format_number(c.tenors[i]) << ',' << format_number(c.spread[i]) << ','
                << format_number(c.band_lo[i]) << ',' << format_number(c.band_hi[i]) << ',' << risk5 << '\n';
    }
    return out.str();
}

inline std::string track_text(const IssuerTrack& track) {
    std::ostringstream out;
    write_track(out, track);
    return out.str();
}

/// Track file for `issuer` under a --resume target: a single track file or a previous --out directory.
inline fs::path resume_track_path(const std::string& resume, const std::string& issuer) {
    if (fs::is_regular_file(resume)) {
        std::ifstream in(resume);
        return read_track(in).issuer_id == issuer ? fs::path(resume) : fs::path();
    }
    return fs::path(resume) / issuer / "track.txt";
}

inline int cmd_filter(const RunConfig& cfg, std::ostream& err = std::cerr) {
    std::optional<Date> from, to;
    try {
        validate_common(cfg);
        if (!cfg.from.empty()) from = parse_date_flag("--from", cfg.from);
        if (!cfg.to.empty()) to = parse_date_flag("--to", cfg.to);
        if (from && to && *to < *from) throw ValidationError("--to precedes --from");
        if (!cfg.resume.empty() && !fs::exists(cfg.resume))
            throw ValidationError("--resume: no such track file or directory '" + cfg.resume + "'");
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }
    try {
        Inputs in = load_inputs(cfg);
        for (const auto& w : in.warnings) err << "warning: " << w << '\n';

        std::vector<Date> dates;
        for (Date d : trade_dates(in.prices))
            if ((!from || d >= *from) && (!to || d <= *to)) dates.push_back(d);

        // issuer -> (date -> panel)
        std::map<std::string, std::vector<Panel>> by_issuer;
        ExclusionTally tally;
        std::size_t kept = 0;
        std::map<Date, std::vector<PriceRecord>> prices_by_date;
        for (const auto& p : in.prices) prices_by_date[p.trade_date].push_back(p);
        for (Date d : dates) {
            PanelSet ps = build_panels(in.issues, prices_by_date[d], d, {cfg.accrual, cfg.strict});
            for (const auto& w : ps.warnings) err << "warning: " << w << '\n';
            kept += ps.kept;
            tally.unresolved += ps.excluded.unresolved;
            tally.non_vanilla += ps.excluded.non_vanilla;
            tally.not_on_the_run += ps.excluded.not_on_the_run;
            tally.matured += ps.excluded.matured;
            tally.duplicate += ps.excluded.duplicate;
            tally.invalid += ps.excluded.invalid;
            for (auto& panel : ps.panels) by_issuer[panel.issuer_id].push_back(std::move(panel));
        }
        std::vector<std::string> issuers;
        for (const auto& [id, panels] : by_issuer) issuers.push_back(id);
        if (fs::is_regular_file(cfg.resume)) {
            std::ifstream tin(cfg.resume);
            const std::string id = read_track(tin).issuer_id;
            if (!by_issuer.count(id)) issuers.push_back(id);
            std::sort(issuers.begin(), issuers.end());
        } else if (!cfg.resume.empty()) {
            for (const auto& entry : fs::directory_iterator(cfg.resume))
                if (fs::is_regular_file(entry.path() / "track.txt") && !by_issuer.count(entry.path().filename().string()))
                    issuers.push_back(entry.path().filename().string());
            std::sort(issuers.begin(), issuers.end());
        }

        const auto errors = parallel_for(issuers.size(), cfg.jobs, [&](std::size_t i) {
            const std::string& id = issuers[i];
            std::optional<IssuerTrack> track;
            if (!cfg.resume.empty()) {
                const fs::path tp = resume_track_path(cfg.resume, id);
                if (fs::is_regular_file(tp)) {
                    std::ifstream tin(tp);
                    track = read_track(tin);
                    require(track->issuer_id == id, ErrorCode::parse, "track file issuer mismatch in " + tp.string());
                }
            }
            if (auto it = by_issuer.find(id); it != by_issuer.end()) {
                for (const Panel& panel : it->second) {
                    if (track && panel.as_of <= track->last().date) continue;
                    const BasisConfig& basis = track ? track->basis : cfg.basis;
                    const BasisDesign design = build_design(panel.members, basis, cfg.weights);
                    if (!track)
                        track = initialize_track(id, design, panel.as_of, cfg.filter, prior_for(cfg));
                    else
                        advance(*track, design, panel.as_of);
                }
            }
            if (!track) return;
            const fs::path dir = fs::path(cfg.out_dir) / id;
            write_atomic(dir / "track.txt", track_text(*track));
            write_atomic(dir / "timeseries.csv", timeseries_csv(*track, in.treasury, cfg));
        });
        json summary;
        summary["from"] = dates.empty() ? json(nullptr) : json(dates.front().iso());
        summary["to"] = dates.empty() ? json(nullptr) : json(dates.back().iso());
        summary["records"] = tally_json(tally, kept);
        json failed = json::object();
        for (std::size_t i = 0; i < errors.size(); ++i) {
            if (!errors[i]) continue;
            if (cfg.strict) {
                err << "error: issuer " << issuers[i] << ": " << *errors[i] << '\n';
                return kDataError;
            }
            err << "warning: issuer " << issuers[i] << " skipped: " << *errors[i] << '\n';
            failed[issuers[i]] = *errors[i];
        }
        summary["failed_issuers"] = failed;
        write_atomic(fs::path(cfg.out_dir) / "summary.json", summary.dump(2) + "\n");
        return kOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return cfg.strict ? kDataError : kValidation;
    }
}

// ---------------------------------------------------------------- simulate

struct SimulationSpec {
    UniverseSpec universe;
    TreasuryCurve treasury;
};

inline SpreadFunction parse_spread(const json& j) {
    const std::string shape = j.at("shape").get<std::string>();
    if (shape == "flat") return SpreadFunction::flat(j.at("level").get<double>());
    if (shape == "linear") return SpreadFunction::linear(j.at("intercept").get<double>(), j.at("slope").get<double>());
    if (shape == "widening")
        return SpreadFunction::widening(j.at("initial").get<double>(), j.at("per_state").get<double>());
    throw ValidationError("unknown spread shape '" + shape + "'");
}

/// Reads a simulation spec; `seed_override` replaces the top-level seed.
inline SimulationSpec parse_simulation_spec(std::istream& in, std::optional<std::uint64_t> seed_override) {
    try {
        const json j = json::parse(in);
        SimulationSpec s;
        s.universe.start = Date::parse(j.at("start_date").get<std::string>());
        s.universe.n_states = j.value("n_states", 1);
        if (s.universe.n_states < 1) throw ValidationError("n_states must be at least 1");
        const std::uint64_t seed = seed_override.value_or(j.value("seed", std::uint64_t{1}));
        BasisConfig basis;
        const json& tj = j.at("treasury");
        basis.K = tj.value("K", 8);
        basis.basis_decay = tj.value("alpha_decay", 0.05);
        if (tj.contains("beta")) {
            auto beta = tj.at("beta").get<std::vector<double>>();
            if (static_cast<int>(beta.size()) != basis.K) throw ValidationError("treasury beta must have K entries");
            s.treasury = TreasuryCurve::fitted(s.universe.start, Eigen::Map<Eigen::VectorXd>(beta.data(), basis.K), basis);
        } else {
            s.treasury = TreasuryCurve::tabulated(s.universe.start, {{1.0, tj.at("flat_yield").get<double>()}});
        }
        std::size_t index = 0;
        for (const json& ij : j.at("issuers")) {
            SyntheticIssuerSpec is;
            is.issuer_id = ij.at("issuer_id").get<std::string>();
            is.spread = parse_spread(ij.at("spread"));
            if (ij.contains("bond_terms")) is.bond_terms = ij.at("bond_terms").get<std::vector<double>>();
            is.coupon_rate = ij.value("coupon_rate", is.coupon_rate);
            is.coupon_freq = ij.value("coupon_freq", is.coupon_freq);
            is.noise_sd = ij.value("noise_sd", is.noise_sd);
            is.seed = ij.contains("seed") && !seed_override ? ij.at("seed").get<std::uint64_t>() : seed + index;
            is.validate();
            s.universe.issuers.push_back(is);
            ++index;
        }
        if (s.universe.issuers.empty()) throw ValidationError("spec lists no issuers");
        return s;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed spec: ") + e.what());
    } catch (const Error& e) {
        throw ValidationError(std::string("malformed spec: ") + e.what());
    }
}

inline int cmd_simulate(const std::string& spec_path, const std::string& out_dir,
                        std::optional<std::uint64_t> seed, std::ostream& err = std::cerr) {
    SimulationSpec spec;
    try {
        require_file("--spec", spec_path);
        if (out_dir.empty()) throw ValidationError("--out is required");
        std::ifstream in(spec_path);
        spec = parse_simulation_spec(in, seed);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }
    try {
        const SyntheticUniverse u = generate_universe(spec.universe, spec.treasury);
        const fs::path dir(out_dir);
        write_atomic(dir / "issues.csv", u.issues_csv());
        write_atomic(dir / "prices.csv", u.prices_csv());
        write_atomic(dir / "treasury.csv", u.treasury_csv());
        write_atomic(dir / "truth.csv", u.truth_csv());
        return kOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }
}

// ---------------------------------------------------------------- entry point

inline int run(int argc, char** argv, std::ostream& err = std::cerr) {
    CLI::App cli{"credcurve: issuer discount curves and default spreads from bond prices"};
    cli.require_subcommand(1);

    RunConfig cfg;
    std::string estimator = "bayes", weights = "inverse_term", accrual = "paper_literal", bands = "observation";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--issues", cfg.issues_path, "issues.csv");
        sub->add_option("--prices", cfg.prices_path, "prices.csv");
        sub->add_option("--treasury", cfg.treasury_path, "treasury.csv (tenor_years,zero_yield[,as_of])");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--lambda", cfg.lambda, "ridge strength / prior precision")->capture_default_str();
        sub->add_option("--delta-sq", cfg.filter.delta_sq, "variance amplifier per state")->capture_default_str();
        sub->add_option("--epsilon", cfg.filter.epsilon, "variance-of-variance floor")->capture_default_str();
        sub->add_option("--ridge-bump", cfg.filter.ridge_bump, "covariance bump per state")->capture_default_str();
        sub->add_option("--level", cfg.level, "credible level of the bands")->capture_default_str();
        sub->add_option("--K", cfg.basis.K, "number of basis functions")->capture_default_str();
        sub->add_option("--alpha-decay", cfg.basis.basis_decay, "basis decay rate")->capture_default_str();
        sub->add_option("--weights", weights, "inverse_term | proportional_term | uniform")->capture_default_str();
        sub->add_option("--accrual", accrual, "paper_literal | elapsed_fraction")->capture_default_str();
        sub->add_option("--bands", bands, "observation | mean")->capture_default_str();
        sub->add_option("--prior-noise-sd", cfg.prior_noise_sd, "prior mean noise sd, price per 100")
            ->capture_default_str();
        sub->add_flag("--strict", cfg.strict, "fail on any malformed or unresolvable record");
        sub->add_option("--jobs", cfg.jobs, "issuers processed in parallel")->capture_default_str();
    };

    auto* fit = cli.add_subcommand("fit", "fit one date per issuer");
    add_common(fit);
    fit->add_option("--estimator", estimator, "ols | wls | rwls | bayes")->capture_default_str();
    fit->add_option("--as-of", cfg.as_of, "valuation date (YYYY-MM-DD)");

    auto* filter = cli.add_subcommand("filter", "filter a date range per issuer");
    add_common(filter);
    filter->add_option("--from", cfg.from, "first state date");
    filter->add_option("--to", cfg.to, "last state date");
    filter->add_option("--resume", cfg.resume, "track file, or a previous --out directory of track files");
    filter->add_flag("--daily-propagation", cfg.filter.daily_propagation, "scale delta-sq by elapsed weekdays");

    std::string spec_path, sim_out;
    std::optional<std::uint64_t> seed;
    auto* sim = cli.add_subcommand("simulate", "write a synthetic universe");
    sim->add_option("--spec", spec_path, "simulation spec (JSON)");
    sim->add_option("--out", sim_out, "output directory");
    sim->add_option("--seed", seed, "override the spec seed");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return cli.exit(e);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }

    if (sim->parsed()) return cmd_simulate(spec_path, sim_out, seed, err);
    try {
        cfg.estimator = filter->parsed() ? Estimator::filter : parse_estimator(estimator);
        cfg.weights = parse_weights(weights);
        cfg.accrual = parse_accrual(accrual);
        cfg.bands = parse_bands(bands);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }
    return fit->parsed() ? cmd_fit(cfg, err) : cmd_filter(cfg, err);
}

}  // namespace credcurve::app
