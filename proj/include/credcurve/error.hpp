/**
 * @file error.hpp
 * @brief Error type shared by every credcurve module
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace credcurve {

enum class ErrorCode {
    domain,                 // argument outside the documented domain
    rejected_instrument,    // bond is not vanilla
    matured_instrument,     // valuation date on or after maturity
    empty_panel,            // no observations where at least one is required
    duplicate_observation,  // same bond twice on one date
    mixed_panel,            // observations from different trade dates
    rank_deficient,         // normal equations singular or ill-conditioned
    negative_scale,         // inverse-gamma scale lost positivity
    undefined_variance,     // inverse-gamma shape <= 2
    ordering,               // state dates not strictly increasing
    parse,                  // malformed input record
    unresolved_reference,   // price for an unknown bond
    io,                     // file could not be read or written
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::domain: return "domain";
        case ErrorCode::rejected_instrument: return "rejected-instrument";
        case ErrorCode::matured_instrument: return "matured-instrument";
        case ErrorCode::empty_panel: return "empty-panel";
        case ErrorCode::duplicate_observation: return "duplicate-observation";
        case ErrorCode::mixed_panel: return "mixed-panel";
        case ErrorCode::rank_deficient: return "rank-deficient";
        case ErrorCode::negative_scale: return "negative-scale";
        case ErrorCode::undefined_variance: return "undefined-variance";
        case ErrorCode::ordering: return "ordering";
        case ErrorCode::parse: return "parse";
        case ErrorCode::unresolved_reference: return "unresolved-reference";
        case ErrorCode::io: return "io";
    }
    return "unknown";
}

/// Exception carrying a machine-checkable code next to the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
    if (!condition) fail(code, what);
}

}  // namespace credcurve
