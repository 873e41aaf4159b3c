#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wicklab {

/// Machine-readable failure categories. The CLI maps these onto exit codes
/// (validation-type codes exit 2, numeric failures exit 3).
enum class ErrorCode {
    domain,          // argument outside the operation's precondition
    resolution,      // grid too coarse for the spectral bandwidth
    coverage,        // field has modes outside the dyadic partition
    phase,           // gamma/beta outside the L2 phase
    hypothesis,      // kernel violates the decay hypothesis it was checked against
    tail_required,   // infinite kernel used without an analytic tail bound
    config,          // bad CLI/config input
    no_convergence,  // iterative solver stalled
    io,
};

constexpr std::string_view to_string(ErrorCode c) noexcept {
    switch (c) {
    case ErrorCode::domain: return "E_DOMAIN";
    case ErrorCode::resolution: return "E_RESOLUTION";
    case ErrorCode::coverage: return "E_COVERAGE";
    case ErrorCode::phase: return "E_PHASE";
    case ErrorCode::hypothesis: return "E_HYPOTHESIS";
    case ErrorCode::tail_required: return "E_TAIL_REQUIRED";
    case ErrorCode::config: return "E_CONFIG";
    case ErrorCode::no_convergence: return "E_NO_CONVERGENCE";
    case ErrorCode::io: return "E_IO";
    }
    return "E_UNKNOWN";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool ok, ErrorCode code, const std::string& what) {
    if (!ok) throw Error(code, what);
}

} // namespace wicklab
