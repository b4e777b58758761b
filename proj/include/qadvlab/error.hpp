#pragma once

#include <stdexcept>
#include <string>

namespace qadvlab {

enum class ErrorCode {
    InvalidArgument,
    HermiticityViolation,
    TraceViolation,
    PsdViolation,
    DimensionCap,
    UnsupportedOrder,
    AssumptionViolation,
    NumericalFailure,
    ConfigError,
    IoError,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    // Exit-code convention used by the CLI: 1 = validation, 2 = numerical.
    int exit_code() const noexcept { return code_ == ErrorCode::NumericalFailure ? 2 : 1; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, ErrorCode code, const std::string& msg) {
    if (!cond) fail(code, msg);
}

} // namespace qadvlab
