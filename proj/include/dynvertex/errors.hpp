#pragma once

#include <stdexcept>
#include <string>

namespace dv {

enum class ErrorKind {
    SingularParameter,
    NonConvergent,
    NonTerminating,
    PatternMismatch,
    SizeLimit,
    InadmissibleWeights,
    ContourInfeasible,
    NotConverged,
    OutOfDomain,
    ModeError,
    InadmissibleParameters,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

// magnitude below which a denominator counts as vanishing
inline constexpr double kPoleTol = 1e-13;

} // namespace dv
