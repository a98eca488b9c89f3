#pragma once

#include <stdexcept>
#include <string>

namespace aprobe {

// Error classes map onto the CLI exit-code contract:
//   2 = configuration error, 3 = numerical-validity error, 4 = capability error.
enum class ErrorCode { internal = 1, config = 2, validity = 3, capability = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorCode::config, w) {}
};
struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& w) : Error(ErrorCode::config, w) {}
};
struct TruncationError : Error {
    explicit TruncationError(const std::string& w) : Error(ErrorCode::validity, w) {}
};
struct NormError : Error {
    explicit NormError(const std::string& w) : Error(ErrorCode::validity, w) {}
};
struct PerturbationError : Error {
    explicit PerturbationError(const std::string& w) : Error(ErrorCode::validity, w) {}
};
struct GridCoverageError : Error {
    explicit GridCoverageError(const std::string& w) : Error(ErrorCode::validity, w) {}
};
struct ZeroInformation : Error {
    explicit ZeroInformation(const std::string& w) : Error(ErrorCode::validity, w) {}
};
struct NonConvergence : Error {
    explicit NonConvergence(const std::string& w) : Error(ErrorCode::validity, w) {}
};
struct BracketError : Error {
    explicit BracketError(const std::string& w) : Error(ErrorCode::validity, w) {}
};
struct DimensionCap : Error {
    explicit DimensionCap(const std::string& w) : Error(ErrorCode::capability, w) {}
};
struct CapabilityError : Error {
    explicit CapabilityError(const std::string& w) : Error(ErrorCode::capability, w) {}
};
struct EigenFailure : Error {
    explicit EigenFailure(const std::string& w) : Error(ErrorCode::internal, w) {}
};

}  // namespace aprobe
