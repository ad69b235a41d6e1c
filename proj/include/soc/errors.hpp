#pragma once

#include <stdexcept>
#include <string>

namespace soc {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& msg) : Error("shape mismatch: " + msg) {}
};

struct SingularCovariance : Error {
    explicit SingularCovariance(const std::string& msg)
        : Error("singular covariance: " + msg) {}
};

struct NonPsdInput : Error {
    explicit NonPsdInput(const std::string& msg) : Error("matrix not PSD: " + msg) {}
};

struct InvalidProbability : Error {
    explicit InvalidProbability(const std::string& msg)
        : Error("probability outside (0,1): " + msg) {}
};

struct NonPositiveAlpha : Error {
    explicit NonPositiveAlpha(const std::string& msg)
        : Error("alpha must be positive: " + msg) {}
};

struct LengthMismatch : Error {
    explicit LengthMismatch(const std::string& msg) : Error("length mismatch: " + msg) {}
};

struct NonFiniteState : Error {
    explicit NonFiniteState(const std::string& msg) : Error("non-finite state: " + msg) {}
};

struct UnknownEnvironment : Error {
    explicit UnknownEnvironment(const std::string& msg)
        : Error("unknown environment: " + msg) {}
};

struct DivergedInference : Error {
    explicit DivergedInference(const std::string& msg)
        : Error("inference diverged: " + msg) {}
};

struct SingularInput : Error {
    explicit SingularInput(const std::string& msg) : Error("singular input: " + msg) {}
};

struct NeuroticBreakdown : Error {
    explicit NeuroticBreakdown(const std::string& msg)
        : Error("risk-sensitive recursion lost positive definiteness: " + msg) {}
};

struct LinearOnly : Error {
    explicit LinearOnly(const std::string& msg)
        : Error("operation requires a linear-Gaussian model: " + msg) {}
};

struct InfeasibleTarget : Error {
    explicit InfeasibleTarget(const std::string& msg)
        : Error("infeasible terminal target: " + msg) {}
};

struct StageOutOfRange : Error {
    explicit StageOutOfRange(const std::string& msg)
        : Error("stage index out of range: " + msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error("io error: " + msg) {}
};

} // namespace soc
