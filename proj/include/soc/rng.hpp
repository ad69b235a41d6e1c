#pragma once

#include <cstdint>
#include <initializer_list>

#include <Eigen/Dense>

namespace soc {

/// Counter-based random stream: a splitmix64 sequence keyed by mixing an
/// arbitrary tuple of words (seed, rollout, stage, channel, ...). Streams with
/// different keys are independent, so rollouts can be evaluated in any order
/// or in parallel without changing results. Normals come from Box-Muller on
/// the raw 64-bit outputs; the whole construction is platform-independent up
/// to libm rounding.
class RandomStream {
public:
    explicit RandomStream(std::initializer_list<std::uint64_t> key);

    std::uint64_t next_u64();
    /// Uniform draw in (0, 1).
    double next_uniform();
    /// Standard normal draw (Box-Muller; two uniforms per pair, one cached).
    double next_normal();
    Eigen::VectorXd normal_vector(int n);

    static constexpr const char* kAlgorithm = "splitmix64+box-muller";

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

} // namespace soc
