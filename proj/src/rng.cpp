#include "soc/rng.hpp"

#include <cmath>
#include <numbers>

namespace soc {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

} // namespace

RandomStream::RandomStream(std::initializer_list<std::uint64_t> key) : state_(kGamma) {
    for (std::uint64_t w : key) state_ = mix64(state_ ^ (w + kGamma));
}

std::uint64_t RandomStream::next_u64() {
    state_ += kGamma;
    return mix64(state_);
}

double RandomStream::next_uniform() {
    // 53 mantissa bits, shifted into (0,1) so log() stays finite.
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return u + 0x1.0p-54;
}

double RandomStream::next_normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

Eigen::VectorXd RandomStream::normal_vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = next_normal();
    return v;
}

} // namespace soc
