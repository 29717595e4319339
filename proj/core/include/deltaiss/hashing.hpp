#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <cstring>
#include <string>

namespace deltaiss {

// FNV-1a, used for data fingerprints and counter-based RNG seeding. Stable
// across platforms, unlike std::hash.
class Fnv1a {
 public:
  void update(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
  }
  void update(double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof(bits));
    update(&bits, sizeof(bits));
  }
  void update(std::uint64_t x) { update(&x, sizeof(x)); }
  void update(const Eigen::MatrixXd& m) {
    update(static_cast<std::uint64_t>(m.rows()));
    update(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) update(m(i, j));
  }
  std::uint64_t digest() const { return state_; }
  std::string hex() const {
    static const char* k = "0123456789abcdef";
    std::string out(16, '0');
    auto v = state_;
    for (int i = 15; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = k[v & 0xF];
      v >>= 4;
    }
    return out;
  }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

// splitmix64: counter-based generator so sampled values never depend on query
// order.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(seed ^ splitmix64(a ^ splitmix64(b)));
}

// Uniform in [0, 1) from 53 high bits.
inline double uniform01(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace deltaiss
