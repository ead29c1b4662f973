#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ecgemo {

/// Mixes a parent seed with a stream id. Every stage derives its own seed
/// from the master seed this way, so any stage can be re-run in isolation.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);

/// FNV-1a hash of a stage tag, used as a stream id for derive_seed.
constexpr std::uint64_t tag(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seeded generator with platform-independent draws. std distributions are
/// implementation-defined, so only the raw 64-bit engine output is used.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);
  /// Standard normal via Box-Muller.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ecgemo
