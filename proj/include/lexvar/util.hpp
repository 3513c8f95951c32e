#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lexvar {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Hashing. FNV-1a over bytes, splitmix64 as the mixing step. Both are fixed
// algorithms, so seeds derived from them are stable across platforms.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Seeded generator with a portable output sequence.
///
/// The standard distributions (uniform_int_distribution, normal_distribution)
/// are implementation defined, so every draw the library makes goes through
/// the members below instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Uniform double in [0, 1).
  double uniform01();
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Shortest round-trip decimal representation; identical bytes for identical
/// doubles, which the determinism guarantees of the pipeline rely on.
std::string format_double(double value);

std::vector<std::string> split(std::string_view text, char delim);
std::string_view trim(std::string_view text);
std::string to_lower_ascii(std::string_view text);

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Callers write results
/// into preallocated slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body);

}  // namespace lexvar
