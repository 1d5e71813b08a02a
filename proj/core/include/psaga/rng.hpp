#ifndef PSAGA_RNG_HPP
#define PSAGA_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace psaga {

/// Portable seeded generator used for every random choice in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The distribution layer is implemented here rather than taken from
/// <random> because the standard distributions are implementation-defined:
///   - integers in [0, n) use Lemire's multiply-shift with rejection
///     ("nearly divisionless"), so every accepted draw is exactly uniform;
///   - reals in [0, 1) take the top 53 bits of one engine output;
///   - normals use the Box-Muller transform (two engine outputs per pair).
/// Identical seeds therefore give bit-identical streams on every platform.
class Rng {
 public:
  static constexpr std::string_view algorithm =
      "mt19937_64; bounded integers by Lemire multiply-shift rejection; "
      "uniform reals from top 53 bits; normals by Box-Muller";

  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t bounded(std::uint64_t n);

  /// Uniform real in [0, 1).
  double uniform();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer; derives independent child seeds from a root seed.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

}  // namespace psaga

#endif
