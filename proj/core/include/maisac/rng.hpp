#pragma once

#include <complex>
#include <cstdint>

namespace maisac {

/// Deterministic stream of pseudo-random numbers.
///
/// The generator is SplitMix64 (Steele, Lea & Flood's fixed-increment
/// Weyl sequence with a 64-bit finalizer).  It is spelled out here so a
/// reimplementation in any language reproduces the exact same draws:
///
///   state += 0x9e3779b97f4a7c15
///   z = state
///   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
///   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
///   output = z ^ (z >> 31)
///
/// uniform01() maps the top 53 bits to [0, 1).  Gaussian draws use the
/// Box-Muller transform (see std_complex_gaussian); no rejection, so the
/// number of raw draws per call is fixed and the stream never desyncs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform double in [0, 1), 53 random bits.
  double uniform01();

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  /// Circularly-symmetric complex Gaussian, zero mean, unit total variance
  /// (real and imaginary parts each N(0, 1/2)).  Consumes exactly two
  /// uniforms: re = sqrt(-ln u1) cos(2 pi u2), im = sqrt(-ln u1) sin(2 pi u2),
  /// with u1 drawn from (0, 1] so the log is finite.
  std::complex<double> std_complex_gaussian();

  /// Independent substream for a named purpose.  Forking with distinct salts
  /// yields decorrelated streams; the parent stream is not advanced.
  /// Defined as Rng(finalize(state ^ (0x9e3779b97f4a7c15 * (2*salt + 1)))).
  Rng fork(std::uint64_t salt) const;

 private:
  std::uint64_t state_;
};

}  // namespace maisac
