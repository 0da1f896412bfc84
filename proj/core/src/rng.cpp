#include "maisac/rng.hpp"

#include <cmath>

namespace maisac {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

std::uint64_t finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::next_u64() {
  state_ += kGolden;
  return finalize(state_);
}

double Rng::uniform01() {
  // 53-bit mantissa; 0x1p-53 == 2^-53.
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

std::complex<double> Rng::std_complex_gaussian() {
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  const double radius = std::sqrt(-std::log(u1));
  const double phase = 2.0 * M_PI * u2;
  return {radius * std::cos(phase), radius * std::sin(phase)};
}

Rng Rng::fork(std::uint64_t salt) const {
  return Rng(finalize(state_ ^ (kGolden * (2 * salt + 1))));
}

}  // namespace maisac
