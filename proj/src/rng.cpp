#include "permuton/rng.hpp"

namespace permuton {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

double to_open_unit(std::uint64_t u) {
  return (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;
}
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ mix64(b ^ 0xD1B54A32D192ED03ULL));
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), key_(hash_combine(mix64(seed), stream)) {}

Rng::result_type Rng::operator()() {
  std::uint64_t c = counter_++;
  return mix64(key_ ^ mix64(c * kGolden));
}

double Rng::uniform() { return to_open_unit((*this)()); }

std::uint64_t Rng::below(std::uint64_t n) {
  // Lemire's multiply-shift with rejection.
  unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < n) {
    std::uint64_t threshold = (0 - n) % n;
    while (lo < threshold) {
      m = static_cast<unsigned __int128>((*this)()) * n;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(key_, hash_combine(stream_, stream));
}

double keyed_uniform(std::uint64_t key) { return to_open_unit(mix64(key)); }

}  // namespace permuton
