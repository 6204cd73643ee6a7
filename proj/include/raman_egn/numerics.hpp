#pragma once

#include <cstdint>
#include <vector>

// Shared numerical helpers: Gauss-Legendre rules and the counter-based
// random stream used by the Monte-Carlo integrator. The RNG is stateless
// per sample (value = f(stream, counter)), so estimates do not depend on
// how samples are partitioned across workers.

namespace raman {

struct QuadratureRule {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

// Nodes/weights for the n-point Gauss-Legendre rule on [0, 1].
// Results are cached per order; thread-safe.
const QuadratureRule& gauss_legendre(int n);

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stateless uniform stream: sample index `counter`, coordinate `dim`.
class CounterRng {
 public:
  explicit CounterRng(uint64_t stream) : stream_(stream) {}

  double uniform01(uint64_t counter, uint32_t dim) const {
    uint64_t x = splitmix64(stream_ ^ splitmix64(counter + 0x632BE59BD9B4E019ull));
    x = splitmix64(x + dim);
    return static_cast<double>(x >> 11) * 0x1.0p-53;
  }

 private:
  uint64_t stream_;
};

// Order-insensitive derivation of per-task stream ids.
inline uint64_t derive_stream(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
  uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ (a * 0x9E3779B97F4A7C15ull));
  s = splitmix64(s ^ (b * 0xC2B2AE3D27D4EB4Full));
  s = splitmix64(s ^ (c * 0x165667B19E3779F9ull));
  return s;
}

}  // namespace raman
