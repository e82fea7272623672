#ifndef UDE_RANDOM_HPP
#define UDE_RANDOM_HPP

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ude {

/// splitmix64 finalizer; used to derive independent per-instance seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Portable random source: the engine's output sequence is fixed by the
/// standard, and the conversions below avoid the implementation-defined
/// std:: distributions so datasets are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t k = v.size(); k > 1; --k) {
      std::swap(v[k - 1], v[below(k)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ude

#endif  // UDE_RANDOM_HPP
