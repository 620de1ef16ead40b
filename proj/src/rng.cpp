#include "nbp/rng.hpp"

namespace nbp {

std::size_t RngStream::discrete(std::span<const double> probs) {
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw std::invalid_argument("discrete: negative weight");
    total += p;
  }
  if (!(total > 0.0)) throw std::invalid_argument("discrete: zero total weight");
  double u = next_double() * total;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    u -= probs[i];
    if (u < 0.0) return i;
  }
  return probs.empty() ? 0 : probs.size() - 1;
}

}  // namespace nbp
