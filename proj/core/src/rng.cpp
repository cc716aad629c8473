#include "rightmost/rng.hpp"

#include "rightmost/errors.hpp"

namespace rightmost {

BernoulliWord::BernoulliWord(double p) : p_(p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ContractViolation("Bernoulli probability outside [0,1]");
  if (p == 1.0) {
    always_one_ = true;
    return;
  }
  // Doubling and subtracting one are exact in binary floating point, so
  // this terminates with the full expansion of p.
  double rest = p;
  while (rest > 0.0) {
    rest *= 2.0;
    const bool digit = rest >= 1.0;
    if (digit) rest -= 1.0;
    digits_.push_back(digit ? 1 : 0);
  }
}

}  // namespace rightmost
