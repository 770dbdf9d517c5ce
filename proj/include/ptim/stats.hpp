#pragma once

#include <cstddef>
#include <span>

namespace ptim {

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n); 0 when n < 2
};

Summary summarize(std::span<const double> samples);

// One-sided exact sign test: probability of at least `wins` successes out of
// wins + losses fair coin flips (ties are dropped before calling).
double sign_test_p_value(std::size_t wins, std::size_t losses);

}  // namespace ptim
