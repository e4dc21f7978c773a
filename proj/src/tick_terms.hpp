#pragma once

#include "epps/tick_correction.hpp"
#include "pair_columns.hpp"

namespace epps::detail {

// Discretization-correction terms shared by the tick and combined estimators.
struct TickTerms {
  Standardization s1;  // mean of r1, sigma_hat1
  Standardization s2;
  double cov_change1_err2 = 0.0;
  double cov_change2_err1 = 0.0;
  double cov_err1_err2 = 0.0;
};

// Requires non-degenerate raw variances; throws like corrected_sigma.
TickTerms tick_terms(const PairColumns& cols, const DiscretizationMoments& m1,
                     const DiscretizationMoments& m2);

}  // namespace epps::detail
