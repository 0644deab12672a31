#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <utility>
#include <vector>

namespace burstlink {

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

// Complement pair (1 - x, x') with x' within one ulp of x and a sum that is
// exactly 1. When x >= 1/2 the subtraction 1 - x is exact (Sterbenz), so x
// itself is kept; otherwise the computed complement q >= 1/2 makes 1 - q
// exact and x is nudged instead.
template <class Scalar>
std::pair<Scalar, Scalar> stochastic_pair(Scalar x) {
  const Scalar q = Scalar(1) - x;
  if (x >= Scalar(0.5)) return {q, x};
  return {q, Scalar(1) - q};
}

// Two-state chain over {GOOD, BAD}; row 0 is GOOD. Rows sum to exactly 1.
template <class Scalar>
Eigen::Matrix<Scalar, 2, 2> two_state_matrix(Scalar good_to_bad,
                                             Scalar bad_to_good) {
  const auto [stay_good, go_bad] = stochastic_pair(good_to_bad);
  const auto [stay_bad, go_good] = stochastic_pair(bad_to_good);
  Eigen::Matrix<Scalar, 2, 2> m;
  m << stay_good, go_bad, go_good, stay_bad;
  return m;
}

// Kronecker product fold: joint transition matrix of independent chains.
template <class Scalar>
MatrixX<Scalar> kronecker_fold(const std::vector<Eigen::Matrix<Scalar, 2, 2>>& factors) {
  MatrixX<Scalar> acc = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i)
    acc = Eigen::kroneckerProduct(acc, factors[i]).eval();
  return acc;
}

// Survival sequence of a discrete phase-type law: entry distribution alpha
// over the transient states, sub-stochastic matrix sub. Element n-1 holds
// P(length >= n); the first element is pinned to exactly 1 and later ones
// come from iterated vector-matrix products, never from matrix powers.
template <class Scalar>
std::vector<Scalar> phase_type_survival(const RowVectorX<Scalar>& alpha,
                                        const MatrixX<Scalar>& sub,
                                        std::size_t horizon) {
  std::vector<Scalar> out(horizon, Scalar(0));
  if (horizon == 0) return out;
  out[0] = Scalar(1);
  RowVectorX<Scalar> mass = alpha;
  for (std::size_t n = 2; n <= horizon; ++n) {
    mass = (mass * sub).eval();
    out[n - 1] = mass.sum();
  }
  return out;
}

}  // namespace burstlink
