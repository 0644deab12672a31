#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

#include "burstlink/ge.hpp"

namespace burstlink {

// Product chain over k independent two-state hops. States pack per-hop bits
// with hop 0 in the highest bit; the end-to-end channel is GOOD only in the
// all-GOOD state (index 0). Dense representation: memory grows as 4^k, so
// chains are capped at kMaxHops.
class MultiHopChain {
 public:
  static constexpr std::size_t kMaxHops = 16;

  explicit MultiHopChain(std::vector<GeModel> hops);

  std::size_t hop_count() const { return hops_.size(); }
  std::size_t state_count() const { return std::size_t{1} << hops_.size(); }
  const std::vector<GeModel>& hops() const { return hops_; }
  const Eigen::MatrixXd& transition_matrix() const { return matrix_; }
  // Product of per-hop stationary laws (hops are independent).
  const Eigen::VectorXd& steady_state() const { return pi_; }
  double pi_all_good() const { return pi_all_good_; }
  double error_rate() const { return error_rate_; }

 private:
  std::vector<GeModel> hops_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd pi_;
  double pi_all_good_ = 0.0;
  double error_rate_ = 0.0;
};

MultiHopChain compose(std::vector<GeModel> hops);

// Burst-length law of the end-to-end channel. Entry n-1 of each curve is the
// value at length n; conditional_survival starts at exactly 1. When no hop
// can fail the all-GOOD state has no exit: no_bursts is set and both curves
// are all zero by convention.
struct BurstDistribution {
  std::vector<double> conditional_survival;  // P(L >= n | burst started)
  std::vector<double> burst_start_rate;      // pi_allgood * P(exit) * survival
  double error_rate = 0.0;
  std::uint64_t horizon = 0;
  bool no_bursts = false;

  double survival(std::uint64_t n) const { return conditional_survival.at(n - 1); }
  double start_rate(std::uint64_t n) const { return burst_start_rate.at(n - 1); }
};

// Phase-type law over the 2^k - 1 BAD states: entry distribution from the
// all-GOOD state, sub-stochastic matrix from restricting the chain to the
// BAD states.
BurstDistribution end_to_end_burst(const MultiHopChain& chain,
                                   std::uint64_t horizon);

// Two-number summary of the end-to-end channel. mean_burst_length is empty
// when bursts never start and infinite when some reachable failure never
// recovers.
struct LumpedView {
  double error_rate = 0.0;
  std::optional<double> mean_burst_length;
};
LumpedView lumped_view(const MultiHopChain& chain);

// Two-state approximation matching the chain's error rate and mean burst
// length. The lumped end-to-end process is generally not Markov, so this is
// a labeled approximation for reporting, not an equivalent model. Empty when
// the mean burst length is undefined or infinite.
std::optional<GeModel> effective_ge(const MultiHopChain& chain);

}  // namespace burstlink
