#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "burstlink/errors.hpp"
#include "burstlink/trace.hpp"

namespace burstlink {

// Two-state burst-error channel: p = P(GOOD -> BAD), r = P(BAD -> GOOD).
struct GeModel {
  double p = 0.0;
  double r = 0.0;
  std::string label;

  void validate() const;
};

// Row 0 of the transition matrix is GOOD; rows sum to exactly 1.
Eigen::Matrix2d transition_matrix(const GeModel& m);

enum class ChannelState : std::uint8_t { kGood = 0, kBad = 1 };

// Binary channel observation sequence. Indices listed in run_breaks start a
// fresh recording run: the pair ending there is not a channel transition.
struct StateSequence {
  std::vector<ChannelState> states;
  double period_ms = 0.0;
  std::vector<std::size_t> run_breaks;
};

// Joins two recordings without fabricating a transition across the seam.
StateSequence concat_with_reset(StateSequence a, const StateSequence& b);

// GOOD iff the packet met the deadline (latency <= θ, lost packets never do).
StateSequence binarize(const LatencyTrace& trace, double theta_ms);

struct TransitionCounts {
  std::uint64_t gg = 0, gb = 0, bg = 0, bb = 0;
  std::uint64_t from_good() const { return gg + gb; }
  std::uint64_t from_bad() const { return bg + bb; }
};

struct WilsonInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};

// 95% Wilson score interval for a binomial proportion.
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials);

struct FitResult {
  GeModel model;
  TransitionCounts counts;
  WilsonInterval ci_p, ci_r;
  bool p_defaulted = false;
  bool r_defaulted = false;
};

// Maximum-likelihood transition estimates p = gb/(gg+gb), r = bg/(bg+bb).
// A from-state with no observations makes that estimate undefined.
FitResult fit(const StateSequence& seq);

// Same estimator, but an unobserved from-state falls back to the given
// prior instead of failing; the fallback is flagged and gets a point CI.
FitResult fit_with_default(const StateSequence& seq, double fallback_p,
                           double fallback_r);

// Stationary law of the two-state chain; components sum to exactly 1.
struct SteadyState {
  double pi_good = 0.0;
  double pi_bad = 0.0;
};
SteadyState steady_state(const GeModel& m);

// Packet error probability under deadline θ: untimely packets are errors.
double error_probability(const EmpiricalCdf& cdf, double theta_ms);

// P(burst length >= n | a burst started) = (1-r)^(n-1), evaluated as an
// iterated product so composed one-hop chains can reproduce it bitwise.
double burst_survival(const GeModel& m, std::uint64_t n);

// Unconditional rate of bursts reaching length n: pi_good * p * survival(n).
double burst_start_rate(const GeModel& m, std::uint64_t n);

}  // namespace burstlink
