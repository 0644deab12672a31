#include "burstlink/ge.hpp"

#include <algorithm>
#include <cmath>

#include "burstlink/linalg.hpp"

namespace burstlink {

void GeModel::validate() const {
  if (!(p >= 0.0 && p <= 1.0))
    throw ValidationError("p must lie in [0,1]");
  if (!(r >= 0.0 && r <= 1.0))
    throw ValidationError("r must lie in [0,1]");
  if (p == 0.0 && r == 0.0)
    throw DegenerateChainError("p = r = 0: chain never moves");
}

Eigen::Matrix2d transition_matrix(const GeModel& m) {
  m.validate();
  return two_state_matrix(m.p, m.r);
}

StateSequence concat_with_reset(StateSequence a, const StateSequence& b) {
  const std::size_t offset = a.states.size();
  a.run_breaks.push_back(offset);
  for (const std::size_t br : b.run_breaks) a.run_breaks.push_back(offset + br);
  a.states.insert(a.states.end(), b.states.begin(), b.states.end());
  if (a.period_ms == 0.0) a.period_ms = b.period_ms;
  return a;
}

StateSequence binarize(const LatencyTrace& trace, double theta_ms) {
  if (trace.samples.empty()) throw ValidationError("empty trace");
  if (!(theta_ms >= 0.0)) throw ValidationError("deadline must be >= 0");
  StateSequence seq;
  seq.period_ms = trace.period_ms;
  seq.states.reserve(trace.samples.size());
  for (const auto& s : trace.samples)
    seq.states.push_back(s.latency_ms <= theta_ms ? ChannelState::kGood
                                                  : ChannelState::kBad);
  return seq;
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) throw ValidationError("Wilson interval needs trials >= 1");
  if (successes > trials)
    throw ValidationError("successes exceed trials");
  constexpr double z = 1.959963984540054;  // 97.5% normal quantile
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = phat + z2 / (2.0 * n);
  const double spread =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  return {(center - spread) / denom, (center + spread) / denom};
}

namespace {

TransitionCounts count_transitions(const StateSequence& seq) {
  if (seq.states.size() < 2)
    throw ValidationError("need at least two states to count transitions");
  TransitionCounts c;
  auto breaks = seq.run_breaks;
  std::sort(breaks.begin(), breaks.end());
  std::size_t next_break = 0;
  for (std::size_t i = 1; i < seq.states.size(); ++i) {
    while (next_break < breaks.size() && breaks[next_break] < i) ++next_break;
    if (next_break < breaks.size() && breaks[next_break] == i) continue;
    const bool from_bad = seq.states[i - 1] == ChannelState::kBad;
    const bool to_bad = seq.states[i] == ChannelState::kBad;
    if (from_bad)
      ++(to_bad ? c.bb : c.bg);
    else
      ++(to_bad ? c.gb : c.gg);
  }
  return c;
}

FitResult fit_from_counts(const TransitionCounts& c) {
  FitResult res;
  res.counts = c;
  if (c.from_good() == 0)
    throw UndefinedEstimateError(
        'p', "no transitions out of GOOD: p is undefined");
  if (c.from_bad() == 0)
    throw UndefinedEstimateError(
        'r', "no transitions out of BAD: r is undefined");
  res.model.p =
      static_cast<double>(c.gb) / static_cast<double>(c.from_good());
  res.model.r = static_cast<double>(c.bg) / static_cast<double>(c.from_bad());
  res.ci_p = wilson_interval(c.gb, c.from_good());
  res.ci_r = wilson_interval(c.bg, c.from_bad());
  return res;
}

}  // namespace

FitResult fit(const StateSequence& seq) {
  return fit_from_counts(count_transitions(seq));
}

FitResult fit_with_default(const StateSequence& seq, double fallback_p,
                           double fallback_r) {
  const TransitionCounts c = count_transitions(seq);
  FitResult res;
  res.counts = c;
  if (c.from_good() > 0) {
    res.model.p =
        static_cast<double>(c.gb) / static_cast<double>(c.from_good());
    res.ci_p = wilson_interval(c.gb, c.from_good());
  } else {
    res.model.p = fallback_p;
    res.ci_p = {fallback_p, fallback_p};
    res.p_defaulted = true;
  }
  if (c.from_bad() > 0) {
    res.model.r = static_cast<double>(c.bg) / static_cast<double>(c.from_bad());
    res.ci_r = wilson_interval(c.bg, c.from_bad());
  } else {
    res.model.r = fallback_r;
    res.ci_r = {fallback_r, fallback_r};
    res.r_defaulted = true;
  }
  res.model.validate();
  return res;
}

SteadyState steady_state(const GeModel& m) {
  m.validate();
  const double pi_good = m.r / (m.p + m.r);
  // Complement pairing keeps the components summing to exactly 1.
  const auto [pi_bad, pi_good_adj] = stochastic_pair(pi_good);
  return {pi_good_adj, pi_bad};
}

double error_probability(const EmpiricalCdf& cdf, double theta_ms) {
  return 1.0 - evaluate(cdf, theta_ms);
}

double burst_survival(const GeModel& m, std::uint64_t n) {
  m.validate();
  if (n == 0) throw ValidationError("burst length index starts at 1");
  if (m.p == 0.0)
    throw NoBurstsError("p = 0: bursts never start, survival is undefined");
  const double stay_bad = 1.0 - m.r;
  double s = 1.0;
  for (std::uint64_t i = 1; i < n; ++i) s *= stay_bad;
  return s;
}

double burst_start_rate(const GeModel& m, std::uint64_t n) {
  return steady_state(m).pi_good * m.p * burst_survival(m, n);
}

}  // namespace burstlink
