#include "burstlink/compose.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "burstlink/linalg.hpp"

namespace burstlink {

MultiHopChain::MultiHopChain(std::vector<GeModel> hops)
    : hops_(std::move(hops)) {
  if (hops_.empty()) throw ValidationError("chain needs at least one hop");
  if (hops_.size() > kMaxHops)
    throw ValidationError("dense representation is capped at " +
                          std::to_string(kMaxHops) + " hops");
  std::vector<Eigen::Matrix2d> factors;
  factors.reserve(hops_.size());
  for (const auto& hop : hops_) factors.push_back(burstlink::transition_matrix(hop));
  matrix_ = kronecker_fold(factors);

  const std::size_t n = state_count();
  pi_.resize(static_cast<Eigen::Index>(n));
  std::vector<SteadyState> per_hop;
  per_hop.reserve(hops_.size());
  for (const auto& hop : hops_) per_hop.push_back(burstlink::steady_state(hop));
  for (std::size_t s = 0; s < n; ++s) {
    double mass = 1.0;
    for (std::size_t h = 0; h < hops_.size(); ++h) {
      const bool bad = (s >> (hops_.size() - 1 - h)) & 1u;
      mass *= bad ? per_hop[h].pi_bad : per_hop[h].pi_good;
    }
    pi_(static_cast<Eigen::Index>(s)) = mass;
  }
  pi_all_good_ = pi_(0);
  error_rate_ = 1.0 - pi_all_good_;
}

MultiHopChain compose(std::vector<GeModel> hops) {
  return MultiHopChain(std::move(hops));
}

namespace {

// Entry distribution over the BAD states and the restricted sub-stochastic
// matrix. The exit mass from all-GOOD is returned alongside; it is zero
// exactly when every hop has p = 0.
struct BadRestriction {
  Eigen::RowVectorXd alpha;
  Eigen::MatrixXd sub;
  double exit_mass = 0.0;
};

BadRestriction restrict_to_bad(const MultiHopChain& chain) {
  const auto& full = chain.transition_matrix();
  const Eigen::Index bad = full.rows() - 1;
  BadRestriction r;
  r.exit_mass = full.row(0).tail(bad).sum();
  if (r.exit_mass > 0.0)
    r.alpha = full.row(0).tail(bad) / r.exit_mass;
  r.sub = full.bottomRightCorner(bad, bad);
  return r;
}

}  // namespace

BurstDistribution end_to_end_burst(const MultiHopChain& chain,
                                   std::uint64_t horizon) {
  if (horizon == 0) throw ValidationError("horizon must be >= 1");
  BurstDistribution dist;
  dist.horizon = horizon;
  dist.error_rate = chain.error_rate();

  const BadRestriction r = restrict_to_bad(chain);
  if (r.exit_mass == 0.0) {
    dist.no_bursts = true;
    dist.conditional_survival.assign(horizon, 0.0);
    dist.burst_start_rate.assign(horizon, 0.0);
    return dist;
  }

  dist.conditional_survival =
      phase_type_survival<double>(r.alpha, r.sub, horizon);
  const double start_mass = chain.pi_all_good() * r.exit_mass;
  dist.burst_start_rate.reserve(horizon);
  for (const double s : dist.conditional_survival)
    dist.burst_start_rate.push_back(start_mass * s);
  return dist;
}

LumpedView lumped_view(const MultiHopChain& chain) {
  LumpedView view;
  view.error_rate = chain.error_rate();

  const BadRestriction r = restrict_to_bad(chain);
  if (r.exit_mass == 0.0) return view;  // bursts never start

  // A hop that can fail but never recovers pins some reachable failure
  // forever: the burst law has an atom at infinity.
  for (const auto& hop : chain.hops()) {
    if (hop.p > 0.0 && hop.r == 0.0) {
      view.mean_burst_length = std::numeric_limits<double>::infinity();
      return view;
    }
  }

  // Mean = sum of survival values, summed to a rigorous geometric tail
  // bound: with q = max row sum of the m-step restricted matrix and s the
  // current survival value, the remaining tail is at most m * s / (1 - q).
  // m grows past 1 only when some single-step row is fully sub-internal
  // (e.g. a hop with p = 1).
  double q = r.sub.rowwise().sum().maxCoeff();
  std::size_t block = 1;
  if (q >= 1.0) {
    Eigen::MatrixXd power = r.sub;
    while (q >= 1.0 && block < 64) {
      power = (power * r.sub).eval();
      ++block;
      q = power.rowwise().sum().maxCoeff();
    }
  }
  constexpr double kTailTol = 1e-12;
  constexpr std::size_t kMaxIter = 5'000'000;
  double mean = 1.0;
  Eigen::RowVectorXd mass = r.alpha;
  if (q < 1.0) {
    for (std::size_t iter = 0; iter < kMaxIter; ++iter) {
      mass = (mass * r.sub).eval();
      const double s = mass.sum();
      mean += s;
      if (s == 0.0 ||
          static_cast<double>(block) * s / (1.0 - q) < kTailTol) {
        view.mean_burst_length = mean;
        return view;
      }
    }
  }
  // No contracting power found or the sum refused to converge: the burst law
  // keeps mass at arbitrarily long lengths.
  view.mean_burst_length = std::numeric_limits<double>::infinity();
  return view;
}

std::optional<GeModel> effective_ge(const MultiHopChain& chain) {
  const LumpedView view = lumped_view(chain);
  if (!view.mean_burst_length || std::isinf(*view.mean_burst_length))
    return std::nullopt;
  GeModel m;
  m.r = 1.0 / *view.mean_burst_length;
  m.p = view.error_rate >= 1.0
            ? 1.0
            : std::min(1.0, m.r * view.error_rate / (1.0 - view.error_rate));
  m.label = "effective (approximate)";
  m.validate();
  return m;
}

}  // namespace burstlink
