#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "burstlink/ge.hpp"
#include "burstlink/trace.hpp"

namespace burstlink {

// Measurement campaign deadlines. The direct deadline doubles the relaxed
// one because the direct path replaces two relayed hops.
inline constexpr double kThetaCrowdMs = 38.25;
inline constexpr double kThetaRelaxMs = 22.5;
inline constexpr double kThetaDirectMs = 2.0 * kThetaRelaxMs;
inline constexpr double kDefaultPeriodMs = 100.0;

// Bundled reference channels: wifi-crowd, lte-crowd, wifi-relax, lte-relax,
// direct-relax, direct-crowd. Unknown names raise a ValidationError that
// lists the valid ones.
const GeModel& fixture(std::string_view name);
const std::vector<std::string>& fixture_names();
// Caveat text for fixtures whose published parameters carry rounding quirks;
// empty for the rest.
std::string_view fixture_note(std::string_view name);
double fixture_theta_ms(std::string_view name);

enum class SplitPolicy {
  kEqual,            // theta_total / hops for every hop
  kEquiPerformance,  // every hop gets the crossing deadline of two CDFs
};

// Per-hop deadline budgets summing into theta_total under the chosen policy.
std::vector<double> budget_split(double theta_total_ms, std::size_t hops,
                                 SplitPolicy policy,
                                 const EmpiricalCdf* a = nullptr,
                                 const EmpiricalCdf* b = nullptr);

// base scaled by the variant/reference ratio: p = base.p * variant.p /
// reference.p and likewise for r, clamped into [0,1] with flags.
struct SynthesisResult {
  GeModel model;
  bool p_clamped = false;
  bool r_clamped = false;
};
SynthesisResult synthesize(const GeModel& base, const GeModel& reference,
                           const GeModel& variant);

// Uniform latency law over [lo, hi), or (lo, hi] when open_low, plus an
// optional LOST atom.
struct LatencyLaw {
  double lo = 0.0;
  double hi = 0.0;
  double lost_prob = 0.0;
  bool open_low = false;

  static LatencyLaw default_good(double theta_ms);  // [theta/2, theta)
  static LatencyLaw default_bad(double theta_ms);   // (theta, 4*theta]
};

// Synthetic trace from a channel model: GOOD packets draw latencies meeting
// the deadline, BAD packets draw latencies (or losses) missing it, so
// binarizing at the same deadline recovers the state sequence exactly.
LatencyTrace generate_trace(const GeModel& m, double theta_ms,
                            std::uint64_t steps, std::uint64_t seed,
                            const LatencyLaw& good_law,
                            const LatencyLaw& bad_law,
                            double period_ms = kDefaultPeriodMs);
LatencyTrace generate_trace(const GeModel& m, double theta_ms,
                            std::uint64_t steps, std::uint64_t seed);

// Outage budget in milliseconds: an application tolerating `tolerance`
// consecutive losses survives bursts up to tolerance * period.
double survival_time_ms(std::uint64_t tolerance_packets, double period_ms);

// Deterministic synthetic trace pair shaped like the crowded campaign;
// their empirical CDFs cross at the crowd deadline.
struct CrossingTracePair {
  LatencyTrace wifi;
  LatencyTrace lte;
  Crossing planted;
};
CrossingTracePair crowd_crossing_traces(std::size_t samples_per_trace = 4000,
                                        std::uint64_t seed = 1);

// Multi-hop study description. Hops are channel models, either inline or
// fitted from a trace file binarized at the hop deadline.
struct ScenarioSpec {
  std::string name;
  std::vector<GeModel> hops;
  std::vector<double> theta_per_hop_ms;
  double theta_total_ms = 0.0;
  double period_ms = kDefaultPeriodMs;
  std::uint64_t tolerance_packets = 3;

  void validate() const;
};

ScenarioSpec load_scenario(std::istream& in,
                           const std::string& base_dir = {});
ScenarioSpec load_scenario_file(const std::string& path);

}  // namespace burstlink
