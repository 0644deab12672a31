#pragma once

#include <cstdint>
#include <map>

#include "burstlink/compose.hpp"

namespace burstlink {

struct SimConfig {
  std::uint64_t steps = 10'000'000;
  std::uint64_t seed = 1;
  std::uint32_t streams = 1;
  std::uint64_t burn_in = 0;

  void validate() const;
};

// Counts from a simulated packet record. A burst cut off by the end of its
// stream lands in truncated_histogram under its observed length; the mass
// identity sum(len * count) over both histograms == bad_packets holds
// exactly on every run.
struct SimResult {
  double error_rate = 0.0;
  std::uint64_t steps_recorded = 0;
  std::uint64_t bad_packets = 0;
  std::map<std::uint64_t, std::uint64_t> burst_histogram;
  std::map<std::uint64_t, std::uint64_t> truncated_histogram;

  // Echo of the run configuration, for reports.
  std::uint64_t seed = 0;
  std::uint32_t streams = 0;
  std::uint64_t burn_in = 0;

  std::uint64_t completed_bursts() const;
  std::uint64_t truncated_bursts() const;
};

// Seed of stream i under the documented splitting rule: the splitmix64
// finalizer applied to seed + (i+1) * 0x9E3779B97F4A7C15.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint32_t stream);

// Simulates the product chain hop by hop, which is exactly the composed
// chain without materializing it. Each stream owns a std::mt19937_64 seeded
// by derive_stream_seed and starts from an exact steady-state draw, so the
// result depends only on (seed, streams, steps, burn_in), never on how many
// threads ran. max_parallelism 0 means hardware concurrency.
SimResult simulate(const MultiHopChain& chain, const SimConfig& cfg,
                   unsigned max_parallelism = 0);

enum class SurvivalForm {
  kConditional,  // among observed bursts, fraction with length >= n
  kStartRate,    // bursts of length >= n per recorded packet
};

// Empirical counterpart of the analytic burst curves. Truncated bursts count
// by their observed length, which undercounts long bursts and makes the
// conditional form a mild lower bound for n > 1.
double empirical_burst_survival(const SimResult& res, std::uint64_t n,
                                SurvivalForm form = SurvivalForm::kConditional);

}  // namespace burstlink
