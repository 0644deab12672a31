#include "burstlink/mc.hpp"

#include <atomic>
#include <random>
#include <thread>
#include <vector>

namespace burstlink {

void SimConfig::validate() const {
  if (steps == 0) throw ValidationError("simulation needs steps >= 1");
  if (streams == 0) throw ValidationError("simulation needs streams >= 1");
}

std::uint64_t SimResult::completed_bursts() const {
  std::uint64_t n = 0;
  for (const auto& [len, count] : burst_histogram) n += count;
  return n;
}

std::uint64_t SimResult::truncated_bursts() const {
  std::uint64_t n = 0;
  for (const auto& [len, count] : truncated_histogram) n += count;
  return n;
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint32_t stream) {
  std::uint64_t z =
      seed + (static_cast<std::uint64_t>(stream) + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

// Top 53 bits, uniform on [0,1). Spelled out so results do not depend on the
// standard library's distribution implementation.
inline double canonical(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

struct HopParams {
  double p = 0.0, r = 0.0, pi_bad = 0.0;
};

struct StreamTally {
  std::uint64_t recorded = 0;
  std::uint64_t bad = 0;
  std::map<std::uint64_t, std::uint64_t> completed;
  std::map<std::uint64_t, std::uint64_t> truncated;
};

StreamTally run_stream(const std::vector<HopParams>& hops, std::uint64_t quota,
                       std::uint64_t burn_in, std::uint64_t stream_seed) {
  StreamTally tally;
  if (quota == 0) return tally;
  std::mt19937_64 gen(stream_seed);
  const std::size_t k = hops.size();
  std::vector<bool> bad(k);
  std::size_t bad_count = 0;
  for (std::size_t h = 0; h < k; ++h) {
    bad[h] = canonical(gen) < hops[h].pi_bad;
    bad_count += bad[h];
  }
  const auto step = [&] {
    for (std::size_t h = 0; h < k; ++h) {
      const double u = canonical(gen);
      if (bad[h]) {
        if (u < hops[h].r) {
          bad[h] = false;
          --bad_count;
        }
      } else if (u < hops[h].p) {
        bad[h] = true;
        ++bad_count;
      }
    }
  };
  for (std::uint64_t i = 0; i < burn_in; ++i) step();

  std::uint64_t open_burst = 0;
  for (std::uint64_t i = 0; i < quota; ++i) {
    ++tally.recorded;
    if (bad_count > 0) {
      ++tally.bad;
      ++open_burst;
    } else if (open_burst > 0) {
      ++tally.completed[open_burst];
      open_burst = 0;
    }
    step();
  }
  if (open_burst > 0) ++tally.truncated[open_burst];
  return tally;
}

}  // namespace

SimResult simulate(const MultiHopChain& chain, const SimConfig& cfg,
                   unsigned max_parallelism) {
  cfg.validate();
  std::vector<HopParams> hops;
  hops.reserve(chain.hop_count());
  for (const auto& hop : chain.hops())
    hops.push_back({hop.p, hop.r, steady_state(hop).pi_bad});

  const std::uint64_t base = cfg.steps / cfg.streams;
  const std::uint64_t extra = cfg.steps % cfg.streams;
  std::vector<StreamTally> tallies(cfg.streams);
  const auto run_one = [&](std::uint32_t i) {
    const std::uint64_t quota = base + (i < extra ? 1 : 0);
    tallies[i] = run_stream(hops, quota, cfg.burn_in,
                            derive_stream_seed(cfg.seed, i));
  };

  unsigned workers = max_parallelism ? max_parallelism
                                     : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min<unsigned>(workers, cfg.streams);
  if (workers <= 1) {
    for (std::uint32_t i = 0; i < cfg.streams; ++i) run_one(i);
  } else {
    std::atomic<std::uint32_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::uint32_t i = next.fetch_add(1); i < cfg.streams;
             i = next.fetch_add(1))
          run_one(i);
      });
    for (auto& t : pool) t.join();
  }

  // Merge in stream index order: integer sums, so the outcome is identical
  // however the work was scheduled.
  SimResult res;
  res.seed = cfg.seed;
  res.streams = cfg.streams;
  res.burn_in = cfg.burn_in;
  for (const auto& t : tallies) {
    res.steps_recorded += t.recorded;
    res.bad_packets += t.bad;
    for (const auto& [len, count] : t.completed)
      res.burst_histogram[len] += count;
    for (const auto& [len, count] : t.truncated)
      res.truncated_histogram[len] += count;
  }
  res.error_rate = static_cast<double>(res.bad_packets) /
                   static_cast<double>(res.steps_recorded);
  return res;
}

double empirical_burst_survival(const SimResult& res, std::uint64_t n,
                                SurvivalForm form) {
  if (n == 0) throw ValidationError("burst length index starts at 1");
  std::uint64_t total = 0, at_least = 0;
  for (const auto& [len, count] : res.burst_histogram) {
    total += count;
    if (len >= n) at_least += count;
  }
  for (const auto& [len, count] : res.truncated_histogram) {
    total += count;
    if (len >= n) at_least += count;
  }
  if (form == SurvivalForm::kStartRate) {
    if (res.steps_recorded == 0)
      throw ValidationError("empty simulation result");
    return static_cast<double>(at_least) /
           static_cast<double>(res.steps_recorded);
  }
  if (total == 0)
    throw NoBurstsError("no bursts observed: conditional survival undefined");
  return static_cast<double>(at_least) / static_cast<double>(total);
}

}  // namespace burstlink
