#include "burstlink/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "burstlink/mc.hpp"

namespace burstlink {

namespace {

struct Fixture {
  const char* name;
  GeModel model;
  double theta_ms;
  const char* note;
};

const std::array<Fixture, 6>& fixtures() {
  static const std::array<Fixture, 6> table{{
      {"wifi-crowd", {0.0515, 0.9468, "wifi-crowd"}, kThetaCrowdMs, ""},
      {"lte-crowd", {0.0178, 0.2577, "lte-crowd"}, kThetaCrowdMs, ""},
      {"wifi-relax",
       {0.0001, 0.0845, "wifi-relax"},
       kThetaRelaxMs,
       "p is quoted to one significant digit; the steady-state bad "
       "probability computes to ~0.00118, commonly rounded up to 0.0015 in "
       "derived summaries"},
      {"lte-relax", {0.0127, 0.8356, "lte-relax"}, kThetaRelaxMs, ""},
      {"direct-relax", {0.1457, 0.7857, "direct-relax"}, kThetaDirectMs, ""},
      {"direct-crowd",
       {0.2042, 0.2423, "direct-crowd"},
       kThetaDirectMs,
       "synthesized from lte-crowd by the direct-relax to lte-relax ratio"},
  }};
  return table;
}

const Fixture& find_fixture(std::string_view name) {
  for (const auto& f : fixtures())
    if (name == f.name) return f;
  std::string msg = "unknown fixture \"";
  msg += name;
  msg += "\"; valid names:";
  for (const auto& f : fixtures()) {
    msg += ' ';
    msg += f.name;
  }
  throw ValidationError(msg);
}

// Reuses the simulation module's canonical uniform so generated traces are
// reproducible across standard libraries.
inline double canonical(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

const GeModel& fixture(std::string_view name) {
  return find_fixture(name).model;
}

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& f : fixtures()) v.emplace_back(f.name);
    return v;
  }();
  return names;
}

std::string_view fixture_note(std::string_view name) {
  return find_fixture(name).note;
}

double fixture_theta_ms(std::string_view name) {
  return find_fixture(name).theta_ms;
}

std::vector<double> budget_split(double theta_total_ms, std::size_t hops,
                                 SplitPolicy policy, const EmpiricalCdf* a,
                                 const EmpiricalCdf* b) {
  if (!(theta_total_ms > 0))
    throw ValidationError("total deadline must be positive");
  if (hops == 0) throw ValidationError("budget split needs hops >= 1");
  if (policy == SplitPolicy::kEqual)
    return std::vector<double>(hops, theta_total_ms / static_cast<double>(hops));
  if (a == nullptr || b == nullptr)
    throw ValidationError("equi-performance split needs two latency CDFs");
  const double theta = crossing_points(*a, *b).front().theta_ms;
  return std::vector<double>(hops, theta);
}

SynthesisResult synthesize(const GeModel& base, const GeModel& reference,
                           const GeModel& variant) {
  base.validate();
  reference.validate();
  variant.validate();
  if (reference.p == 0.0 || reference.r == 0.0)
    throw ValidationError(
        "proportional synthesis divides by the reference probabilities; "
        "both must be nonzero");
  SynthesisResult out;
  out.model.p = base.p * (variant.p / reference.p);
  out.model.r = base.r * (variant.r / reference.r);
  if (out.model.p > 1.0) {
    out.model.p = 1.0;
    out.p_clamped = true;
  }
  if (out.model.r > 1.0) {
    out.model.r = 1.0;
    out.r_clamped = true;
  }
  out.model.label = "synth(" + base.label + ")";
  out.model.validate();
  return out;
}

LatencyLaw LatencyLaw::default_good(double theta_ms) {
  return {theta_ms / 2.0, theta_ms, 0.0, false};
}

LatencyLaw LatencyLaw::default_bad(double theta_ms) {
  return {theta_ms, 4.0 * theta_ms, 0.0, true};
}

namespace {

void validate_laws(double theta_ms, const LatencyLaw& good,
                   const LatencyLaw& bad) {
  if (!(theta_ms > 0)) throw ValidationError("deadline must be positive");
  if (good.lost_prob != 0.0)
    throw ValidationError("good law cannot emit LOST packets");
  if (!(good.lo >= 0 && good.lo <= good.hi))
    throw ValidationError("good law needs 0 <= lo <= hi");
  if (!(good.hi <= theta_ms))
    throw ValidationError("good law must stay within the deadline");
  if (!(bad.lost_prob >= 0 && bad.lost_prob <= 1))
    throw ValidationError("bad law lost_prob must lie in [0,1]");
  if (bad.lost_prob < 1.0) {
    if (!(bad.lo <= bad.hi))
      throw ValidationError("bad law needs lo <= hi");
    const bool above = bad.open_low ? bad.lo >= theta_ms : bad.lo > theta_ms;
    if (!above)
      throw ValidationError("bad law support must exceed the deadline");
  }
}

double draw_uniform(const LatencyLaw& law, std::mt19937_64& gen) {
  const double u = canonical(gen);
  // open_low maps u in [0,1) onto (lo, hi] instead of [lo, hi).
  return law.open_low ? law.lo + (1.0 - u) * (law.hi - law.lo)
                      : law.lo + u * (law.hi - law.lo);
}

}  // namespace

LatencyTrace generate_trace(const GeModel& m, double theta_ms,
                            std::uint64_t steps, std::uint64_t seed,
                            const LatencyLaw& good_law,
                            const LatencyLaw& bad_law, double period_ms) {
  m.validate();
  validate_laws(theta_ms, good_law, bad_law);
  if (steps == 0) throw ValidationError("trace generation needs steps >= 1");
  if (!(period_ms > 0)) throw ValidationError("period must be positive");

  std::mt19937_64 gen(derive_stream_seed(seed, 0));
  const SteadyState pi = steady_state(m);
  bool bad = canonical(gen) < pi.pi_bad;

  LatencyTrace trace;
  trace.period_ms = period_ms;
  trace.label = m.label.empty() ? "generated" : m.label;
  trace.samples.reserve(steps);
  for (std::uint64_t i = 0; i < steps; ++i) {
    double latency = kLostLatencyMs;
    if (!bad) {
      latency = draw_uniform(good_law, gen);
    } else if (bad_law.lost_prob == 0.0 ||
               !(canonical(gen) < bad_law.lost_prob)) {
      latency = draw_uniform(bad_law, gen);
    }
    trace.samples.push_back({static_cast<std::int64_t>(i + 1), latency, false});
    const double u = canonical(gen);
    if (bad)
      bad = !(u < m.r);
    else
      bad = u < m.p;
  }
  return trace;
}

LatencyTrace generate_trace(const GeModel& m, double theta_ms,
                            std::uint64_t steps, std::uint64_t seed) {
  return generate_trace(m, theta_ms, steps, seed,
                        LatencyLaw::default_good(theta_ms),
                        LatencyLaw::default_bad(theta_ms));
}

double survival_time_ms(std::uint64_t tolerance_packets, double period_ms) {
  if (tolerance_packets == 0)
    throw ValidationError("tolerance must be >= 1 packet");
  if (!(period_ms > 0)) throw ValidationError("period must be positive");
  return static_cast<double>(tolerance_packets) * period_ms;
}

namespace {

// Piecewise-linear population CDF as (latency, cumulative) knots. Sampling
// by stratified quantiles keeps the empirical curve within one grid step of
// the population everywhere.
using Knots = std::vector<std::pair<double, double>>;

double quantile(const Knots& knots, double u) {
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (u <= knots[i].second) {
      const auto& [x0, u0] = knots[i - 1];
      const auto& [x1, u1] = knots[i];
      if (u1 == u0) return x1;
      return x0 + (u - u0) / (u1 - u0) * (x1 - x0);
    }
  }
  return knots.back().first;
}

LatencyTrace trace_from_knots(const Knots& knots, std::size_t samples,
                              std::uint64_t seed, const char* label) {
  std::vector<double> latencies;
  latencies.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double u =
        (static_cast<double>(i) + 0.5) / static_cast<double>(samples);
    latencies.push_back(quantile(knots, u));
  }
  std::mt19937_64 gen(seed);
  std::shuffle(latencies.begin(), latencies.end(), gen);

  LatencyTrace trace;
  trace.period_ms = kDefaultPeriodMs;
  trace.label = label;
  trace.samples.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i)
    trace.samples.push_back(
        {static_cast<std::int64_t>(i + 1), latencies[i], false});
  return trace;
}

}  // namespace

CrossingTracePair crowd_crossing_traces(std::size_t samples_per_trace,
                                        std::uint64_t seed) {
  if (samples_per_trace < 100)
    throw ValidationError("need at least 100 samples per trace");
  // Both populations pass through (38.25 ms, 0.94): the wifi curve is flat
  // there (fast bulk, heavy tail) while the lte curve climbs steeply.
  const Knots wifi{{1.0, 0.0},  {5.0, 0.90},  {20.0, 0.94},
                   {60.0, 0.94}, {80.0, 0.99}, {200.0, 1.0}};
  const Knots lte{{25.0, 0.0},  {36.0, 0.90}, {37.5, 0.92},
                  {39.0, 0.96}, {40.0, 0.99}, {60.0, 1.0}};
  CrossingTracePair pair;
  pair.wifi = trace_from_knots(wifi, samples_per_trace,
                               derive_stream_seed(seed, 0), "wifi-crowd-synthetic");
  pair.lte = trace_from_knots(lte, samples_per_trace,
                              derive_stream_seed(seed, 1), "lte-crowd-synthetic");
  pair.planted = {kThetaCrowdMs, 0.94};
  return pair;
}

void ScenarioSpec::validate() const {
  if (hops.empty()) throw ValidationError("scenario needs at least one hop");
  if (hops.size() != theta_per_hop_ms.size())
    throw ValidationError("scenario needs one deadline per hop");
  for (const auto& hop : hops) hop.validate();
  double sum = 0.0;
  for (const double theta : theta_per_hop_ms) {
    if (!(theta > 0)) throw ValidationError("hop deadlines must be positive");
    sum += theta;
  }
  if (!(theta_total_ms > 0))
    throw ValidationError("total deadline must be positive");
  if (sum > theta_total_ms * (1.0 + 1e-12))
    throw ValidationError("hop deadlines exceed the total budget");
  if (!(period_ms > 0)) throw ValidationError("period must be positive");
  if (tolerance_packets == 0)
    throw ValidationError("tolerance must be >= 1 packet");
}

ScenarioSpec load_scenario(std::istream& in, const std::string& base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("scenario is not valid JSON: ") +
                          e.what());
  }
  try {
    ScenarioSpec spec;
    spec.name = doc.value("name", std::string("scenario"));
    spec.period_ms = doc.value("period_ms", kDefaultPeriodMs);
    spec.tolerance_packets = doc.value("tolerance_packets", std::uint64_t{3});
    if (!doc.contains("hops") || !doc["hops"].is_array())
      throw ValidationError("scenario needs a hops array");
    for (const auto& hop : doc["hops"]) {
      const double theta = hop.at("theta_ms").get<double>();
      spec.theta_per_hop_ms.push_back(theta);
      if (hop.contains("model")) {
        const auto& m = hop["model"];
        GeModel ge{m.at("p").get<double>(), m.at("r").get<double>(),
                   m.value("label", std::string())};
        spec.hops.push_back(std::move(ge));
      } else if (hop.contains("trace")) {
        std::filesystem::path path = hop["trace"].get<std::string>();
        if (path.is_relative() && !base_dir.empty())
          path = std::filesystem::path(base_dir) / path;
        std::optional<double> period;
        if (hop.contains("period_ms")) period = hop["period_ms"].get<double>();
        const LatencyTrace trace = load_trace_file(path.string(), period);
        FitResult fitted = fit(binarize(trace, theta));
        fitted.model.label = trace.label;
        spec.hops.push_back(std::move(fitted.model));
      } else {
        throw ValidationError("each hop needs a model or a trace");
      }
    }
    spec.theta_total_ms = doc.contains("theta_total_ms")
                              ? doc["theta_total_ms"].get<double>()
                              : [&] {
                                  double sum = 0.0;
                                  for (const double t : spec.theta_per_hop_ms)
                                    sum += t;
                                  return sum;
                                }();
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad scenario field: ") + e.what());
  }
}

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path);
  ScenarioSpec spec =
      load_scenario(in, std::filesystem::path(path).parent_path().string());
  if (spec.name == "scenario")
    spec.name = std::filesystem::path(path).stem().string();
  return spec;
}

}  // namespace burstlink
