#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "burstlink/compose.hpp"
#include "burstlink/ge.hpp"
#include "burstlink/io.hpp"
#include "burstlink/mc.hpp"
#include "burstlink/scenario.hpp"
#include "burstlink/trace.hpp"

namespace {

using namespace burstlink;

constexpr std::uint64_t kBigRunThreshold = 100'000'000;

struct GlobalOpts {
  std::string output;
  std::string format;  // empty = per-command default
  std::uint64_t seed = 1;
};

std::string pick_format(const GlobalOpts& g, const char* fallback) {
  return g.format.empty() ? fallback : g.format;
}

void emit(const GlobalOpts& g, const std::string& text) {
  if (g.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(g.output);
  if (!out) throw IoError("cannot open output file: " + g.output);
  out << text;
  if (!out) throw IoError("cannot write output file: " + g.output);
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

LatencyTrace load_with_warning(const std::string& path,
                               std::optional<double> period) {
  LatencyTrace trace = load_trace_file(path, period);
  if (period && trace.metadata_period_ms &&
      *trace.metadata_period_ms != *period)
    std::cerr << "warning: overriding period_ms=" << *trace.metadata_period_ms
              << " from " << path << " with --period " << *period << "\n";
  return trace;
}

std::vector<std::string> split(const std::string& text,
                               std::string_view separators) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : text) {
    if (separators.find(c) != std::string_view::npos) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

struct ChainSpec {
  std::string name;
  std::vector<GeModel> hops;
  double period_ms = kDefaultPeriodMs;
  std::uint64_t tolerance_packets = 3;
  std::vector<std::string> notes;
};

ChainSpec chain_from_fixtures(const std::vector<std::string>& names) {
  ChainSpec spec;
  for (const auto& name : names) {
    spec.hops.push_back(fixture(name));
    if (!spec.name.empty()) spec.name += '+';
    spec.name += name;
    const std::string_view note = fixture_note(name);
    if (!note.empty())
      spec.notes.push_back(name + ": " + std::string(note));
  }
  return spec;
}

ChainSpec resolve_chain(const std::string& scenario_path,
                        const std::string& fixture_list) {
  if (!scenario_path.empty() && !fixture_list.empty())
    throw ValidationError("pass a scenario file or --fixture, not both");
  if (!scenario_path.empty()) {
    const ScenarioSpec scenario = load_scenario_file(scenario_path);
    ChainSpec spec;
    spec.name = scenario.name;
    spec.hops = scenario.hops;
    spec.period_ms = scenario.period_ms;
    spec.tolerance_packets = scenario.tolerance_packets;
    return spec;
  }
  if (fixture_list.empty())
    throw ValidationError("pass a scenario file or --fixture");
  return chain_from_fixtures(split(fixture_list, ",+"));
}

void check_big_run(std::uint64_t steps, bool big_run) {
  if (steps > kBigRunThreshold && !big_run)
    throw ValidationError("runs beyond " + std::to_string(kBigRunThreshold) +
                          " steps need --big-run");
}

nlohmann::json hops_json(const ChainSpec& spec) {
  nlohmann::json hops = nlohmann::json::array();
  for (const auto& hop : spec.hops) hops.push_back(to_json(hop));
  return hops;
}

int run_ecdf(const GlobalOpts& g, const std::string& path,
             std::optional<double> period) {
  const EmpiricalCdf cdf = ecdf(load_with_warning(path, period));
  if (pick_format(g, "csv") == "json")
    emit(g, dump(to_json(cdf)));
  else
    emit(g, ecdf_csv(cdf));
  return 0;
}

int run_fit(const GlobalOpts& g, const std::string& path, double theta,
            std::optional<double> period) {
  const LatencyTrace trace = load_with_warning(path, period);
  FitResult fitted = fit(binarize(trace, theta));
  fitted.model.label = trace.label;
  if (pick_format(g, "json") == "csv") {
    std::ostringstream out;
    out << "label,p,r,pi_good,pi_bad,gg,gb,bg,bb,ci_p_lo,ci_p_hi,ci_r_lo,ci_r_hi\n";
    const SteadyState pi = steady_state(fitted.model);
    out << fitted.model.label << ',' << format_sig6(fitted.model.p) << ','
        << format_sig6(fitted.model.r) << ',' << format_sig6(pi.pi_good)
        << ',' << format_sig6(pi.pi_bad) << ',' << fitted.counts.gg << ','
        << fitted.counts.gb << ',' << fitted.counts.bg << ','
        << fitted.counts.bb << ',' << format_sig6(fitted.ci_p.lo) << ','
        << format_sig6(fitted.ci_p.hi) << ',' << format_sig6(fitted.ci_r.lo)
        << ',' << format_sig6(fitted.ci_r.hi) << "\n";
    emit(g, out.str());
  } else {
    nlohmann::json j = to_json(fitted);
    j["theta_ms"] = round_sig6(theta);
    emit(g, dump(j));
  }
  return 0;
}

int run_crossing(const GlobalOpts& g, const std::string& path_a,
                 const std::string& path_b, std::optional<double> period) {
  const EmpiricalCdf a = ecdf(load_with_warning(path_a, period));
  const EmpiricalCdf b = ecdf(load_with_warning(path_b, period));
  const std::vector<Crossing> crossings = crossing_points(a, b);
  if (pick_format(g, "csv") == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& c : crossings)
      rows.push_back({{"theta_ms", round_sig6(c.theta_ms)},
                      {"reliability", round_sig6(c.reliability)}});
    emit(g, dump({{"a", a.label}, {"b", b.label}, {"crossings", rows}}));
  } else {
    emit(g, crossings_csv(crossings));
  }
  return 0;
}

int run_burst(const GlobalOpts& g, const std::string& scenario_path,
              const std::string& fixture_list, std::uint64_t horizon,
              std::uint64_t mc_steps, std::uint32_t streams,
              std::uint64_t burn_in, bool big_run) {
  const ChainSpec spec = resolve_chain(scenario_path, fixture_list);
  const MultiHopChain chain = compose(spec.hops);
  const BurstDistribution dist = end_to_end_burst(chain, horizon);

  std::optional<SimResult> sim;
  if (mc_steps > 0) {
    check_big_run(mc_steps, big_run);
    sim = simulate(chain, {mc_steps, g.seed, streams, burn_in});
  }

  if (pick_format(g, "csv") == "json") {
    nlohmann::json j{{"name", spec.name},
                     {"hops", hops_json(spec)},
                     {"analytic", to_json(dist)}};
    if (sim) j["simulated"] = to_json(*sim);
    if (!spec.notes.empty()) j["notes"] = spec.notes;
    emit(g, dump(j));
  } else {
    emit(g, burst_csv(dist, sim ? &*sim : nullptr));
  }
  return 0;
}

int run_compare(const GlobalOpts& g,
                const std::vector<std::string>& fixture_specs,
                std::uint64_t tolerance, std::uint64_t horizon) {
  if (tolerance == 0) throw ValidationError("tolerance must be >= 1 packet");
  std::vector<std::vector<std::string>> configs;
  for (const auto& spec_text : fixture_specs)
    for (const auto& config : split(spec_text, ","))
      configs.push_back(split(config, "+"));
  if (configs.empty()) throw ValidationError("no fixture configurations given");
  const std::uint64_t rows = std::max(horizon, tolerance);
  const double survival_ms = survival_time_ms(tolerance, kDefaultPeriodMs);

  nlohmann::json jconfigs = nlohmann::json::array();
  std::vector<std::string> all_notes;
  std::ostringstream csv;
  csv << "# tolerance_packets=" << tolerance
      << " survival_time_ms=" << format_sig6(survival_ms) << "\n";
  csv << "config,error_rate,mean_burst_length,survival_at_tolerance,"
         "start_rate_at_tolerance\n";
  for (const auto& names : configs) {
    const ChainSpec spec = chain_from_fixtures(names);
    const MultiHopChain chain = compose(spec.hops);
    const BurstDistribution dist = end_to_end_burst(chain, rows);
    const LumpedView lumped = lumped_view(chain);
    std::string mean = "undefined";
    if (lumped.mean_burst_length)
      mean = std::isinf(*lumped.mean_burst_length)
                 ? "inf"
                 : format_sig6(*lumped.mean_burst_length);
    csv << spec.name << ',' << format_sig6(dist.error_rate) << ',' << mean
        << ',' << format_sig6(dist.survival(tolerance)) << ','
        << format_sig6(dist.start_rate(tolerance)) << "\n";

    nlohmann::json row{{"name", spec.name},
                       {"hops", hops_json(spec)},
                       {"error_rate", round_sig6(dist.error_rate)},
                       {"survival_at_tolerance",
                        round_sig6(dist.survival(tolerance))},
                       {"start_rate_at_tolerance",
                        round_sig6(dist.start_rate(tolerance))},
                       {"analytic", to_json(dist)}};
    if (lumped.mean_burst_length && !std::isinf(*lumped.mean_burst_length))
      row["mean_burst_length"] = round_sig6(*lumped.mean_burst_length);
    else
      row["mean_burst_length"] = nullptr;
    if (!spec.notes.empty()) row["notes"] = spec.notes;
    for (const auto& note : spec.notes)
      if (std::find(all_notes.begin(), all_notes.end(), note) ==
          all_notes.end())
        all_notes.push_back(note);
    jconfigs.push_back(std::move(row));
  }

  if (pick_format(g, "csv") == "json") {
    emit(g, dump({{"tolerance_packets", tolerance},
                  {"survival_time_ms", round_sig6(survival_ms)},
                  {"period_ms", round_sig6(kDefaultPeriodMs)},
                  {"configs", jconfigs}}));
  } else {
    for (const auto& note : all_notes) csv << "# note " << note << "\n";
    emit(g, csv.str());
  }
  return 0;
}

int run_synth(const GlobalOpts& g, const std::string& base,
              const std::string& reference, const std::string& variant,
              const std::string& label) {
  SynthesisResult result =
      synthesize(fixture(base), fixture(reference), fixture(variant));
  if (!label.empty()) result.model.label = label;
  if (pick_format(g, "json") == "csv") {
    std::ostringstream out;
    const SteadyState pi = steady_state(result.model);
    out << "label,p,r,pi_good,pi_bad,p_clamped,r_clamped\n";
    out << result.model.label << ',' << format_sig6(result.model.p) << ','
        << format_sig6(result.model.r) << ',' << format_sig6(pi.pi_good)
        << ',' << format_sig6(pi.pi_bad) << ',' << result.p_clamped << ','
        << result.r_clamped << "\n";
    emit(g, out.str());
  } else {
    emit(g, dump({{"model", to_json(result.model)},
                  {"p_clamped", result.p_clamped},
                  {"r_clamped", result.r_clamped},
                  {"base", to_json(fixture(base))},
                  {"reference", to_json(fixture(reference))},
                  {"variant", to_json(fixture(variant))}}));
  }
  return 0;
}

int run_simulate(const GlobalOpts& g, const std::string& scenario_path,
                 const std::string& fixture_list, std::uint64_t steps,
                 std::uint32_t streams, std::uint64_t burn_in,
                 std::uint64_t horizon, bool big_run) {
  check_big_run(steps, big_run);
  const ChainSpec spec = resolve_chain(scenario_path, fixture_list);
  const MultiHopChain chain = compose(spec.hops);
  const SimResult res = simulate(chain, {steps, g.seed, streams, burn_in});

  if (pick_format(g, "json") == "csv") {
    emit(g, burst_csv(end_to_end_burst(chain, horizon), &res));
  } else {
    nlohmann::json j = to_json(res);
    j["name"] = spec.name;
    j["hops"] = hops_json(spec);
    if (!spec.notes.empty()) j["notes"] = spec.notes;
    emit(g, dump(j));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Burst-error analysis of periodic traffic over multi-hop links"};
  app.require_subcommand(1);
  // Global flags are accepted on either side of the subcommand.
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--output", g.output, "Write the report here instead of stdout");
  app.add_option("--format", g.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", g.seed, "Random seed for simulation commands");

  std::string trace_path, trace_path_b;
  std::optional<double> period;
  double theta = 0.0;
  std::string scenario_path, fixture_list;
  std::uint64_t horizon = 30, mc_steps = 0, burn_in = 0;
  std::uint64_t sim_steps = 10'000'000, tolerance = 3;
  std::uint32_t streams = 1;
  bool big_run = false;
  std::vector<std::string> fixture_specs;
  std::string base, reference, variant, label;

  auto* c_ecdf = app.add_subcommand(
      "ecdf", "Empirical latency CDF of a trace");
  c_ecdf->add_option("trace", trace_path, "Trace CSV file")->required();
  c_ecdf->add_option("--period", period, "Sampling period in ms");

  auto* c_fit = app.add_subcommand(
      "fit", "Fit a two-state channel model to a trace under a deadline");
  c_fit->add_option("trace", trace_path, "Trace CSV file")->required();
  c_fit->add_option("--theta", theta, "Deadline in ms")->required();
  c_fit->add_option("--period", period, "Sampling period in ms");

  auto* c_crossing = app.add_subcommand(
      "crossing", "Equi-performance deadline of two traces");
  c_crossing->add_option("trace_a", trace_path, "First trace")->required();
  c_crossing->add_option("trace_b", trace_path_b, "Second trace")->required();
  c_crossing->add_option("--period", period, "Sampling period in ms");

  auto* c_burst = app.add_subcommand(
      "burst", "Analytic burst-length curves of a hop chain");
  c_burst->add_option("scenario", scenario_path, "Scenario JSON file");
  c_burst->add_option("--fixture", fixture_list,
                      "Hop fixtures joined by , or +");
  c_burst->add_option("--horizon", horizon, "Largest burst length reported");
  c_burst->add_option("--mc", mc_steps,
                      "Also simulate this many packets for comparison");
  c_burst->add_option("--streams", streams, "Independent simulation streams");
  c_burst->add_option("--burn-in", burn_in, "Steps discarded per stream");
  c_burst->add_flag("--big-run", big_run, "Allow runs beyond 1e8 steps");

  auto* c_compare = app.add_subcommand(
      "compare", "Side-by-side burst metrics of several hop chains");
  c_compare
      ->add_option("--fixtures", fixture_specs,
                   "Configurations separated by , with hops joined by +")
      ->required();
  c_compare->add_option("--tolerance", tolerance,
                        "Consecutive losses the application survives");
  c_compare->add_option("--horizon", horizon, "Largest burst length computed");

  auto* c_synth = app.add_subcommand(
      "synth", "Scale a fixture by the ratio of two reference fixtures");
  c_synth->add_option("--base", base, "Fixture to scale")->required();
  c_synth->add_option("--reference", reference, "Ratio denominator")
      ->required();
  c_synth->add_option("--variant", variant, "Ratio numerator")->required();
  c_synth->add_option("--label", label, "Label for the synthesized model");

  auto* c_simulate = app.add_subcommand(
      "simulate", "Monte-Carlo packet record of a hop chain");
  c_simulate->add_option("scenario", scenario_path, "Scenario JSON file");
  c_simulate->add_option("--fixture", fixture_list,
                         "Hop fixtures joined by , or +");
  c_simulate->add_option("--steps", sim_steps, "Packets to simulate");
  c_simulate->add_option("--streams", streams,
                         "Independent simulation streams");
  c_simulate->add_option("--burn-in", burn_in, "Steps discarded per stream");
  c_simulate->add_option("--horizon", horizon,
                         "Largest burst length in CSV output");
  c_simulate->add_flag("--big-run", big_run, "Allow runs beyond 1e8 steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_ecdf->parsed()) return run_ecdf(g, trace_path, period);
    if (c_fit->parsed()) return run_fit(g, trace_path, theta, period);
    if (c_crossing->parsed())
      return run_crossing(g, trace_path, trace_path_b, period);
    if (c_burst->parsed())
      return run_burst(g, scenario_path, fixture_list, horizon, mc_steps,
                       streams, burn_in, big_run);
    if (c_compare->parsed())
      return run_compare(g, fixture_specs, tolerance, horizon);
    if (c_synth->parsed()) return run_synth(g, base, reference, variant, label);
    if (c_simulate->parsed())
      return run_simulate(g, scenario_path, fixture_list, sim_steps, streams,
                          burn_in, horizon, big_run);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
