#include "burstlink/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace burstlink {

std::string format_sig6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double round_sig6(double v) { return std::strtod(format_sig6(v).c_str(), nullptr); }

namespace {

nlohmann::json counts_json(const TransitionCounts& c) {
  return {{"gg", c.gg}, {"gb", c.gb}, {"bg", c.bg}, {"bb", c.bb}};
}

nlohmann::json interval_json(const WilsonInterval& ci) {
  return {{"lo", round_sig6(ci.lo)}, {"hi", round_sig6(ci.hi)}};
}

nlohmann::json histogram_json(const std::map<std::uint64_t, std::uint64_t>& h) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [len, count] : h) rows.push_back({len, count});
  return rows;
}

}  // namespace

nlohmann::json to_json(const GeModel& m) {
  const SteadyState pi = steady_state(m);
  return {{"label", m.label},
          {"p", round_sig6(m.p)},
          {"r", round_sig6(m.r)},
          {"pi_good", round_sig6(pi.pi_good)},
          {"pi_bad", round_sig6(pi.pi_bad)}};
}

nlohmann::json to_json(const SteadyState& s) {
  return {{"pi_good", round_sig6(s.pi_good)}, {"pi_bad", round_sig6(s.pi_bad)}};
}

nlohmann::json to_json(const FitResult& fit) {
  nlohmann::json j = to_json(fit.model);
  j["counts"] = counts_json(fit.counts);
  j["ci_p"] = interval_json(fit.ci_p);
  j["ci_r"] = interval_json(fit.ci_r);
  if (fit.p_defaulted) j["p_defaulted"] = true;
  if (fit.r_defaulted) j["r_defaulted"] = true;
  return j;
}

nlohmann::json to_json(const EmpiricalCdf& cdf) {
  nlohmann::json points = nlohmann::json::array();
  for (std::size_t i = 0; i < cdf.support.size(); ++i)
    points.push_back({round_sig6(cdf.support[i]), round_sig6(cdf.cumulative[i])});
  return {{"label", cdf.label},
          {"samples", cdf.sample_count},
          {"loss_fraction", round_sig6(cdf.loss_fraction)},
          {"points", points}};
}

nlohmann::json to_json(const BurstDistribution& dist) {
  nlohmann::json survival = nlohmann::json::array();
  nlohmann::json start_rate = nlohmann::json::array();
  for (const double s : dist.conditional_survival)
    survival.push_back(round_sig6(s));
  for (const double s : dist.burst_start_rate)
    start_rate.push_back(round_sig6(s));
  nlohmann::json j{{"error_rate", round_sig6(dist.error_rate)},
                   {"horizon", dist.horizon},
                   {"conditional_survival", survival},
                   {"burst_start_rate", start_rate}};
  if (dist.no_bursts) j["no_bursts"] = true;
  return j;
}

nlohmann::json to_json(const SimResult& res) {
  nlohmann::json j{{"error_rate", round_sig6(res.error_rate)},
                   {"steps", res.steps_recorded},
                   {"seed", res.seed},
                   {"streams", res.streams},
                   {"burn_in", res.burn_in},
                   {"bad_packets", res.bad_packets},
                   {"histogram", histogram_json(res.burst_histogram)},
                   {"truncated_histogram",
                    histogram_json(res.truncated_histogram)}};
  return j;
}

std::string ecdf_csv(const EmpiricalCdf& cdf) {
  std::ostringstream out;
  if (!cdf.label.empty()) out << "# label=" << cdf.label << "\n";
  out << "# samples=" << cdf.sample_count << "\n";
  out << "# loss_fraction=" << format_sig6(cdf.loss_fraction) << "\n";
  out << "latency_ms,cumulative\n";
  for (std::size_t i = 0; i < cdf.support.size(); ++i)
    out << format_sig6(cdf.support[i]) << ','
        << format_sig6(cdf.cumulative[i]) << "\n";
  return out.str();
}

std::string crossings_csv(const std::vector<Crossing>& crossings) {
  std::ostringstream out;
  out << "theta_ms,reliability\n";
  for (const auto& c : crossings)
    out << format_sig6(c.theta_ms) << ',' << format_sig6(c.reliability)
        << "\n";
  return out.str();
}

std::string burst_csv(const BurstDistribution& dist, const SimResult* mc) {
  std::ostringstream out;
  out << "# error_rate=" << format_sig6(dist.error_rate) << "\n";
  if (dist.no_bursts) out << "# no_bursts=1\n";
  if (mc != nullptr)
    out << "# mc_steps=" << mc->steps_recorded << " seed=" << mc->seed
        << " streams=" << mc->streams << "\n";
  out << "n,conditional_survival,burst_start_rate";
  if (mc != nullptr) out << ",mc_conditional_survival,mc_burst_start_rate";
  out << "\n";
  for (std::uint64_t n = 1; n <= dist.horizon; ++n) {
    out << n << ',' << format_sig6(dist.survival(n)) << ','
        << format_sig6(dist.start_rate(n));
    if (mc != nullptr) {
      double cond = 0.0;
      try {
        cond = empirical_burst_survival(*mc, n, SurvivalForm::kConditional);
      } catch (const NoBurstsError&) {
      }
      out << ',' << format_sig6(cond) << ','
          << format_sig6(
                 empirical_burst_survival(*mc, n, SurvivalForm::kStartRate));
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace burstlink
