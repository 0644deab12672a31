#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "burstlink/compose.hpp"
#include "burstlink/ge.hpp"
#include "burstlink/mc.hpp"
#include "burstlink/trace.hpp"

namespace burstlink {

// All emitted numbers pass through a 6-significant-digit round, so a given
// analysis produces byte-identical files on every run.
std::string format_sig6(double v);
double round_sig6(double v);

nlohmann::json to_json(const GeModel& m);
nlohmann::json to_json(const SteadyState& s);
nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const EmpiricalCdf& cdf);
nlohmann::json to_json(const BurstDistribution& dist);
nlohmann::json to_json(const SimResult& res);

std::string ecdf_csv(const EmpiricalCdf& cdf);
std::string crossings_csv(const std::vector<Crossing>& crossings);
// Analytic burst curves, with empirical columns appended when a simulation
// result is supplied.
std::string burst_csv(const BurstDistribution& dist,
                      const SimResult* mc = nullptr);

}  // namespace burstlink
