#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "burstlink/errors.hpp"

namespace burstlink {

// A lost packet can never satisfy a deadline: it carries infinite latency.
inline constexpr double kLostLatencyMs =
    std::numeric_limits<double>::infinity();

struct LatencySample {
  std::int64_t seq = 0;
  double latency_ms = 0.0;
  bool gap_filled = false;  // inserted for a missing sequence number
  bool lost() const { return std::isinf(latency_ms); }
};

// Ordered per-packet latency record sampled at a fixed period.
struct LatencyTrace {
  std::vector<LatencySample> samples;
  double period_ms = 0.0;
  std::string label;
  // Period declared by file metadata, kept so callers can detect overrides.
  std::optional<double> metadata_period_ms;
};

// Right-continuous step CDF over the finite latencies of a trace. LOST mass
// is unreachable by any finite deadline, so cumulative tops out below 1 for
// lossy traces.
struct EmpiricalCdf {
  std::vector<double> support;     // sorted, distinct finite latencies
  std::vector<double> cumulative;  // non-decreasing; last == 1 - loss_fraction
  std::size_t sample_count = 0;
  double loss_fraction = 0.0;
  std::string label;
};

// θ where two step CDFs swap order, interpolated linearly between the
// bracketing merged-support points; reliability is the common CDF value.
struct Crossing {
  double theta_ms = 0.0;
  double reliability = 0.0;
};

// CSV with a "seq,latency_ms" header, "#" comments, optional "# period_ms="
// and "# label=" metadata, LOST markers, and gap-filling of skipped sequence
// numbers. An explicit period wins over metadata; with neither the load
// fails.
LatencyTrace load_trace(std::istream& in,
                        std::optional<double> period_ms = std::nullopt,
                        std::string_view fallback_label = {});
LatencyTrace load_trace_file(const std::string& path,
                             std::optional<double> period_ms = std::nullopt);

EmpiricalCdf ecdf(const LatencyTrace& trace);

// F(θ) = fraction of packets with latency <= θ (deadline inclusive).
double evaluate(const EmpiricalCdf& cdf, double theta_ms);

// All equi-performance points of two CDFs in ascending θ order. Strict sign
// changes only; if the step difference touches zero without flipping there
// is no crossing there. Throws NoCrossingError when one curve dominates.
std::vector<Crossing> crossing_points(const EmpiricalCdf& a,
                                      const EmpiricalCdf& b);

}  // namespace burstlink
