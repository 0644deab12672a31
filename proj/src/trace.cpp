#include "burstlink/trace.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>

namespace burstlink {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

bool parse_i64(std::string_view s, std::int64_t& out) {
  const std::string buf(s);
  if (buf.empty()) return false;
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(buf.c_str(), &end, 10);
  if (errno != 0 || end != buf.c_str() + buf.size()) return false;
  out = v;
  return true;
}

bool parse_f64(std::string_view s, double& out) {
  const std::string buf(s);
  if (buf.empty()) return false;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(buf.c_str(), &end);
  if (errno != 0 || end != buf.c_str() + buf.size()) return false;
  out = v;
  return true;
}

}  // namespace

LatencyTrace load_trace(std::istream& in, std::optional<double> period_ms,
                        std::string_view fallback_label) {
  LatencyTrace trace;
  std::optional<std::string> meta_label;
  bool header_seen = false;
  std::string line;
  std::size_t lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    std::string_view row = trim(line);
    if (row.empty()) continue;
    if (row.front() == '#') {
      std::string_view meta = trim(row.substr(1));
      if (meta.rfind("period_ms=", 0) == 0) {
        double v = 0;
        if (!parse_f64(trim(meta.substr(10)), v))
          throw ParseError("bad period_ms metadata", lineno);
        trace.metadata_period_ms = v;
      } else if (meta.rfind("label=", 0) == 0) {
        meta_label = std::string(trim(meta.substr(6)));
      }
      continue;
    }
    if (!header_seen) {
      if (row != "seq,latency_ms")
        throw ParseError("expected header \"seq,latency_ms\"", lineno);
      header_seen = true;
      continue;
    }

    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos)
      throw ParseError("expected two comma-separated fields", lineno);
    std::int64_t seq = 0;
    if (!parse_i64(trim(row.substr(0, comma)), seq))
      throw ParseError("bad sequence number", lineno);
    const std::string_view latency_field = trim(row.substr(comma + 1));
    double latency = kLostLatencyMs;
    if (latency_field != "LOST") {
      if (!parse_f64(latency_field, latency) || !std::isfinite(latency))
        throw ParseError("bad latency value", lineno);
      if (latency < 0) throw ParseError("negative latency", lineno);
    }

    if (!trace.samples.empty()) {
      const std::int64_t prev = trace.samples.back().seq;
      if (seq <= prev)
        throw ValidationError("non-monotonic sequence number " +
                              std::to_string(seq) + " at line " +
                              std::to_string(lineno));
      for (std::int64_t gap = prev + 1; gap < seq; ++gap)
        trace.samples.push_back({gap, kLostLatencyMs, true});
    }
    trace.samples.push_back({seq, latency, false});
  }

  if (!header_seen) throw ValidationError("trace has no header");
  if (trace.samples.empty()) throw ValidationError("trace has no samples");

  if (period_ms)
    trace.period_ms = *period_ms;
  else if (trace.metadata_period_ms)
    trace.period_ms = *trace.metadata_period_ms;
  else
    throw ValidationError("no sampling period: pass one or add period_ms metadata");
  if (!(trace.period_ms > 0))
    throw ValidationError("sampling period must be positive");

  trace.label = meta_label ? *meta_label : std::string(fallback_label);
  return trace;
}

LatencyTrace load_trace_file(const std::string& path,
                             std::optional<double> period_ms) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file: " + path);
  return load_trace(in, period_ms, std::filesystem::path(path).stem().string());
}

EmpiricalCdf ecdf(const LatencyTrace& trace) {
  if (trace.samples.empty()) throw ValidationError("empty trace");
  EmpiricalCdf cdf;
  cdf.sample_count = trace.samples.size();
  cdf.label = trace.label;

  std::vector<double> finite;
  finite.reserve(trace.samples.size());
  std::size_t lost = 0;
  for (const auto& s : trace.samples) {
    if (s.lost())
      ++lost;
    else
      finite.push_back(s.latency_ms);
  }
  const double total = static_cast<double>(cdf.sample_count);
  cdf.loss_fraction = static_cast<double>(lost) / total;
  if (finite.empty()) return cdf;

  std::sort(finite.begin(), finite.end());
  std::size_t seen = 0;
  for (std::size_t i = 0; i < finite.size(); ++i) {
    ++seen;
    if (i + 1 < finite.size() && finite[i + 1] == finite[i]) continue;
    cdf.support.push_back(finite[i]);
    cdf.cumulative.push_back(static_cast<double>(seen) / total);
  }
  // Pin the top of the curve to the exact complement of the loss fraction.
  cdf.cumulative.back() = 1.0 - cdf.loss_fraction;
  return cdf;
}

double evaluate(const EmpiricalCdf& cdf, double theta_ms) {
  const auto it =
      std::upper_bound(cdf.support.begin(), cdf.support.end(), theta_ms);
  if (it == cdf.support.begin()) return 0.0;
  return cdf.cumulative[static_cast<std::size_t>(it - cdf.support.begin()) - 1];
}

std::vector<Crossing> crossing_points(const EmpiricalCdf& a,
                                      const EmpiricalCdf& b) {
  if (a.support.empty() || b.support.empty())
    throw ValidationError("crossing needs two non-empty CDFs");

  std::vector<double> merged;
  merged.reserve(a.support.size() + b.support.size());
  std::merge(a.support.begin(), a.support.end(), b.support.begin(),
             b.support.end(), std::back_inserter(merged));
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

  std::vector<Crossing> out;
  int prev_sign = 0;
  std::size_t prev_idx = 0;
  double prev_d = 0.0, prev_fa = 0.0;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const double fa = evaluate(a, merged[i]);
    const double fb = evaluate(b, merged[i]);
    const double d = fa - fb;
    const int sign = (d > 0.0) - (d < 0.0);
    if (sign == 0) continue;
    if (prev_sign != 0 && sign != prev_sign) {
      if (i == prev_idx + 1) {
        // Strict flip across one segment: interpolate the difference to its
        // root. t is symmetric in the argument order, so swapping a and b
        // reports bit-identical θ.
        const double t = prev_d / (prev_d - d);
        const double theta = merged[prev_idx] + t * (merged[i] - merged[prev_idx]);
        out.push_back({theta, prev_fa + t * (fa - prev_fa)});
      } else {
        // The difference sat at zero between the signed points: the curves
        // meet exactly at the first zero point.
        out.push_back({merged[prev_idx + 1], evaluate(a, merged[prev_idx + 1])});
      }
    }
    prev_sign = sign;
    prev_idx = i;
    prev_d = d;
    prev_fa = fa;
  }

  if (out.empty())
    throw NoCrossingError("CDFs never swap order: one interface dominates");
  return out;
}

}  // namespace burstlink
