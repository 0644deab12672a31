#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "burstlink/scenario.hpp"
#include "burstlink/trace.hpp"
#include "oracles.hpp"

using namespace burstlink;

namespace {

LatencyTrace trace_of(std::initializer_list<double> latencies,
                      double period = 100.0) {
  LatencyTrace t;
  t.period_ms = period;
  std::int64_t seq = 1;
  for (const double l : latencies) t.samples.push_back({seq++, l, false});
  return t;
}

}  // namespace

TEST_CASE("load echoes well-formed rows") {
  std::istringstream in(
      "seq,latency_ms\n"
      "1,12.5\n"
      "2,LOST\n"
      "3,8\n");
  const LatencyTrace t = load_trace(in, 100.0);
  REQUIRE(t.samples.size() == 3);
  CHECK(t.samples[0].latency_ms == 12.5);
  CHECK(t.samples[1].lost());
  CHECK_FALSE(t.samples[1].gap_filled);
  CHECK(t.samples[2].latency_ms == 8.0);
  CHECK(t.period_ms == 100.0);
}

TEST_CASE("load fills sequence gaps with LOST entries") {
  std::istringstream in(
      "seq,latency_ms\n"
      "1,10\n"
      "2,11\n"
      "4,12\n");
  const LatencyTrace t = load_trace(in, 100.0);
  REQUIRE(t.samples.size() == 4);
  CHECK(t.samples[2].seq == 3);
  CHECK(t.samples[2].lost());
  CHECK(t.samples[2].gap_filled);
  CHECK_FALSE(t.samples[3].gap_filled);
}

TEST_CASE("load honors metadata and reports overrides") {
  std::istringstream in(
      "# label=bench-a\n"
      "# period_ms=50\n"
      "seq,latency_ms\n"
      "1,10\n");
  const LatencyTrace t = load_trace(in);
  CHECK(t.period_ms == 50.0);
  CHECK(t.label == "bench-a");
  REQUIRE(t.metadata_period_ms.has_value());
  CHECK(*t.metadata_period_ms == 50.0);

  std::istringstream again(
      "# period_ms=50\n"
      "seq,latency_ms\n"
      "1,10\n");
  const LatencyTrace overridden = load_trace(again, 100.0);
  CHECK(overridden.period_ms == 100.0);
  CHECK(*overridden.metadata_period_ms == 50.0);
}

TEST_CASE("load rejects malformed input") {
  SUBCASE("bad field") {
    std::istringstream in("seq,latency_ms\n1;abc\n");
    CHECK_THROWS_AS(load_trace(in, 100.0), ParseError);
    std::istringstream in2("seq,latency_ms\n1,abc\n");
    try {
      load_trace(in2, 100.0);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("negative latency") {
    std::istringstream in("seq,latency_ms\n1,-3\n");
    CHECK_THROWS_AS(load_trace(in, 100.0), ParseError);
  }
  SUBCASE("missing header") {
    std::istringstream in("1,10\n");
    CHECK_THROWS_AS(load_trace(in, 100.0), ParseError);
  }
  SUBCASE("non-monotonic sequence") {
    std::istringstream in("seq,latency_ms\n2,10\n1,11\n");
    CHECK_THROWS_AS(load_trace(in, 100.0), ValidationError);
  }
  SUBCASE("empty trace") {
    std::istringstream in("seq,latency_ms\n");
    CHECK_THROWS_AS(load_trace(in, 100.0), ValidationError);
  }
  SUBCASE("no period from any source") {
    std::istringstream in("seq,latency_ms\n1,10\n");
    CHECK_THROWS_AS(load_trace(in), ValidationError);
  }
}

TEST_CASE("ecdf of a small trace") {
  const EmpiricalCdf cdf = ecdf(trace_of({5, 5, 10, 20}));
  REQUIRE(cdf.support.size() == 3);
  CHECK(evaluate(cdf, 5.0) == 0.5);
  CHECK(evaluate(cdf, 10.0) == 0.75);
  CHECK(evaluate(cdf, 20.0) == 1.0);
  CHECK(cdf.loss_fraction == 0.0);
}

TEST_CASE("ecdf keeps LOST mass out of reach") {
  const EmpiricalCdf cdf = ecdf(trace_of({5, kLostLatencyMs}));
  CHECK(cdf.loss_fraction == 0.5);
  CHECK(evaluate(cdf, 5.0) == 0.5);
  CHECK(evaluate(cdf, 1e18) == 0.5);
}

TEST_CASE("evaluate is a right-continuous step with inclusive deadline") {
  const EmpiricalCdf cdf = ecdf(trace_of({5, 10}));
  CHECK(evaluate(cdf, 0.0) == 0.0);
  CHECK(evaluate(cdf, 4.999) == 0.0);
  CHECK(evaluate(cdf, 5.0) == 0.5);
  CHECK(evaluate(cdf, 7.0) == 0.5);
  CHECK(evaluate(cdf, 10.0) == 1.0);
  CHECK(evaluate(cdf, 1e9) == 1.0);
}

// Closed-form exponential CDF values, frozen independently:
// F(t) = 1 - exp(-0.1 t) at t = 5, 10, 30.
TEST_CASE("ecdf tracks a known distribution within DKW distance") {
  constexpr double kF5 = 0.3934693402873666;
  constexpr double kF10 = 0.6321205588285577;
  constexpr double kF30 = 0.950212931632136;
  std::mt19937_64 gen(7);
  std::exponential_distribution<double> law(0.1);
  LatencyTrace t;
  t.period_ms = 100.0;
  for (std::int64_t i = 1; i <= 10000; ++i)
    t.samples.push_back({i, law(gen), false});
  const EmpiricalCdf cdf = ecdf(t);
  CHECK(std::abs(evaluate(cdf, 5.0) - kF5) < 0.02);
  CHECK(std::abs(evaluate(cdf, 10.0) - kF10) < 0.02);
  CHECK(std::abs(evaluate(cdf, 30.0) - kF30) < 0.02);
}

// Hand-derived: {10,10} has F = 0 then 1 at 10; {5,15} has F = 0.5 on
// [5,15). The step difference flips between 5 and 10, and the linear
// interpolant roots at theta = 7.5 where both curves read 0.5.
TEST_CASE("crossing of two simple traces") {
  const EmpiricalCdf a = ecdf(trace_of({10, 10}));
  const EmpiricalCdf b = ecdf(trace_of({5, 15}));
  const auto crossings = crossing_points(a, b);
  REQUIRE(crossings.size() == 1);
  CHECK(crossings[0].theta_ms == doctest::Approx(7.5).epsilon(1e-12));
  CHECK(crossings[0].reliability == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("identical CDFs have no crossing") {
  const EmpiricalCdf a = ecdf(trace_of({5, 10, 20}));
  const EmpiricalCdf b = ecdf(trace_of({5, 10, 20}));
  CHECK_THROWS_AS(crossing_points(a, b), NoCrossingError);
}

TEST_CASE("dominating CDF has no crossing") {
  const EmpiricalCdf fast = ecdf(trace_of({1, 2, 3}));
  const EmpiricalCdf slow = ecdf(trace_of({10, 20, 30}));
  CHECK_THROWS_AS(crossing_points(fast, slow), NoCrossingError);
}

TEST_CASE("crossing is symmetric in its arguments") {
  const CrossingTracePair pair = crowd_crossing_traces(2000, 11);
  const EmpiricalCdf w = ecdf(pair.wifi);
  const EmpiricalCdf l = ecdf(pair.lte);
  const auto ab = crossing_points(w, l);
  const auto ba = crossing_points(l, w);
  REQUIRE(ab.size() == ba.size());
  for (std::size_t i = 0; i < ab.size(); ++i)
    CHECK(ab[i].theta_ms == ba[i].theta_ms);
}

TEST_CASE("crossing localizes the planted crowd deadline") {
  const CrossingTracePair pair = crowd_crossing_traces();
  const EmpiricalCdf w = ecdf(pair.wifi);
  const EmpiricalCdf l = ecdf(pair.lte);
  const auto crossings = crossing_points(w, l);
  REQUIRE(!crossings.empty());
  // One merged-support segment around the planted point spans under 0.02 ms
  // at the default sample count.
  CHECK(std::abs(crossings.front().theta_ms - pair.planted.theta_ms) < 0.02);
  CHECK(std::abs(crossings.front().reliability - pair.planted.reliability) <
        0.001);
}

TEST_CASE("interpolants of both curves meet at every reported crossing") {
  const CrossingTracePair pair = crowd_crossing_traces(3000, 23);
  const EmpiricalCdf a = ecdf(pair.wifi);
  const EmpiricalCdf b = ecdf(pair.lte);
  std::vector<double> merged;
  std::merge(a.support.begin(), a.support.end(), b.support.begin(),
             b.support.end(), std::back_inserter(merged));
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  const auto lerp = [&](const EmpiricalCdf& cdf, double theta) {
    const auto hi = std::lower_bound(merged.begin(), merged.end(), theta);
    if (hi == merged.begin() || hi == merged.end())
      return evaluate(cdf, theta);
    const double x1 = *hi, x0 = *(hi - 1);
    const double f0 = evaluate(cdf, x0), f1 = evaluate(cdf, x1);
    return f0 + (theta - x0) / (x1 - x0) * (f1 - f0);
  };
  for (const auto& c : crossing_points(a, b)) {
    CHECK(std::abs(lerp(a, c.theta_ms) - lerp(b, c.theta_ms)) < 1e-9);
    CHECK(std::abs(lerp(a, c.theta_ms) - c.reliability) < 1e-9);
  }
}

TEST_CASE("cumulative curve is monotone and capped by the loss mass") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> lat(0.0, 50.0);
  std::bernoulli_distribution lose(0.2);
  for (int rep = 0; rep < 20; ++rep) {
    LatencyTrace t;
    t.period_ms = 100.0;
    const int n = 1 + static_cast<int>(gen() % 200);
    for (std::int64_t i = 1; i <= n; ++i)
      t.samples.push_back(
          {i, lose(gen) ? kLostLatencyMs : lat(gen), false});
    const EmpiricalCdf cdf = ecdf(t);
    for (std::size_t i = 1; i < cdf.cumulative.size(); ++i)
      CHECK(cdf.cumulative[i - 1] < cdf.cumulative[i]);
    if (!cdf.support.empty()) {
      CHECK(cdf.cumulative.back() <= 1.0);
      // Exact complement by construction.
      CHECK(evaluate(cdf, cdf.support.back()) == 1.0 - cdf.loss_fraction);
    }
  }
}
