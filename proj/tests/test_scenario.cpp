#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "burstlink/compose.hpp"
#include "burstlink/scenario.hpp"
#include "oracles.hpp"

using namespace burstlink;

TEST_CASE("fixture registry") {
  CHECK(fixture_names().size() == 6);
  const GeModel& lte = fixture("lte-crowd");
  CHECK(lte.p == 0.0178);
  CHECK(lte.r == 0.2577);
  CHECK(fixture("wifi-relax").p == 0.0001);
  CHECK(fixture("direct-crowd").r == 0.2423);
  CHECK(fixture_theta_ms("lte-crowd") == 38.25);
  CHECK(fixture_theta_ms("wifi-relax") == 22.5);
  CHECK(fixture_theta_ms("direct-relax") == 45.0);
  CHECK(fixture_note("wifi-relax").find("0.0015") != std::string_view::npos);
  CHECK(fixture_note("lte-crowd").empty());
  try {
    fixture("wimax-crowd");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("lte-relax") != std::string::npos);
  }
}

TEST_CASE("fixture steady states match their published outage rates") {
  CHECK(std::abs(steady_state(fixture("lte-crowd")).pi_bad - 0.0646) < 5e-4);
  CHECK(std::abs(steady_state(fixture("lte-relax")).pi_bad - 0.0150) < 5e-4);
  // The wifi-relax p is quoted to one digit; the exact value is ~0.00118.
  CHECK(steady_state(fixture("wifi-relax")).pi_bad ==
        doctest::Approx(0.001182033096926714).epsilon(1e-12));
}

TEST_CASE("equal budget split") {
  const auto split = budget_split(45.0, 2, SplitPolicy::kEqual);
  REQUIRE(split.size() == 2);
  CHECK(split[0] == 22.5);
  CHECK(split[1] == 22.5);
  const auto one = budget_split(10.0, 1, SplitPolicy::kEqual);
  CHECK(one == std::vector<double>{10.0});
  CHECK_THROWS_AS(budget_split(10.0, 0, SplitPolicy::kEqual), ValidationError);
  CHECK_THROWS_AS(budget_split(0.0, 2, SplitPolicy::kEqual), ValidationError);
}

TEST_CASE("equi-performance split assigns the crossing deadline") {
  const CrossingTracePair pair = crowd_crossing_traces();
  const EmpiricalCdf w = ecdf(pair.wifi);
  const EmpiricalCdf l = ecdf(pair.lte);
  const auto split =
      budget_split(80.0, 2, SplitPolicy::kEquiPerformance, &w, &l);
  REQUIRE(split.size() == 2);
  CHECK(split[0] == split[1]);
  CHECK(std::abs(split[0] - 38.25) < 0.02);
  CHECK_THROWS_AS(budget_split(80.0, 2, SplitPolicy::kEquiPerformance),
                  ValidationError);
}

TEST_CASE("synthesis reproduces the direct-crowd quadruple") {
  const SynthesisResult out = synthesize(
      fixture("lte-crowd"), fixture("lte-relax"), fixture("direct-relax"));
  // Frozen: 0.0178 * 0.1457/0.0127 and 0.2577 * 0.7857/0.8356.
  CHECK(out.model.p == doctest::Approx(0.20420944881889766).epsilon(1e-14));
  CHECK(out.model.r == doctest::Approx(0.24231078267113448).epsilon(1e-14));
  CHECK(std::abs(out.model.p - fixture("direct-crowd").p) < 5e-4);
  CHECK(std::abs(out.model.r - fixture("direct-crowd").r) < 5e-4);
  CHECK_FALSE(out.p_clamped);
  CHECK_FALSE(out.r_clamped);
}

TEST_CASE("synthesis with identical reference and variant is the identity") {
  const GeModel base = fixture("wifi-crowd");
  const SynthesisResult out =
      synthesize(base, fixture("lte-relax"), fixture("lte-relax"));
  CHECK(out.model.p == base.p);
  CHECK(out.model.r == base.r);
}

TEST_CASE("synthesis clamps runaway ratios and flags them") {
  const SynthesisResult out = synthesize({0.5, 0.5, "base"}, {0.1, 0.5, "ref"},
                                         {0.9, 0.5, "var"});
  CHECK(out.model.p == 1.0);
  CHECK(out.p_clamped);
  CHECK_FALSE(out.r_clamped);
  CHECK_THROWS_AS(
      synthesize({0.5, 0.5, ""}, {0.0, 0.5, ""}, {0.9, 0.5, ""}),
      ValidationError);
  CHECK_THROWS_AS(
      synthesize({0.5, 0.5, ""}, {0.1, 0.0, ""}, {0.9, 0.5, ""}),
      ValidationError);
}

TEST_CASE("generated traces binarize back to the exact state sequence") {
  const GeModel m{0.1, 0.4, "synthetic"};
  const double theta = 20.0;
  const LatencyTrace trace = generate_trace(m, theta, 5'000, 3);
  CHECK(trace.samples.size() == 5'000);
  for (const auto& s : trace.samples) {
    if (s.latency_ms <= theta) {
      CHECK(s.latency_ms >= theta / 2.0);
    } else {
      CHECK(s.latency_ms > theta);
      CHECK(s.latency_ms <= 4.0 * theta);
    }
  }
}

TEST_CASE("generated traces from a perfect channel stay timely") {
  const LatencyTrace trace = generate_trace({0.0, 0.5, ""}, 20.0, 2'000, 9);
  for (const auto& s : trace.samples) CHECK(s.latency_ms <= 20.0);
}

TEST_CASE("bad law can emit losses") {
  LatencyLaw bad = LatencyLaw::default_bad(20.0);
  bad.lost_prob = 1.0;
  const LatencyTrace trace = generate_trace(
      {0.5, 0.5, ""}, 20.0, 2'000, 5, LatencyLaw::default_good(20.0), bad);
  bool saw_lost = false;
  for (const auto& s : trace.samples) {
    if (s.lost()) saw_lost = true;
    else CHECK(s.latency_ms <= 20.0);
  }
  CHECK(saw_lost);
}

TEST_CASE("law validation") {
  const LatencyLaw good = LatencyLaw::default_good(20.0);
  const LatencyLaw bad = LatencyLaw::default_bad(20.0);
  // Good law crossing the deadline.
  CHECK_THROWS_AS(
      generate_trace({0.1, 0.4, ""}, 20.0, 100, 1, {10.0, 25.0, 0.0, false},
                     bad),
      ValidationError);
  // Bad law starting below the deadline.
  CHECK_THROWS_AS(
      generate_trace({0.1, 0.4, ""}, 20.0, 100, 1, good,
                     {15.0, 30.0, 0.0, true}),
      ValidationError);
  // Lossy good law.
  CHECK_THROWS_AS(
      generate_trace({0.1, 0.4, ""}, 20.0, 100, 1, {10.0, 20.0, 0.5, false},
                     bad),
      ValidationError);
  CHECK_THROWS_AS(generate_trace({0.1, 0.4, ""}, 20.0, 0, 1), ValidationError);
}

TEST_CASE("round trip: generate, binarize, fit recovers the model") {
  const GeModel truth{0.0515, 0.9468, ""};
  const LatencyTrace trace = generate_trace(truth, 38.25, 1'000'000, 21);
  const FitResult fitted = fit(binarize(trace, 38.25));
  CHECK(fitted.ci_p.contains(truth.p));
  CHECK(fitted.ci_r.contains(truth.r));
  CHECK(std::abs(fitted.model.p - truth.p) < 0.002);
  CHECK(std::abs(fitted.model.r - truth.r) < 0.02);
}

TEST_CASE("survival time is the tolerance-period product") {
  CHECK(survival_time_ms(3, 100.0) == 300.0);
  CHECK(survival_time_ms(30, 100.0) == 3000.0);
  CHECK(survival_time_ms(1, 50.0) == 50.0);
  CHECK_THROWS_AS(survival_time_ms(0, 100.0), ValidationError);
  CHECK_THROWS_AS(survival_time_ms(3, 0.0), ValidationError);
}

TEST_CASE("crossing traces are deterministic per seed") {
  const CrossingTracePair a = crowd_crossing_traces(1000, 7);
  const CrossingTracePair b = crowd_crossing_traces(1000, 7);
  const CrossingTracePair c = crowd_crossing_traces(1000, 8);
  REQUIRE(a.wifi.samples.size() == b.wifi.samples.size());
  bool all_equal = true, any_diff = false;
  for (std::size_t i = 0; i < a.wifi.samples.size(); ++i) {
    all_equal &= a.wifi.samples[i].latency_ms == b.wifi.samples[i].latency_ms;
    any_diff |= a.wifi.samples[i].latency_ms != c.wifi.samples[i].latency_ms;
  }
  CHECK(all_equal);
  CHECK(any_diff);  // order changes, values are the same quantile grid
  CHECK_THROWS_AS(crowd_crossing_traces(10, 1), ValidationError);
}

TEST_CASE("scenario loads inline models") {
  std::istringstream in(R"({
    "name": "relay-study",
    "period_ms": 100,
    "tolerance_packets": 3,
    "theta_total_ms": 45,
    "hops": [
      {"model": {"p": 0.0127, "r": 0.8356, "label": "lte"}, "theta_ms": 22.5},
      {"model": {"p": 0.0001, "r": 0.0845, "label": "wifi"}, "theta_ms": 22.5}
    ]
  })");
  const ScenarioSpec spec = load_scenario(in);
  CHECK(spec.name == "relay-study");
  REQUIRE(spec.hops.size() == 2);
  CHECK(spec.hops[0].p == 0.0127);
  CHECK(spec.hops[1].label == "wifi");
  CHECK(spec.theta_per_hop_ms == std::vector<double>{22.5, 22.5});
  CHECK(spec.tolerance_packets == 3);
}

TEST_CASE("scenario loads trace hops by fitting") {
  const GeModel truth{0.3, 0.7, ""};
  const LatencyTrace trace = generate_trace(truth, 22.5, 50'000, 13);
  const std::string path = "scenario_hop_trace.csv";
  {
    std::ofstream out(path);
    out << "# period_ms=100\nseq,latency_ms\n";
    for (const auto& s : trace.samples) {
      out << s.seq << ',';
      if (s.lost())
        out << "LOST\n";
      else
        out << s.latency_ms << "\n";
    }
  }
  std::istringstream in(R"({
    "hops": [{"trace": ")" + path + R"(", "theta_ms": 22.5}]
  })");
  const ScenarioSpec spec = load_scenario(in);
  std::remove(path.c_str());
  REQUIRE(spec.hops.size() == 1);
  CHECK(std::abs(spec.hops[0].p - truth.p) < 0.02);
  CHECK(std::abs(spec.hops[0].r - truth.r) < 0.02);
  CHECK(spec.theta_total_ms == 22.5);
}

TEST_CASE("scenario validation") {
  std::istringstream no_hops(R"({"hops": []})");
  CHECK_THROWS_AS(load_scenario(no_hops), ValidationError);
  std::istringstream bad_json("{nope");
  CHECK_THROWS_AS(load_scenario(bad_json), ValidationError);
  std::istringstream over_budget(R"({
    "theta_total_ms": 30,
    "hops": [
      {"model": {"p": 0.1, "r": 0.5}, "theta_ms": 20},
      {"model": {"p": 0.1, "r": 0.5}, "theta_ms": 20}
    ]
  })");
  CHECK_THROWS_AS(load_scenario(over_budget), ValidationError);
  std::istringstream no_model(R"({"hops": [{"theta_ms": 20}]})");
  CHECK_THROWS_AS(load_scenario(no_model), ValidationError);
  CHECK_THROWS_AS(load_scenario_file("does-not-exist.json"), IoError);
}
