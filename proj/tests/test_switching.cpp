#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"
#include "splitobs/switching.hpp"

using namespace splitobs;

namespace {

SwitchSpec dwell_spec(double tau) {
  SwitchSpec s;
  s.kind = SwitchKind::dwell;
  s.tau_D = tau;
  return s;
}

SwitchSpec avg_spec(double tau, double delta0) {
  SwitchSpec s;
  s.kind = SwitchKind::avg_dwell;
  s.tau_D = tau;
  s.delta0 = delta0;
  return s;
}

SwitchSpec arb_spec(double min_step) {
  SwitchSpec s;
  s.kind = SwitchKind::arbitrary;
  s.min_step = min_step;
  return s;
}

// Brute-force average-dwell law over every breakpoint pair.
bool avg_law_holds(const SwitchingSignal& sig, double tau, double delta0) {
  const auto& bp = sig.breakpoints;
  for (std::size_t i = 1; i < bp.size(); ++i)
    for (std::size_t j = i; j < bp.size(); ++j) {
      double count = static_cast<double>(j - i + 1);
      if (count > delta0 + (bp[j] - bp[i]) / tau + 1e-9) return false;
    }
  return true;
}

}  // namespace

TEST_SUITE("switching") {

TEST_CASE("single-member family: one segment, no switches") {
  SwitchingSignal sig = generate(dwell_spec(0.5), 1, 10.0, 1);
  CHECK(sig.breakpoints.size() == 1);
  CHECK(sig.values == std::vector<int>{0});
  CHECK(validate(sig, dwell_spec(0.5)).valid);
}

TEST_CASE("dwell generation: every switch gap at least tau_D") {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    SwitchingSignal sig = generate(dwell_spec(0.5), 3, 10.0, seed);
    CHECK(validate(sig, dwell_spec(0.5)).valid);
    for (std::size_t k = 2; k < sig.breakpoints.size(); ++k)
      CHECK(sig.breakpoints[k] - sig.breakpoints[k - 1] >= 0.5 - 1e-9);
    for (std::size_t k = 1; k < sig.values.size(); ++k)
      CHECK(sig.values[k] != sig.values[k - 1]);
  }
}

TEST_CASE("average-dwell generation: chatter law on every pair") {
  for (std::uint64_t seed : {7, 8, 9}) {
    SwitchingSignal sig = generate(avg_spec(0.0369, 5.0), 2, 10.0, seed);
    CHECK(validate(sig, avg_spec(0.0369, 5.0)).valid);
    CHECK(avg_law_holds(sig, 0.0369, 5.0));
    CHECK(sig.breakpoints.size() > 10);  // tight tau_D forces real switching
  }
}

TEST_CASE("generate/validate round-trip: 1000 seeds per kind") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    CHECK(validate(generate(dwell_spec(0.3), 3, 6.0, seed), dwell_spec(0.3)).valid);
    CHECK(validate(generate(avg_spec(0.1, 3.0), 2, 6.0, seed), avg_spec(0.1, 3.0)).valid);
    CHECK(validate(generate(arb_spec(0.05), 4, 6.0, seed), arb_spec(0.05)).valid);
  }
}

TEST_CASE("integer-time signals land on event indices") {
  SwitchSpec s = arb_spec(1.0);
  s.integer_times = true;
  for (std::uint64_t seed : {11, 12, 13}) {
    SwitchingSignal sig = generate(s, 2, 25.0, seed);
    CHECK(validate(sig, s).valid);
    for (double t : sig.breakpoints)
      CHECK(std::abs(t - std::llround(t)) <= 1e-12);
  }
}

TEST_CASE("validate: pinned acceptance and rejection cases") {
  SwitchingSignal constant;
  constant.breakpoints = {0.0};
  constant.values = {0};
  constant.horizon = 5.0;
  CHECK(validate(constant, dwell_spec(2.0)).valid);
  CHECK(validate(constant, avg_spec(2.0, 0.0)).valid);

  // two discontinuities 0.01 apart against tau_D = 0.1
  SwitchingSignal burst;
  burst.breakpoints = {0.0, 1.0, 1.01};
  burst.values = {0, 1, 0};
  burst.horizon = 5.0;
  SignalCheck chk = validate(burst, dwell_spec(0.1));
  CHECK_FALSE(chk.valid);
  CHECK(chk.violation_time == doctest::Approx(1.01));
  CHECK(chk.message.find("dwell") != std::string::npos);

  // a head segment shorter than tau_D is legal: it is not a switch pair
  SwitchingSignal head;
  head.breakpoints = {0.0, 0.02};
  head.values = {0, 1};
  head.horizon = 5.0;
  CHECK(validate(head, dwell_spec(0.1)).valid);

  // structural failures
  SwitchingSignal null_switch;
  null_switch.breakpoints = {0.0, 1.0};
  null_switch.values = {0, 0};
  null_switch.horizon = 5.0;
  CHECK_FALSE(validate(null_switch, arb_spec(0.1)).valid);

  SwitchingSignal late_start;
  late_start.breakpoints = {0.5, 1.0};
  late_start.values = {0, 1};
  late_start.horizon = 5.0;
  CHECK_FALSE(validate(late_start, arb_spec(0.1)).valid);
}

TEST_CASE("avg-dwell validation matches the brute-force pair oracle") {
  // dense burst then long quiet: valid or not exactly per the law
  SwitchingSignal sig;
  sig.horizon = 20.0;
  sig.breakpoints = {0.0, 1.0, 1.2, 1.4, 1.6, 15.0};
  sig.values = {0, 1, 0, 1, 0, 1};
  for (double tau : {0.1, 0.2, 0.5, 1.0, 2.0}) {
    for (double d0 : {0.0, 1.0, 2.0, 4.0, 8.0}) {
      bool expect = avg_law_holds(sig, tau, d0);
      CHECK(validate(sig, avg_spec(tau, d0)).valid == expect);
    }
  }
}

TEST_CASE("dwell signals validate under the average-dwell law with delta0 >= 1") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SwitchingSignal sig = generate(dwell_spec(0.4), 3, 8.0, seed);
    CHECK(validate(sig, avg_spec(0.4, 1.0)).valid);
    CHECK(validate(sig, avg_spec(0.4, 3.0)).valid);
  }
}

TEST_CASE("sample: right-continuous staircase lookup") {
  SwitchingSignal sig;
  sig.breakpoints = {0.0, 1.0, 2.5};
  sig.values = {2, 0, 1};
  sig.horizon = 4.0;
  CHECK(sample(sig, 0.0) == 2);
  CHECK(sample(sig, 0.999) == 2);
  CHECK(sample(sig, 1.0) == 0);  // post-switch value at the breakpoint
  CHECK(sample(sig, 2.5) == 1);
  CHECK(sample(sig, 4.0) == 1);
  CHECK_THROWS_AS(sample(sig, 4.5), OutOfHorizon);
  CHECK_THROWS_AS(sample(sig, -0.5), OutOfHorizon);

  // scan oracle on random times
  for (int k = 0; k <= 40; ++k) {
    double t = 4.0 * k / 40.0;
    int expect = 2;
    if (t >= 2.5)
      expect = 1;
    else if (t >= 1.0)
      expect = 0;
    CHECK(sample(sig, t) == expect);
  }
}

TEST_CASE("switch_count counts discontinuities in a half-open window") {
  SwitchingSignal sig;
  sig.breakpoints = {0.0, 1.0, 2.0, 3.0};
  sig.values = {0, 1, 0, 1};
  sig.horizon = 5.0;
  CHECK(switch_count(sig, 0.0, 5.0) == 3);
  CHECK(switch_count(sig, 0.0, 1.0) == 1);   // (0, 1] includes the switch at 1
  CHECK(switch_count(sig, 1.0, 2.0) == 1);
  CHECK(switch_count(sig, 3.0, 5.0) == 0);
}

TEST_CASE("indicator CSV covers the horizon with 1-based ids") {
  SwitchingSignal sig;
  sig.breakpoints = {0.0, 1.5};
  sig.values = {0, 1};
  sig.horizon = 3.0;
  std::string csv = indicator_csv(sig);
  CHECK(csv == "t,graph_id\n0,1\n1.5,2\n3,2\n");
}

}  // TEST_SUITE
