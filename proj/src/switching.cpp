#include "splitobs/switching.hpp"

#include <algorithm>
#include <cmath>

#include "splitobs/format.hpp"
#include "splitobs/randgen.hpp"

namespace splitobs {

namespace {

int next_value(Rng& rng, int current, int family_size) {
  return (current + rng.uniform_int(1, family_size - 1)) % family_size;
}

// Smallest admissible next switch time under the average-dwell law: placing
// switch K (0-based) at s requires, for every earlier switch i,
//   (K - i + 1) <= delta0 + (s - s_i)/tau_D.
double avg_dwell_floor(const std::vector<double>& s, double tau_D, double delta0) {
  const int K = static_cast<int>(s.size());
  double lo = 0.0;
  for (int i = 0; i < K; ++i)
    lo = std::max(lo, s[i] + (K - i + 1 - delta0) * tau_D);
  return lo;
}

}  // namespace

SwitchingSignal generate(const SwitchSpec& spec, int family_size, double horizon,
                         std::uint64_t seed) {
  if (family_size < 1) throw EmptyFamily("generate: family_size must be >= 1");
  if (horizon <= 0.0) throw DimensionMismatch("generate: horizon must be positive");
  if (spec.kind != SwitchKind::arbitrary && spec.tau_D <= 0.0)
    throw DimensionMismatch("generate: tau_D must be positive");
  if (spec.kind == SwitchKind::arbitrary && spec.min_step <= 0.0)
    throw DimensionMismatch("generate: min_step must be positive");

  SwitchingSignal sig;
  sig.horizon = horizon;
  sig.kind = spec.kind;
  sig.tau_D = spec.kind == SwitchKind::arbitrary ? 0.0 : spec.tau_D;
  sig.delta0 = spec.kind == SwitchKind::avg_dwell ? spec.delta0 : 0.0;

  const double end = horizon * (1.0 - 1e-12);
  const bool integer = spec.integer_times;
  // Generated by construction to satisfy the law; the final validate plus
  // reseeded retries is belt-and-braces against edge cases.
  for (int attempt = 0; attempt < 100; ++attempt) {
    Rng rng(seed + 1000003ull * static_cast<std::uint64_t>(attempt));
    sig.breakpoints = {0.0};
    sig.values = {family_size == 1 ? 0 : rng.uniform_int(0, family_size - 1)};
    if (family_size == 1) return sig;

    if (spec.kind == SwitchKind::dwell) {
      double tau = integer ? std::ceil(spec.tau_D) : spec.tau_D;
      double t = 0.0;
      while (true) {
        double gap = integer ? static_cast<double>(rng.uniform_int(
                                   static_cast<int>(tau), 2 * static_cast<int>(tau)))
                             : tau * (1.0 + rng.uniform());
        t += gap;
        if (t >= end) break;
        sig.breakpoints.push_back(t);
        sig.values.push_back(next_value(rng, sig.values.back(), family_size));
      }
    } else if (spec.kind == SwitchKind::avg_dwell) {
      // delta0 < 1 forbids every switch: the pair (s, s) alone demands
      // 1 <= delta0. Return the single-segment signal in that case.
      if (spec.delta0 < 1.0) return sig;
      std::vector<double> s;
      const double chatter_gap = integer ? 1.0 : 1e-3 * spec.tau_D;
      while (true) {
        double prev = s.empty() ? 0.0 : s.back();
        double floor_t = std::max(avg_dwell_floor(s, spec.tau_D, spec.delta0),
                                  prev + chatter_gap);
        double t;
        if (rng.uniform() < 0.65) {
          t = floor_t + rng.uniform() * chatter_gap;  // chatter: as fast as allowed
        } else {
          t = std::max(floor_t, prev) + spec.tau_D * (1.0 + rng.uniform());  // rest
        }
        if (integer) t = std::max(std::ceil(t), prev + 1.0);
        if (t >= end) break;
        s.push_back(t);
        sig.breakpoints.push_back(t);
        sig.values.push_back(next_value(rng, sig.values.back(), family_size));
      }
    } else {  // arbitrary
      double step = integer ? std::max(1.0, std::ceil(spec.min_step)) : spec.min_step;
      double t = 0.0;
      while (true) {
        double gap = integer ? static_cast<double>(rng.uniform_int(
                                   static_cast<int>(step), 3 * static_cast<int>(step)))
                             : step * (1.0 + 2.0 * rng.uniform());
        t += gap;
        if (t >= end) break;
        sig.breakpoints.push_back(t);
        sig.values.push_back(next_value(rng, sig.values.back(), family_size));
      }
    }

    if (validate(sig, spec).valid) return sig;
  }
  throw SolverDiverged("generate: rejection sampling exhausted its retries");
}

SignalCheck validate(const SwitchingSignal& sig, const SwitchSpec& spec) {
  SignalCheck out;
  auto fail = [&out](double at, const std::string& msg) {
    out.valid = false;
    out.violation_time = at;
    out.message = msg;
    return out;
  };

  if (sig.horizon <= 0.0) return fail(0.0, "horizon must be positive");
  if (sig.breakpoints.empty()) return fail(0.0, "signal has no breakpoints");
  if (sig.breakpoints.size() != sig.values.size())
    return fail(0.0, "breakpoint/value count mismatch");
  if (sig.breakpoints.front() != 0.0)
    return fail(sig.breakpoints.front(), "first breakpoint must be t = 0");
  for (std::size_t k = 0; k < sig.breakpoints.size(); ++k) {
    if (k > 0 && sig.breakpoints[k] <= sig.breakpoints[k - 1])
      return fail(sig.breakpoints[k], "breakpoints must be strictly increasing");
    if (sig.breakpoints[k] >= sig.horizon)
      return fail(sig.breakpoints[k], "breakpoint at or beyond the horizon");
    if (sig.values[k] < 0) return fail(sig.breakpoints[k], "negative graph id");
    if (k > 0 && sig.values[k] == sig.values[k - 1])
      return fail(sig.breakpoints[k], "null switch (consecutive values equal)");
  }

  if (spec.kind == SwitchKind::dwell) {
    // Only discontinuity pairs are constrained; the first interval [0, s_1)
    // is a head segment, not a gap between switches.
    const double tol = 1e-9 * std::max(1.0, spec.tau_D);
    for (std::size_t k = 2; k < sig.breakpoints.size(); ++k)
      if (sig.breakpoints[k] - sig.breakpoints[k - 1] < spec.tau_D - tol)
        return fail(sig.breakpoints[k], "dwell violation: gap below tau_D");
  } else if (spec.kind == SwitchKind::avg_dwell) {
    const std::size_t K = sig.breakpoints.size();
    for (std::size_t i = 1; i < K; ++i) {
      for (std::size_t j = i; j < K; ++j) {
        double count = static_cast<double>(j - i + 1);
        double bound =
            spec.delta0 + (sig.breakpoints[j] - sig.breakpoints[i]) / spec.tau_D;
        if (count > bound + 1e-9)
          return fail(sig.breakpoints[j], "average-dwell violation: switch count " +
                                              std::to_string(j - i + 1) +
                                              " exceeds the chatter bound");
      }
    }
  }
  return out;
}

int sample(const SwitchingSignal& sig, double t) {
  const double slack = 1e-12 * std::max(1.0, sig.horizon);
  if (t < -slack || t > sig.horizon + slack)
    throw OutOfHorizon("sample: t outside [0, horizon]");
  auto it = std::upper_bound(sig.breakpoints.begin(), sig.breakpoints.end(), t);
  std::size_t idx = static_cast<std::size_t>(it - sig.breakpoints.begin());
  if (idx > 0) --idx;
  return sig.values[idx];
}

int switch_count(const SwitchingSignal& sig, double t0, double t) {
  int count = 0;
  for (std::size_t k = 1; k < sig.breakpoints.size(); ++k)
    if (sig.breakpoints[k] > t0 && sig.breakpoints[k] <= t) ++count;
  return count;
}

std::string indicator_csv(const SwitchingSignal& sig) {
  std::string out = "t,graph_id\n";
  for (std::size_t k = 0; k < sig.breakpoints.size(); ++k)
    out += fmt17(sig.breakpoints[k]) + "," + std::to_string(sig.values[k] + 1) + "\n";
  out += fmt17(sig.horizon) + "," + std::to_string(sig.values.back() + 1) + "\n";
  return out;
}

}  // namespace splitobs
