#include "ptim/incidents.hpp"

#include <array>
#include <atomic>
#include <string>

#include "ptim/errors.hpp"
#include "ptim/random.hpp"

namespace ptim {

namespace {

// Severity table (vph for rates, h for times; the duration variance column
// is read as h^2).
constexpr std::array<SeverityRow, 4> kSeverityTable{{
    {{750, 800}, {600, 800}, {100, 200}, {600, 720}, {0.1, 0.2}, {0.2, 0.3}},
    {{1130, 1500}, {900, 1900}, {100, 300}, {960, 1120}, {0.2, 0.3}, {0.3, 0.4}},
    {{1700, 1900}, {1000, 1200}, {100, 300}, {1440, 1644}, {0.2, 0.4}, {0.5, 0.7}},
    {{2200, 2800}, {1000, 1500}, {100, 300}, {1824, 2015}, {0.2, 0.3}, {0.5, 1.0}},
}};

std::atomic<std::uint64_t> g_clamped{0};

double mid(ParamRange r) { return 0.5 * (r.lo + r.hi); }

double clamp_nonnegative(double v) {
  if (v < 0.0) {
    g_clamped.fetch_add(1, std::memory_order_relaxed);
    return 0.0;
  }
  return v;
}

}  // namespace

void TrafficParams::validate() const {
  if (!(s > 0.0) || !(q > 0.0)) throw InputError("capacity and flow must be positive");
  if (s1_mean < 0.0 || s1_sd < 0.0) throw InputError("reduced capacity must be non-negative");
  if (r_var < 0.0) throw InputError("duration variance must be non-negative");
  if (clearance < 0.0) throw InputError("clearance time must be non-negative");
}

const SeverityRow& severity_row(int severity) {
  if (severity < kMinSeverity || severity > kMaxSeverity) {
    throw InputError("severity must be in 1..4, got " + std::to_string(severity));
  }
  return kSeverityTable[static_cast<std::size_t>(severity - 1)];
}

TrafficParams nominal_params() {
  TrafficParams p;
  for (const SeverityRow& row : kSeverityTable) {
    p.s += mid(row.s) / 4.0;
    p.s1_mean += mid(row.s1_mean) / 4.0;
    p.s1_sd += mid(row.s1_sd) / 4.0;
    p.q += mid(row.q) / 4.0;
    p.r_var += mid(row.r_var) / 4.0;
    p.clearance += mid(row.clearance) / 4.0;
  }
  return p;
}

Incident sample_incident(int severity, CellId location, double report_time, std::uint64_t seed,
                         int id) {
  const SeverityRow& row = severity_row(severity);
  Rng rng = make_rng(seed);
  Incident inc;
  inc.id = id;
  inc.location = location;
  inc.severity = severity;
  inc.report_time = report_time;
  inc.params.s = uniform(rng, row.s.lo, row.s.hi);
  inc.params.s1_mean = uniform(rng, row.s1_mean.lo, row.s1_mean.hi);
  inc.params.s1_sd = uniform(rng, row.s1_sd.lo, row.s1_sd.hi);
  inc.params.q = uniform(rng, row.q.lo, row.q.hi);
  inc.params.r_var = uniform(rng, row.r_var.lo, row.r_var.hi);
  inc.params.clearance = uniform(rng, row.clearance.lo, row.clearance.hi);
  inc.hazard = uniform_int(rng, 1, 5);
  inc.sparsity = uniform_int(rng, 1, 5);
  return inc;
}

double stochastic_delay(const TrafficParams& p, double mean_duration) {
  if (!(p.s > p.q)) {
    throw ModelDomainError("queue never dissipates: capacity s must exceed flow q");
  }
  // s1^2 - (s+q) s1 + s q factors as (s - s1)(q - s1); the product form
  // avoids cancellation when s1 is close to q.
  const double numer = (p.s - p.s1_mean) * (p.q - p.s1_mean) + p.s1_sd * p.s1_sd;
  const double duration_moment = mean_duration * mean_duration + p.r_var;
  return clamp_nonnegative(numer * duration_moment / (2.0 * (p.s - p.q)));
}

double stochastic_delay_variance(const TrafficParams& p, double mean_duration) {
  if (!(p.q > 0.0)) throw ModelDomainError("flow rate q must be positive");
  const double gap = p.q - p.s1_mean;
  const double r2 = mean_duration * mean_duration;
  const double q2 = p.q * p.q;
  const double v = (gap * gap + p.s1_sd * p.s1_sd) * (p.r_var + r2) / (3.0 * q2) -
                   gap * gap * r2 / (4.0 * q2);
  return clamp_nonnegative(v);
}

double expected_delay(const TrafficParams& p, double response_time) {
  if (response_time < 0.0) throw InputError("response time must be non-negative");
  return stochastic_delay(p, response_time + p.clearance);
}

double delay_variance(const TrafficParams& p, double response_time) {
  if (response_time < 0.0) throw InputError("response time must be non-negative");
  return stochastic_delay_variance(p, response_time + p.clearance);
}

std::uint64_t clamped_evaluations() { return g_clamped.load(std::memory_order_relaxed); }

void reset_clamped_evaluations() { g_clamped.store(0, std::memory_order_relaxed); }

}  // namespace ptim
