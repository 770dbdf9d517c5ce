#pragma once

#include <cstdint>

#include "ptim/network.hpp"

namespace ptim {

// Traffic conditions around an incident. Capacities and flow in vehicles per
// hour, times in hours, r_var in hours squared.
struct TrafficParams {
  double s = 0.0;        // freeway capacity, also the discharge rate afterwards
  double s1_mean = 0.0;  // mean reduced capacity during the incident
  double s1_sd = 0.0;    // standard deviation of the reduced capacity
  double q = 0.0;        // arrival flow rate
  double r_var = 0.0;    // variance of the incident duration
  double clearance = 0.0;

  // Throws InputError for negative spreads or non-positive rates.
  void validate() const;
};

struct Incident {
  int id = 0;
  CellId location;
  int severity = 1;          // 1 (low impact) .. 4
  double report_time = 0.0;  // simulation hours
  TrafficParams params;
  int hazard = 3;    // hazard index of the route to the incident, 1..5
  int sparsity = 3;  // sensor sparsity at the incident cell, 1..5
  bool cleared = false;
};

struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
};

// One row of the severity table: each traffic parameter is drawn uniformly
// from its range.
struct SeverityRow {
  ParamRange s;
  ParamRange s1_mean;
  ParamRange s1_sd;
  ParamRange q;
  ParamRange r_var;
  ParamRange clearance;
};

inline constexpr int kMinSeverity = 1;
inline constexpr int kMaxSeverity = 4;

const SeverityRow& severity_row(int severity);

// Parameters used for incidents that are only anticipated (look-ahead terms):
// the midpoint of every range, averaged over the four equally likely
// severities.
TrafficParams nominal_params();

Incident sample_incident(int severity, CellId location, double report_time, std::uint64_t seed,
                         int id = 0);

// Expected total delay (vehicle-hours) of the stochastic queueing model for
// an incident lasting mean_duration hours on average. Clamped at zero.
// Throws ModelDomainError when s <= q.
double stochastic_delay(const TrafficParams& p, double mean_duration);

// Variance of the total delay ((vehicle-hours)^2), clamped at zero.
// Throws ModelDomainError when q <= 0.
double stochastic_delay_variance(const TrafficParams& p, double mean_duration);

// Incident duration is response time plus clearance time.
double expected_delay(const TrafficParams& p, double response_time);
double delay_variance(const TrafficParams& p, double response_time);

// Number of delay/variance evaluations clamped at zero since process start
// (or the last reset). Thread-safe.
std::uint64_t clamped_evaluations();
void reset_clamped_evaluations();

}  // namespace ptim
