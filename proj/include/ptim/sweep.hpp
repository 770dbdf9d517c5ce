#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ptim/report.hpp"
#include "ptim/scenario.hpp"
#include "ptim/stats.hpp"

namespace ptim {

// Sets one scenario parameter by axis name: iterations, threshold,
// algorithm, ervs, uavs, incidents (single stage-0 batch), cooperation,
// lookahead, kappa, gap. Throws InputError on unknown names or bad values.
void apply_axis(Scenario& sc, const std::string& name, const std::string& value);

struct SweepPoint {
  std::vector<std::pair<std::string, std::string>> coords;
  Policy policy = Policy::Proactive;
  int trials = 0;
  Summary delay;
  Summary response_min;
  Summary uav_utility;
  Summary messages;
};

// Worker count from PTIM_WORKERS, else the hardware concurrency.
int default_workers();

// Runs `fn(i)` for i in [0, n) on up to `workers` threads. Exceptions are
// rethrown on the calling thread (the one from the lowest index wins).
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// Cartesian product of the axes; trial t of every point uses the same
// derived scenario seed, so points are paired.
std::vector<SweepPoint> run_sweep(const Scenario& base, std::span<const SweepAxis> axes,
                                  std::span<const Policy> policies, int trials, int workers);

void write_sweep_csv(std::ostream& out, std::span<const SweepAxis> axes,
                     std::span<const SweepPoint> points);

// Runs a manifest and writes its outputs to out_dir; the manifest is written
// back verbatim so a replay reproduces every file byte for byte. Returns a
// short human-readable summary.
std::string execute_manifest(const RunManifest& m, const std::string& out_dir, int workers);

}  // namespace ptim
