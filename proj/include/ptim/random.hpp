#pragma once

#include <cstdint>
#include <random>

namespace ptim {

using Rng = std::mt19937_64;

// Derives an independent stream seed from a base seed and a tag, so that
// subsystems (network, incidents, solver rounds, observations) never share
// one generator and stay reproducible when another subsystem changes.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag, std::uint64_t sub);

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Uniform draw in [lo, hi]; returns lo when the interval is degenerate.
double uniform(Rng& rng, double lo, double hi);

int uniform_int(Rng& rng, int lo, int hi);

}  // namespace ptim
