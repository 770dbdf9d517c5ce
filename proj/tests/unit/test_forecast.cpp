#include <doctest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "ptim/errors.hpp"
#include "ptim/forecast.hpp"

using namespace ptim;

namespace {

struct Random5 {
  PrimaryProbField field{5, 6};
  DependencyKernel kernel{5};
};

Random5 random5(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> p(0.0, 0.3), d(0.0, 0.8), coin(0.0, 1.0);
  Random5 r;
  for (int u = 0; u < 6; ++u) {
    for (int c = 0; c < 5; ++c) r.field.set(CellId(c), u, p(rng));
  }
  for (int lag = 1; lag <= 2; ++lag) {
    for (int j = 0; j < 5; ++j) {
      for (int k = 0; k < 5; ++k) {
        if (coin(rng) < 0.5) r.kernel.set({CellId(j), CellId(k), lag, d(rng)});
      }
    }
  }
  return r;
}

}  // namespace

TEST_CASE("zero kernel returns the primary probability exactly") {
  const auto r = random5(1);
  const DependencyKernel none(5);
  for (int u = 0; u < 6; ++u) {
    for (int c = 0; c < 5; ++c) CHECK(expected_probability(r.field, none, CellId(c), u) == r.field.at(CellId(c), u));
  }
}

TEST_CASE("single lag-1 neighbour") {
  PrimaryProbField f(2, 3);
  f.set(CellId(0), 2, 0.1);
  f.set(CellId(1), 1, 0.2);
  DependencyKernel k(2);
  k.set({CellId(1), CellId(0), 1, 0.5});
  CHECK(expected_probability(f, k, CellId(0), 2) == doctest::Approx(0.2));
  // history before stage 0 reads as zero
  CHECK(expected_probability(f, k, CellId(0), 0) == 0.0);
}

TEST_CASE("matches a literal loop on random 5-cell instances") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = random5(seed);
    for (int u = 0; u < 6; ++u) {
      for (int c = 0; c < 5; ++c) {
        const double got = expected_probability(r.field, r.kernel, CellId(c), u);
        CHECK(got == doctest::Approx(oracle::expected_probability_loop(r.field, r.kernel, CellId(c), u)).epsilon(1e-14));
        CHECK(got >= 0.0);
        CHECK(got <= 1.0);
      }
    }
  }
}

TEST_CASE("clamps at one") {
  PrimaryProbField f(2, 3);
  f.set(CellId(0), 2, 0.9);
  f.set(CellId(1), 1, 1.0);
  DependencyKernel k(2);
  k.set({CellId(1), CellId(0), 1, 0.5});
  CHECK(expected_probability(f, k, CellId(0), 2) == 1.0);
}

TEST_CASE("raising a kernel entry never lowers a probability") {
  auto r = random5(77);
  std::vector<double> before;
  for (int u = 0; u < 6; ++u) {
    for (int c = 0; c < 5; ++c) before.push_back(expected_probability(r.field, r.kernel, CellId(c), u));
  }
  r.kernel.set({CellId(2), CellId(3), 1, r.kernel.value(CellId(2), CellId(3), 1) + 0.4});
  std::size_t i = 0;
  for (int u = 0; u < 6; ++u) {
    for (int c = 0; c < 5; ++c) CHECK(expected_probability(r.field, r.kernel, CellId(c), u) >= before[i++]);
  }
}

TEST_CASE("generated fields: reproducible, in range, budget respected") {
  const GridNetwork net = build_grid(10, 10, {0.1, 1.5}, 1);
  const auto a = generate_field(net, 5, 3);
  const auto b = generate_field(net, 5, 3);
  for (int u = 0; u < 5; ++u) {
    for (int c = 0; c < 100; ++c) {
      CHECK(a.at(CellId(c), u) == b.at(CellId(c), u));
      CHECK(a.at(CellId(c), u) >= 0.0);
      CHECK(a.at(CellId(c), u) <= 0.15);
    }
  }
  const auto zero = generate_field(net, 3, 3, {0.0, 0.0});
  for (int c = 0; c < 100; ++c) CHECK(zero.at(CellId(c), 1) == 0.0);

  FieldConfig cfg;
  cfg.normalize = true;
  cfg.budget = 1.0;
  const auto n = generate_field(net, 4, 9, cfg);
  for (int u = 0; u < 4; ++u) {
    double sum = 0.0;
    for (int c = 0; c < 100; ++c) sum += n.at(CellId(c), u);
    CHECK(sum <= 1.0 + 1e-12);
  }
  CHECK_THROWS_AS(generate_field(net, 2, 1), InputError);
  CHECK_THROWS_AS(generate_field(net, 3, 1, {0.2, 0.1}), InputError);
}

TEST_CASE("default kernel couples 4-neighbours") {
  const GridNetwork net = build_grid(3, 3, {0.1, 1.5}, 1);
  const auto k = DependencyKernel::four_neighborhood(net);
  CHECK(k.value(CellId(4), CellId(1), 1) == doctest::Approx(0.3));
  CHECK(k.value(CellId(4), CellId(1), 2) == doctest::Approx(0.1));
  CHECK(k.value(CellId(0), CellId(8), 1) == 0.0);
  CHECK(k.sources(CellId(4), 1).size() == 4);
  CHECK(k.sources(CellId(0), 1).size() == 2);
}

TEST_CASE("forecast json round trip and distribution") {
  const auto r = random5(5);
  const Forecast f(r.field, r.kernel);
  const Forecast g = Forecast::from_json(f.to_json());
  for (int u = 0; u < 6; ++u) {
    const auto& d = f.distribution(u);
    CHECK(std::accumulate(d.begin(), d.end(), 0.0) == doctest::Approx(1.0));
    for (int c = 0; c < 5; ++c) CHECK(g.probability(CellId(c), u) == f.probability(CellId(c), u));
  }
  CHECK(f.probability(CellId(0), 99) == 0.0);
  CHECK_THROWS_AS(Forecast::from_json(nlohmann::json{{"cells", 2}, {"stages", 1}, {"pr_p", {{0.1}}}}), InputError);
  CHECK_THROWS_AS(Forecast::from_json(nlohmann::json{{"cells", 1}, {"stages", 1}, {"pr_p", {{1.5}}}}), InputError);
}

TEST_CASE("invalid kernel entries") {
  DependencyKernel k(3);
  CHECK_THROWS_AS(k.set({CellId(0), CellId(1), 3, 0.1}), InputError);
  CHECK_THROWS_AS(k.set({CellId(0), CellId(5), 1, 0.1}), InputError);
  CHECK_THROWS_AS(k.set({CellId(0), CellId(1), 1, -0.1}), InputError);
}
