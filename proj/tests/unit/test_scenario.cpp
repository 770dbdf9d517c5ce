#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "oracles.hpp"
#include "ptim/errors.hpp"
#include "ptim/report.hpp"
#include "ptim/scenario.hpp"

using namespace ptim;

namespace {

Scenario small(std::uint64_t seed, int ervs, std::vector<ScheduleStage> schedule) {
  Scenario sc;
  sc.seed = seed;
  sc.rows = 6;
  sc.cols = 6;
  sc.ervs = ervs;
  sc.schedule = std::move(schedule);
  sc.solver.iterations = 20;
  return sc;
}

double sum_delays(const RunResult& r) {
  double s = 0.0;
  for (const auto& o : r.incidents) s += o.delay;
  return s;
}

}  // namespace

TEST_CASE("no incidents: zero delay, relocations only") {
  Scenario sc = small(3, 3, {});
  sc.schedule = {{0, 0}, {4, 0}};
  const RunResult r = run_policy(sc, Policy::Proactive);
  CHECK(r.total_delay == 0.0);
  CHECK(r.incidents.empty());
  for (const auto& st : r.stages) {
    for (const auto& d : st.erv) CHECK(d.kind == AssignmentKind::Relocate);
  }
}

TEST_CASE("one incident, one ERV: every policy dispatches the same way") {
  Scenario sc = small(11, 1, {});
  sc.incidents.push_back({1, 3, CellId(20), 0.0, std::nullopt, 2, 2});
  const RunResult conv = run_policy(sc, Policy::Conventional);
  const RunResult pro = run_policy(sc, Policy::Proactive);
  const RunResult opt = run_policy(sc, Policy::Opt);
  REQUIRE(conv.incidents.size() == 1);
  CHECK(conv.total_delay > 0.0);
  CHECK(pro.total_delay == doctest::Approx(conv.total_delay).epsilon(1e-12));
  CHECK(opt.total_delay == doctest::Approx(conv.total_delay).epsilon(1e-12));
}

TEST_CASE("busy ERVs are absent from later epochs until they free up") {
  Scenario sc = small(5, 2, {});
  sc.rows = sc.cols = 3;
  sc.edge_time = {0.5, 0.5};
  TrafficParams p{1800, 1100, 200, 1500, 0.04, 0.5};
  sc.incidents.push_back({1, 3, CellId(2), 0.0, p, 1, 1});
  sc.incidents.push_back({2, 3, CellId(6), 1.0, p, 1, 1});
  World world = materialize(sc);
  world.erv_start = {CellId(0), CellId(8)};
  const RunResult r = run_policy(sc, world, Policy::Proactive);

  int first_erv = -1;
  for (const auto& st : r.stages) {
    for (const auto& d : st.erv) {
      if (d.incident_id == 1) {
        first_erv = d.erv_id;
        CHECK(d.completion_h == doctest::Approx(1.5));
      }
    }
  }
  REQUIRE(first_erv != -1);
  bool saw_report_epoch = false;
  for (const auto& st : r.stages) {
    if (std::abs(st.time - 1.0) < 1e-9) {
      saw_report_epoch = true;
      CHECK(std::find(st.free_ervs.begin(), st.free_ervs.end(), first_erv) == st.free_ervs.end());
    }
  }
  CHECK(saw_report_epoch);
}

TEST_CASE("no ERV is offered while still busy (random scenarios)") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Scenario sc = small(100 + seed, 3, oracle::staged_sequence(seed));
    const RunResult r = run_policy(sc, Policy::Proactive);
    std::vector<std::pair<int, double>> busy;  // erv, until
    for (const auto& st : r.stages) {
      for (auto [id, until] : busy) {
        if (until > st.time + 1e-9) {
          CHECK(std::find(st.free_ervs.begin(), st.free_ervs.end(), id) == st.free_ervs.end());
        }
      }
      for (const auto& d : st.erv) busy.emplace_back(d.erv_id, d.completion_h);
    }
  }
}

TEST_CASE("totals are the sum of per-incident delays at realised responses") {
  Scenario sc = small(21, 3, oracle::staged_sequence(4));
  sc.uavs = 2;
  const World world = materialize(sc);
  for (Policy pol : {Policy::Conventional, Policy::Proactive, Policy::Opt}) {
    const RunResult r = run_policy(sc, world, pol);
    CHECK(r.total_delay == doctest::Approx(sum_delays(r)));
    CHECK(r.incidents.size() == world.incidents.size());
    for (const auto& o : r.incidents) {
      const auto it = std::find_if(world.incidents.begin(), world.incidents.end(),
                                   [&](const Incident& i) { return i.id == o.id; });
      REQUIRE(it != world.incidents.end());
      CHECK(o.delay == doctest::Approx(expected_delay(it->params, o.response_h)).epsilon(1e-12));
      CHECK(o.dispatch_time >= o.report_time - 1e-9);
      CHECK(o.erv_id >= 0);
    }
  }
}

TEST_CASE("OPT is never worse than the online policies") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Scenario sc = small(300 + seed, 3, oracle::staged_sequence(seed + 50));
    const World world = materialize(sc);
    const double opt = run_policy(sc, world, Policy::Opt).total_delay;
    CHECK(opt <= run_policy(sc, world, Policy::Proactive).total_delay + 1e-6);
    CHECK(opt <= run_policy(sc, world, Policy::Conventional).total_delay + 1e-6);
  }
}

TEST_CASE("cooperation never adds delay") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Scenario sc = small(500 + seed, 3, {{0, 3}, {1, 2}, {2, 3}});
    sc.uavs = 3;
    sc.uav.hours_per_benefit_unit = 1.0;  // cheap flights so UAVs do deploy
    Scenario off = sc;
    off.cooperation = false;
    const RunResult on_r = run_policy(sc, Policy::Proactive);
    CHECK(on_r.total_delay <= run_policy(off, Policy::Proactive).total_delay + 1e-9);
  }
}

TEST_CASE("identical scenarios give identical results") {
  Scenario sc = small(77, 3, {{0, 2}, {1, 3}, {3, 1}});
  sc.uavs = 2;
  for (Policy pol : {Policy::Conventional, Policy::Proactive, Policy::Opt}) {
    CHECK(to_json(run_policy(sc, pol)).dump() == to_json(run_policy(sc, pol)).dump());
  }
}

TEST_CASE("scenario json is strict and round-trips") {
  Scenario sc = small(9, 4, {{0, 2}, {2, 1}});
  sc.incidents.push_back({50, 2, CellId(3), 0.25, std::nullopt, 4, std::nullopt});
  sc.uavs = 1;
  const auto j = sc.to_json();
  CHECK(Scenario::from_json(j).to_json() == j);

  auto extra = j;
  extra["colour"] = "red";
  CHECK_THROWS_AS(Scenario::from_json(extra), InputError);
  auto nested = j;
  nested["fleet"]["boats"] = 2;
  CHECK_THROWS_AS(Scenario::from_json(nested), InputError);
  auto wrong = j;
  wrong["seed"] = "seven";
  CHECK_THROWS_AS(Scenario::from_json(wrong), InputError);
  auto bad_alg = j;
  bad_alg["solver"]["algorithm"] = "adopt";
  CHECK_THROWS_AS(Scenario::from_json(bad_alg), InputError);

  Scenario neg = sc;
  neg.ervs = 0;
  CHECK_THROWS_AS(neg.validate(), InputError);
  Scenario outside = sc;
  outside.incidents[0].cell = CellId(99);
  CHECK_THROWS_AS(outside.validate(), InputError);
}

TEST_CASE("incident stream and helpers") {
  std::istringstream in(
      "{\"id\": 1, \"severity\": 2, \"cell\": 4, \"report_time_h\": 0.5}\n"
      "\n"
      "{\"id\": 2, \"severity\": 4, \"cell\": 7, \"report_time_h\": 1.0, \"hazard\": 5}\n");
  const auto specs = parse_incident_stream(in);
  REQUIRE(specs.size() == 2);
  CHECK(specs[1].hazard == 5);
  CHECK(specs[0].cell == CellId(4));
  std::istringstream broken("{\"id\": 1, \"severity\": 2\n");
  CHECK_THROWS_AS(parse_incident_stream(broken), InputError);

  CHECK(stage_of(0.0, 0.5) == 0);
  CHECK(stage_of(1.0, 0.5) == 2);
  CHECK(stage_of(1.49, 0.5) == 2);
  CHECK(parse_policy("P-DRONETIM") == Policy::Proactive);
  CHECK(parse_policy("greedy") == Policy::Conventional);
  CHECK(parse_policy("clairvoyant") == Policy::Opt);
  CHECK_THROWS_AS(parse_policy("random"), InputError);
}

TEST_CASE("OPT refuses instances above its cap") {
  Scenario sc = small(1, 3, {{0, 5}, {1, 5}});
  sc.opt_cap = 10;
  CHECK_THROWS_AS(run_policy(sc, Policy::Opt), CapExceededError);
}

TEST_CASE("materialized worlds are reproducible") {
  const Scenario sc = small(42, 3, {{0, 2}, {1, 2}});
  const World a = materialize(sc);
  const World b = materialize(sc);
  CHECK(a.net.to_json() == b.net.to_json());
  CHECK(a.erv_start == b.erv_start);
  REQUIRE(a.incidents.size() == 4);
  for (std::size_t i = 0; i < a.incidents.size(); ++i) {
    CHECK(a.incidents[i].location == b.incidents[i].location);
    CHECK(a.incidents[i].params.s == b.incidents[i].params.s);
    CHECK(a.incidents[i].report_time == doctest::Approx(0.5 * (i / 2)));
  }
}
