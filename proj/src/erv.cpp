#include "ptim/erv.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <unordered_map>

#include "ptim/errors.hpp"

namespace ptim {

namespace {

constexpr double kEps = 1e-9;

void check_context(const StageContext& ctx) {
  if (ctx.net == nullptr) throw InputError("stage context has no network");
  if (ctx.config.lookahead < 0) throw InputError("look-ahead horizon must be non-negative");
  if (ctx.config.lookahead > 0 && !(ctx.config.stage_length_h > 0.0)) {
    throw InputError("stage length must be positive");
  }
}

double next_stage_probability(const StageContext& ctx, CellId cell) {
  return ctx.forecast ? ctx.forecast->probability(cell, ctx.stage + 1) : 0.0;
}

// Evaluates the future-stage part of the planning objective for one stage
// context. Coverage values for idle ERVs are cached per (stage, cell).
class Planner {
 public:
  explicit Planner(const StageContext& ctx)
      : ctx_(ctx), horizon_(ctx.config.lookahead), cells_(ctx.net->cell_count()) {
    idle_coverage_.assign(static_cast<std::size_t>(horizon_ + 1) * cells_, std::nan(""));
  }

  int horizon() const { return horizon_; }

  double stage_time(int t) const { return ctx_.time + t * ctx_.config.stage_length_h; }

  // Expected delay of an anticipated stage-t incident served from `pos`
  // after waiting `wait` hours for the ERV to become free.
  double coverage(int t, CellId pos, double wait) {
    if (ctx_.forecast == nullptr) return 0.0;
    const bool cacheable = wait <= 0.0;
    double* slot = cacheable ? &idle_coverage_[static_cast<std::size_t>(t) * cells_ + pos.value] : nullptr;
    if (slot && !std::isnan(*slot)) return *slot;
    const auto& dist = ctx_.forecast->distribution(ctx_.stage + t);
    const auto times = ctx_.net->times_from(pos);
    double sum = 0.0;
    for (int j = 0; j < cells_; ++j) {
      if (dist[j] > 0.0) {
        sum += dist[j] * expected_delay(ctx_.config.anticipated, std::max(0.0, wait) + times[j]);
      }
    }
    if (slot) *slot = sum;
    return sum;
  }

  const std::vector<CellId>& chain_candidates(int t, CellId pos) {
    const long key = static_cast<long>(t) * cells_ + pos.value;
    auto it = candidates_.find(key);
    if (it != candidates_.end()) return it->second;
    std::vector<CellId> out;
    const auto times = ctx_.net->times_from(pos);
    for (int c = 0; c < cells_; ++c) {
      if (times[c] <= ctx_.config.relocation_radius_h + kEps) out.emplace_back(c);
    }
    auto prob = [&](CellId c) {
      return ctx_.forecast ? ctx_.forecast->probability(c, ctx_.stage + t) : 0.0;
    };
    std::stable_sort(out.begin(), out.end(),
                     [&](CellId a, CellId b) { return prob(a) > prob(b); });
    const auto k = static_cast<std::size_t>(std::max(0, ctx_.config.relocation_candidates));
    if (out.size() > k) out.resize(k);
    return candidates_.emplace(key, std::move(out)).first->second;
  }

  // Cheapest continuation from stage t onwards for an ERV at `pos` that is
  // free from `avail`.
  double future_min(CellId pos, double avail, int t) {
    if (t > horizon_) return 0.0;
    const double start = stage_time(t - 1);
    const double window_end = stage_time(t);
    double best = coverage(t, pos, avail - window_end) + future_min(pos, avail, t + 1);
    for (CellId y : chain_candidates(t, pos)) {
      if (y == pos) continue;
      const double arrive = std::max(avail, start) + ctx_.net->travel_time(pos, y);
      if (arrive > window_end + kEps) continue;
      best = std::min(best, coverage(t, y, 0.0) + future_min(y, arrive, t + 1));
    }
    return best;
  }

  struct AfterFirst {
    CellId pos;
    double avail = 0.0;
  };

  AfterFirst after_first(const ErvState& erv, CellId d0) const {
    const double travel = ctx_.net->travel_time(erv.cell, d0);
    const Incident* inc = incident_at(ctx_, erv, d0);
    const double avail = ctx_.time + travel + (inc ? inc->params.clearance : 0.0);
    return {d0, avail};
  }

  double future_after(const ErvState& erv, CellId d0) {
    if (horizon_ == 0) return 0.0;
    const AfterFirst s = after_first(erv, d0);
    return future_min(s.pos, s.avail, 1);
  }

 private:
  const StageContext& ctx_;
  int horizon_;
  int cells_;
  std::vector<double> idle_coverage_;
  std::unordered_map<long, std::vector<CellId>> candidates_;
};

void require_free(const StageContext& ctx, const ErvState& erv) {
  if (!erv.free_at(ctx.time)) {
    throw ModelDomainError("ERV " + std::to_string(erv.id) + " is busy at the stage time");
  }
}

}  // namespace

const char* to_string(AssignmentKind kind) {
  return kind == AssignmentKind::Dispatch ? "dispatch" : "relocate";
}

std::vector<std::size_t> free_ervs(std::span<const ErvState> fleet, double time) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    if (fleet[i].free_at(time)) out.push_back(i);
  }
  return out;
}

double response_time(const StageContext& ctx, const ErvState& erv, const Incident& incident) {
  const double waited = std::max(0.0, ctx.time - incident.report_time);
  return waited + ctx.net->travel_time(erv.cell, incident.location);
}

const Incident* incident_at(const StageContext& ctx, const ErvState& erv, CellId cell) {
  const Incident* best = nullptr;
  double best_delay = -1.0;
  for (const Incident& inc : ctx.open) {
    if (inc.location != cell) continue;
    const double d = expected_delay(inc.params, response_time(ctx, erv, inc));
    if (d > best_delay) {
      best = &inc;
      best_delay = d;
    }
  }
  return best;
}

double unary_cost(const StageContext& ctx, const ErvState& erv, CellId cell) {
  check_context(ctx);
  require_free(ctx, erv);
  if (!ctx.net->contains(cell)) throw InputError("invalid cell id " + std::to_string(cell.value));
  if (const Incident* inc = incident_at(ctx, erv, cell)) {
    return ctx.weights.w_d * expected_delay(inc->params, response_time(ctx, erv, *inc));
  }
  return ctx.weights.w_r * (1.0 - next_stage_probability(ctx, cell));
}

std::vector<CellId> relocation_candidates(const StageContext& ctx, const ErvState& erv,
                                          std::size_t minimum) {
  check_context(ctx);
  const GridNetwork& net = *ctx.net;
  auto hosts_incident = [&](CellId c) {
    return std::any_of(ctx.open.begin(), ctx.open.end(),
                       [c](const Incident& inc) { return inc.location == c; });
  };
  const auto times = net.times_from(erv.cell);
  std::vector<CellId> reachable;
  for (int c = 0; c < net.cell_count(); ++c) {
    const CellId cell(c);
    if (times[c] <= ctx.config.relocation_radius_h + kEps && !hosts_incident(cell)) {
      reachable.push_back(cell);
    }
  }
  std::stable_sort(reachable.begin(), reachable.end(), [&](CellId a, CellId b) {
    return next_stage_probability(ctx, a) > next_stage_probability(ctx, b);
  });
  const std::size_t k =
      std::max(static_cast<std::size_t>(std::max(0, ctx.config.relocation_candidates)), minimum);
  if (reachable.size() > k) reachable.resize(k);
  if (!hosts_incident(erv.cell) &&
      std::find(reachable.begin(), reachable.end(), erv.cell) == reachable.end()) {
    reachable.push_back(erv.cell);
  }

  const std::size_t floor =
      std::max(static_cast<std::size_t>(std::max(0, ctx.config.min_relocation_options)), minimum);
  if (reachable.size() < floor) {
    std::vector<CellId> by_distance;
    for (int c = 0; c < net.cell_count(); ++c) by_distance.emplace_back(c);
    std::stable_sort(by_distance.begin(), by_distance.end(),
                     [&](CellId a, CellId b) { return times[a.value] < times[b.value]; });
    for (CellId c : by_distance) {
      if (reachable.size() >= floor) break;
      if (hosts_incident(c)) continue;
      if (std::find(reachable.begin(), reachable.end(), c) == reachable.end()) reachable.push_back(c);
    }
  }
  std::sort(reachable.begin(), reachable.end());
  return reachable;
}

double lookahead_cost(const StageContext& ctx, const ErvState& erv, std::span<const CellId> plan) {
  check_context(ctx);
  const int h = ctx.config.lookahead;
  if (plan.size() != static_cast<std::size_t>(h) + 1) {
    throw InputError("plan must hold one cell per stage (" + std::to_string(h + 1) + ")");
  }
  for (CellId c : plan) {
    if (!ctx.net->contains(c)) throw InputError("plan references an invalid cell");
  }
  Planner planner(ctx);
  double cost = unary_cost(ctx, erv, plan[0]);
  auto [pos, avail] = planner.after_first(erv, plan[0]);
  for (int t = 1; t <= h; ++t) {
    const CellId next = plan[static_cast<std::size_t>(t)];
    if (next != pos) {
      const double arrive =
          std::max(avail, planner.stage_time(t - 1)) + ctx.net->travel_time(pos, next);
      if (arrive > planner.stage_time(t) + kEps) {
        throw ModelDomainError("plan cannot reach cell " + std::to_string(next.value) +
                               " within stage window " + std::to_string(t));
      }
      pos = next;
      avail = arrive;
    }
    cost += planner.coverage(t, pos, avail - planner.stage_time(t));
  }
  return cost;
}

double planning_cost(const StageContext& ctx, const ErvState& erv, CellId d0) {
  check_context(ctx);
  Planner planner(ctx);
  return unary_cost(ctx, erv, d0) + planner.future_after(erv, d0);
}

ErvStageProblem build_erv_problem(const StageContext& ctx, std::span<const ErvState> fleet) {
  check_context(ctx);
  const std::vector<std::size_t> free = free_ervs(fleet, ctx.time);
  if (free.empty()) throw ModelDomainError("no free ERVs at the stage time");

  std::vector<CellId> incident_cells;
  for (const Incident& inc : ctx.open) incident_cells.push_back(inc.location);
  std::sort(incident_cells.begin(), incident_cells.end());
  incident_cells.erase(std::unique(incident_cells.begin(), incident_cells.end()),
                       incident_cells.end());

  Planner planner(ctx);
  const std::size_t n = free.size();
  const int cells = ctx.net->cell_count();

  struct AgentCosts {
    std::vector<CellId> domain;
    std::vector<double> myopic;  // dispatch cost; relocation filled once w_r is known
    std::vector<double> future;
    std::vector<char> dispatch;
  };
  std::vector<AgentCosts> agents(n);
  double max_dispatch = 0.0;
  double max_future = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const ErvState& erv = fleet[free[i]];
    AgentCosts& ac = agents[i];
    ac.domain = incident_cells;
    for (CellId c : relocation_candidates(ctx, erv, n)) ac.domain.push_back(c);
    std::sort(ac.domain.begin(), ac.domain.end());
    for (CellId c : ac.domain) {
      const Incident* inc = incident_at(ctx, erv, c);
      const double f = planner.future_after(erv, c);
      const double m =
          inc ? ctx.weights.w_d * expected_delay(inc->params, response_time(ctx, erv, *inc)) : 0.0;
      ac.myopic.push_back(m);
      ac.future.push_back(f);
      ac.dispatch.push_back(inc != nullptr);
      if (inc) max_dispatch = std::max(max_dispatch, m + f);
      max_future = std::max(max_future, f);
    }
  }

  ErvStageProblem out;
  out.weights = ctx.weights;
  if (!(out.weights.w_r > 0.0)) {
    out.weights.w_r = ctx.config.w_r_factor * std::max({max_dispatch, max_future, ctx.weights.w_d});
  }

  auto tables = std::make_shared<std::vector<std::vector<double>>>(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& table = (*tables)[i];
    table.assign(static_cast<std::size_t>(cells), std::nan(""));
    const AgentCosts& ac = agents[i];
    for (std::size_t d = 0; d < ac.domain.size(); ++d) {
      const CellId c = ac.domain[d];
      const double current = ac.dispatch[d]
                                 ? ac.myopic[d]
                                 : out.weights.w_r * (1.0 - next_stage_probability(ctx, c));
      table[c.value] = current + ac.future[d];
    }
    out.problem.add_agent(fleet[free[i]].id, ac.domain);
    out.fleet_index.push_back(free[i]);
  }

  if (n == 1) {
    out.problem.add_unary(0, [tables](CellId x) { return (*tables)[0][x.value]; });
  } else {
    out.problem.connect_all([tables](std::size_t a, std::size_t b) -> BinaryCost {
      return [tables, a, b](CellId x, CellId y) {
        if (x == y) return kInfinity;
        return (*tables)[a][x.value] + (*tables)[b][y.value];
      };
    });
  }
  return out;
}

std::vector<DispatchRecord> apply_assignment(const StageContext& ctx, std::span<ErvState> fleet,
                                             const DcopProblem& problem, const Assignment& a) {
  check_context(ctx);
  if (a.values.size() != problem.size()) throw InputError("assignment does not match problem");
  std::vector<int> taken;
  std::vector<DispatchRecord> records;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    const int id = problem.agent_id(i);
    auto it = std::find_if(fleet.begin(), fleet.end(), [id](const ErvState& e) { return e.id == id; });
    if (it == fleet.end()) {
      throw InputError("assignment references unknown ERV " + std::to_string(id));
    }
    ErvState& erv = *it;
    require_free(ctx, erv);
    const CellId target = a.values[i];
    if (!ctx.net->contains(target)) throw InputError("assignment targets an invalid cell");

    // Pick the open incident at the target that nobody took this stage.
    const Incident* inc = nullptr;
    double best_delay = -1.0;
    for (const Incident& cand : ctx.open) {
      if (cand.location != target) continue;
      if (std::find(taken.begin(), taken.end(), cand.id) != taken.end()) continue;
      const double d = expected_delay(cand.params, response_time(ctx, erv, cand));
      if (d > best_delay) {
        inc = &cand;
        best_delay = d;
      }
    }

    DispatchRecord rec;
    rec.erv_id = erv.id;
    rec.from = erv.cell;
    rec.cell = target;
    rec.travel_h = ctx.net->travel_time(erv.cell, target);
    const double start = std::max(ctx.time, erv.available_at);
    if (inc) {
      taken.push_back(inc->id);
      rec.kind = AssignmentKind::Dispatch;
      rec.incident_id = inc->id;
      rec.response_h = response_time(ctx, erv, *inc);
      rec.completion_h = start + rec.travel_h + inc->params.clearance;
    } else {
      rec.kind = AssignmentKind::Relocate;
      rec.completion_h = start + rec.travel_h;
    }
    erv.available_at = std::max(erv.available_at, rec.completion_h);
    erv.cell = target;
    erv.log.push_back({ctx.stage, target, rec.kind});
    records.push_back(rec);
  }
  return records;
}

}  // namespace ptim
