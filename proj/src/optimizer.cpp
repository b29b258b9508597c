#include "twtsched/optimizer.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "twtsched/error.hpp"

namespace twt {
namespace {

// Slack on bound comparisons; pruning must never drop a co-optimal leaf to
// rounding in the bound's summation order.
constexpr double kPruneEps = 1e-9;
constexpr double kNoSolution = -std::numeric_limits<double>::infinity();

struct GridPoint {
  ScheduleTuple tuple;
  TwtSchedule schedule;
  std::size_t aa_idx = 0;
};

struct Candidate {
  std::size_t tuple_idx = 0;
  std::int64_t wt = 0;
  std::int64_t st = 0;
  double unimpaired = 0.0;
  double log_gain = 0.0;
};

/// One term of the airtime relaxation: log1p(rate * w) for w in [0, cap_us].
struct AirtimeTerm {
  double rate = 0.0;  // Mbps per won µs
  double cap_us = 0.0;
};

/// Upper bound on sum log1p(rate_i * w_i) subject to sum w_i <= capacity_us,
/// via the Lagrangian dual. Any multiplier gives a valid bound; bisection only
/// tightens it.
double airtime_bound(std::span<const AirtimeTerm> terms, double capacity_us) {
  double cap_total = 0.0;
  for (const auto& t : terms) cap_total += t.cap_us;
  auto term_gain = [](const AirtimeTerm& t, double w) { return std::log1p(t.rate * w); };
  if (cap_total <= capacity_us) {
    double v = 0.0;
    for (const auto& t : terms) v += term_gain(t, t.cap_us);
    return v;
  }
  auto usage = [&](double lambda) {
    double u = 0.0;
    for (const auto& t : terms) u += std::clamp(1.0 / lambda - 1.0 / t.rate, 0.0, t.cap_us);
    return u;
  };
  auto dual = [&](double lambda) {
    double v = lambda * capacity_us;
    for (const auto& t : terms) {
      const double w = std::clamp(1.0 / lambda - 1.0 / t.rate, 0.0, t.cap_us);
      v += term_gain(t, w) - lambda * w;
    }
    return v;
  };
  double lo = 1e-12, hi = 1.0;
  for (const auto& t : terms) hi = std::max(hi, t.rate);
  for (int it = 0; it < 40; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (usage(mid) > capacity_us) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::min(dual(lo), dual(hi));
}

struct TaskResult {
  double objective = kNoSolution;
  std::vector<std::size_t> tuple_idx;
  bool every_client_has_candidates = false;
};

/// Read-only data shared by every search partition.
struct SearchContext {
  const ProblemSpec* spec = nullptr;
  std::vector<ClientSpec> clients;  // scheduled, ascending id
  std::vector<GridPoint> grid;
  std::vector<std::vector<double>> unimpaired;  // [client][tuple]
  /// [client][tuple] true when the tuple may be searched for that client.
  std::vector<std::vector<bool>> allowed;
  std::optional<double> t_avg;
  /// precedence[d] = indices 0..d ordered by channel precedence.
  std::vector<std::vector<std::size_t>> precedence;
};

void atomic_max(std::atomic<double>& target, double value) {
  double cur = target.load(std::memory_order_relaxed);
  while (value > cur && !target.compare_exchange_weak(cur, value, std::memory_order_relaxed)) {
  }
}

class PcStSearch {
 public:
  PcStSearch(const SearchContext& ctx, std::int64_t pc_st, std::atomic<double>& incumbent)
      : ctx_(ctx), pc_st_(pc_st), incumbent_(incumbent) {}

  TaskResult run() {
    const std::size_t n = ctx_.clients.size();
    const auto& spec = *ctx_.spec;
    cands_.assign(n, {});
    for (std::size_t c = 0; c < n; ++c) {
      const auto& client = ctx_.clients[c];
      for (std::size_t t = 0; t < ctx_.grid.size(); ++t) {
        if (!ctx_.allowed[c][t]) continue;
        const auto& g = ctx_.grid[t];
        if (g.tuple.mf > spec.max_mf) continue;
        if (std::llabs(g.schedule.sleeptime_us - pc_st_) > spec.oth_us) continue;
        if (g.schedule.waketime_us > pc_st_) continue;
        const double tu = ctx_.unimpaired[c][t];
        // Overlap can only lower throughput, so these floors prune exactly.
        if (client.in_protected_set() && tu < *client.t_th_mbps) continue;
        if (client.in_downlink_set() && tu < client.t_csma_mbps) continue;
        cands_[c].push_back({t, g.schedule.waketime_us, g.schedule.sleeptime_us, tu, std::log1p(tu)});
      }
      if (cands_[c].empty()) return {};
    }

    // Per-µs rate ceiling of each client over its candidates. The offset of a
    // later client is at most PC_ST - WT, which bounds its wake time below.
    rate_cap_.assign(n, {});
    const auto horizon = ctx_.spec->horizon_us;
    for (std::size_t c = 0; c < n; ++c) {
      double rate = 0.0, tmax = 0.0;
      for (const auto& k : cands_[c]) {
        const std::int64_t off_max = pc_st_ - k.wt;
        const std::int64_t full = horizon - k.wt - off_max;
        const std::int64_t wake_lb = full >= 0 ? (full / (k.wt + k.st) + 1) * k.wt : 0;
        rate = wake_lb > 0 ? std::max(rate, k.unimpaired / static_cast<double>(wake_lb))
                           : std::numeric_limits<double>::infinity();
        tmax = std::max(tmax, k.unimpaired);
      }
      if (std::isinf(rate)) rate = 1e12;
      rate_cap_[c] = {rate, rate > 0.0 ? tmax / rate : 0.0};
    }

    suffix_gain_.assign(n + 1, 0.0);
    suffix_min_wt_.assign(n + 1, 0);
    for (std::size_t c = n; c-- > 0;) {
      double best_gain = 0.0;
      std::int64_t min_wt = INT64_MAX;
      for (const auto& k : cands_[c]) {
        best_gain = std::max(best_gain, k.log_gain);
        min_wt = std::min(min_wt, k.wt);
      }
      suffix_gain_[c] = suffix_gain_[c + 1] + best_gain;
      suffix_min_wt_[c] = suffix_min_wt_[c + 1] + min_wt;
    }
    if (suffix_min_wt_[0] > pc_st_) {
      TaskResult r;
      r.every_client_has_candidates = true;
      return r;
    }

    pick_.assign(n, 0);
    periodic_.assign(n, {});
    wake_.assign(n, 0);
    lost_.assign(n, 0);
    eff_.assign(n, 0.0);
    best_.every_client_has_candidates = true;
    descend(0, 0);
    return best_;
  }

 private:
  void descend(std::size_t depth, std::int64_t wt_sum) {
    const std::size_t n = ctx_.clients.size();
    const auto& order = ctx_.precedence[depth];
    for (std::size_t k = 0; k < cands_[depth].size(); ++k) {
      const Candidate& cand = cands_[depth][k];
      if (wt_sum + cand.wt + suffix_min_wt_[depth + 1] > pc_st_) continue;
      pick_[depth] = k;
      periodic_[depth] = {wt_sum, cand.wt, cand.wt + cand.st};

      detail::PeriodicClient ordered[64];
      for (std::size_t i = 0; i <= depth; ++i) ordered[i] = periodic_[order[i]];
      std::int64_t wake_sorted[64];
      std::int64_t lost_sorted[64];
      detail::periodic_losses({ordered, depth + 1}, ctx_.spec->horizon_us, HorizonPolicy::truncate,
                              {wake_sorted, depth + 1}, {lost_sorted, depth + 1});
      for (std::size_t i = 0; i <= depth; ++i) {
        wake_[order[i]] = wake_sorted[i];
        lost_[order[i]] = lost_sorted[i];
      }

      // Prefix offsets are final and losses only grow as clients are added,
      // so prefix throughputs are upper bounds and floor violations are final.
      bool viable = true;
      double gain = 0.0;
      for (std::size_t i = 0; i <= depth && viable; ++i) {
        if (wake_[i] <= 0) {
          viable = false;
          break;
        }
        const Candidate& ci = cands_[i][pick_[i]];
        eff_[i] = effective_from_counts(ci.unimpaired, lost_[i], wake_[i]);
        const auto& client = ctx_.clients[i];
        if (client.in_protected_set() && eff_[i] < *client.t_th_mbps) viable = false;
        if (client.in_downlink_set() && eff_[i] < client.t_csma_mbps) viable = false;
        gain += std::log1p(eff_[i]);
      }
      if (!viable) continue;

      const double known = std::max(best_.objective, incumbent_.load(std::memory_order_relaxed));
      if (gain + suffix_gain_[depth + 1] < known - kPruneEps) continue;
      if (depth + 1 < n) {
        // Won time never grows as clients join, and every client's won time
        // shares one horizon.
        AirtimeTerm terms[64];
        for (std::size_t i = 0; i <= depth; ++i) {
          const Candidate& ci = cands_[i][pick_[i]];
          terms[i] = {ci.unimpaired / static_cast<double>(wake_[i]), static_cast<double>(wake_[i] - lost_[i])};
        }
        for (std::size_t j = depth + 1; j < n; ++j) terms[j] = rate_cap_[j];
        const double bound = airtime_bound({terms, n}, static_cast<double>(ctx_.spec->horizon_us));
        if (bound < known - kPruneEps) continue;
      }

      if (depth + 1 < n) {
        descend(depth + 1, wt_sum + cand.wt);
        continue;
      }

      if (ctx_.t_avg) {
        for (std::size_t i = 0; i < n && viable; ++i) {
          if (ctx_.clients[i].in_uplink_set() && eff_[i] > *ctx_.t_avg) viable = false;
        }
        if (!viable) continue;
      }
      const double value = objective(std::span<const double>(eff_.data(), n));
      if (value > best_.objective) {
        best_.objective = value;
        best_.tuple_idx.resize(n);
        for (std::size_t i = 0; i < n; ++i) best_.tuple_idx[i] = cands_[i][pick_[i]].tuple_idx;
        atomic_max(incumbent_, value);
      }
    }
  }

  const SearchContext& ctx_;
  std::int64_t pc_st_;
  std::atomic<double>& incumbent_;
  std::vector<std::vector<Candidate>> cands_;
  std::vector<AirtimeTerm> rate_cap_;
  std::vector<double> suffix_gain_;
  std::vector<std::int64_t> suffix_min_wt_;
  std::vector<std::size_t> pick_;
  std::vector<detail::PeriodicClient> periodic_;
  std::vector<std::int64_t> wake_;
  std::vector<std::int64_t> lost_;
  std::vector<double> eff_;
  TaskResult best_;
};

SearchContext make_context(const ProblemSpec& spec) {
  spec.validate();
  SearchContext ctx;
  ctx.spec = &spec;
  ctx.clients = spec.scheduled_clients();
  ctx.t_avg = spec.vanilla_downlink_average();
  if (ctx.clients.size() > 64) throw ConfigError("at most 64 TWT-capable clients are supported");

  const auto& table = *spec.table;
  const auto tuples = grid_tuples(table);
  ctx.grid.reserve(tuples.size());
  for (std::size_t t = 0; t < tuples.size(); ++t) {
    try {
      ctx.grid.push_back({tuples[t], schedule_from_tuple(tuples[t]), t / table.mf_set().size()});
    } catch (const Error& e) {
      throw ConfigError(std::string("grid tuple cannot be quantized: ") + e.what());
    }
  }
  for (const auto& c : ctx.clients) {
    const auto mi = table.mcs_index(c.mcs);
    if (!mi) {
      throw ConfigError("throughput table has no rows for MCS " + std::to_string(c.mcs) + " (client " +
                        std::to_string(c.id) + ")");
    }
    std::vector<double> row(tuples.size());
    for (std::size_t t = 0; t < tuples.size(); ++t) {
      row[t] = table.at(*mi, t / table.mf_set().size(), t % table.mf_set().size());
    }
    ctx.unimpaired.push_back(std::move(row));
  }
  ctx.allowed.assign(ctx.clients.size(), std::vector<bool>(tuples.size(), true));

  for (std::size_t d = 0; d < ctx.clients.size(); ++d) {
    std::vector<std::size_t> order(d + 1);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return takes_precedence(ctx.clients[a].mcs, ctx.clients[a].id, ctx.clients[b].mcs, ctx.clients[b].id);
    });
    ctx.precedence.push_back(std::move(order));
  }
  return ctx;
}

std::vector<std::int64_t> pc_st_candidates(const SearchContext& ctx) {
  std::set<std::int64_t> sts;
  for (std::size_t t = 0; t < ctx.grid.size(); ++t) {
    if (ctx.grid[t].tuple.mf > ctx.spec->max_mf) continue;
    const bool used = std::any_of(ctx.allowed.begin(), ctx.allowed.end(),
                                  [t](const std::vector<bool>& a) { return a[t]; });
    if (used) sts.insert(ctx.grid[t].schedule.sleeptime_us);
  }
  return {sts.begin(), sts.end()};
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return std::max(1, omp_get_max_threads());
}

Solution materialize(const SearchContext& ctx, std::int64_t pc_st, const std::vector<std::size_t>& picks) {
  const auto& spec = *ctx.spec;
  std::map<ClientId, TwtSchedule> chosen;
  for (std::size_t i = 0; i < ctx.clients.size(); ++i) {
    chosen[ctx.clients[i].id] = ctx.grid[picks[i]].schedule;
  }
  const auto placed = assign_offsets(chosen);

  std::vector<TupleScheduledClient> scheduled;
  for (std::size_t i = 0; i < ctx.clients.size(); ++i) {
    const auto& c = ctx.clients[i];
    scheduled.push_back({c.id, c.mcs, ctx.grid[picks[i]].tuple, placed.at(c.id)});
  }
  const auto report = effective_throughputs(scheduled, *spec.table, spec.horizon_us);

  Solution sol;
  sol.feasible = true;
  sol.pc_st_us = pc_st;
  sol.oth_us = spec.oth_us;
  std::vector<double> eff;
  for (const auto& s : scheduled) {
    const auto& r = report.per_client.at(s.id);
    sol.per_client.push_back({s.id, s.mcs, s.tuple, s.schedule, r.unimpaired_mbps, r.effective_mbps, r.loss_mbps});
    eff.push_back(r.effective_mbps);
  }
  sol.objective = objective(eff);
  return sol;
}

/// Best objective over assignments that give every client the same tuple.
/// Only used as a pruning floor, so it sits a little below the exact value.
double homogeneous_floor(const SearchContext& ctx, std::span<const std::int64_t> pc_sts) {
  const auto& spec = *ctx.spec;
  const auto n = static_cast<std::int64_t>(ctx.clients.size());
  double best = kNoSolution;
  for (std::size_t t = 0; t < ctx.grid.size(); ++t) {
    const auto& g = ctx.grid[t];
    if (g.tuple.mf > spec.max_mf) continue;
    if (!std::all_of(ctx.allowed.begin(), ctx.allowed.end(), [t](const std::vector<bool>& a) { return a[t]; })) {
      continue;
    }
    const auto pc = std::find_if(pc_sts.begin(), pc_sts.end(), [&](std::int64_t p) {
      return p >= n * g.schedule.waketime_us && std::llabs(g.schedule.sleeptime_us - p) <= spec.oth_us;
    });
    if (pc == pc_sts.end()) continue;
    const Solution sol = materialize(ctx, *pc, std::vector<std::size_t>(ctx.clients.size(), t));
    if (sol.objective > best && check_constraints(sol, spec).empty()) best = sol.objective;
  }
  return best == kNoSolution ? best : best - 1e-7;
}

/// `floor` must not exceed the objective of some assignment the context allows.
Solution search(const SearchContext& ctx, const SolveOptions& options, double floor = kNoSolution) {
  const auto pc_sts = pc_st_candidates(ctx);
  std::vector<TaskResult> results(pc_sts.size());
  std::atomic<double> incumbent{std::max(floor, homogeneous_floor(ctx, pc_sts))};
  const int threads = resolve_threads(options.threads);
  const auto task_count = static_cast<std::int64_t>(pc_sts.size());

  if (threads == 1) {
    for (std::int64_t i = 0; i < task_count; ++i) {
      results[i] = PcStSearch(ctx, pc_sts[i], incumbent).run();
    }
  } else {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::int64_t i = 0; i < task_count; ++i) {
      try {
        results[i] = PcStSearch(ctx, pc_sts[i], incumbent).run();
      } catch (...) {
#pragma omp critical(twtsched_solve_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  // Ascending PC_ST with strict improvement keeps the lexicographic tie-break.
  std::size_t best = results.size();
  std::size_t anchored = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].every_client_has_candidates) ++anchored;
    if (results[i].objective == kNoSolution) continue;
    if (best == results.size() || results[i].objective > results[best].objective) best = i;
  }
  if (best == results.size()) {
    Solution sol;
    sol.feasible = false;
    sol.oth_us = ctx.spec->oth_us;
    sol.objective = kNoSolution;
    std::ostringstream why;
    if (anchored == 0) {
      why << "no PC_ST candidate admits a tuple for every client within OTh = " << ctx.spec->oth_us
          << " us that also meets the unimpaired throughput floors";
    } else {
      why << "none of the " << anchored << " viable PC_ST candidates (of " << pc_sts.size()
          << ") yields an assignment meeting the round-robin and throughput constraints";
    }
    sol.infeasibility_reason = why.str();
    return sol;
  }
  return materialize(ctx, pc_sts[best], results[best].tuple_idx);
}

}  // namespace

void ProblemSpec::validate() const {
  if (clients.empty()) throw ConfigError("problem has no clients");
  std::set<ClientId> ids;
  bool any_twt = false;
  for (const auto& c : clients) {
    if (!ids.insert(c.id).second) throw ConfigError("duplicate client id " + std::to_string(c.id));
    if (c.mcs < kMinMcs || c.mcs > kMaxMcs) {
      throw ConfigError("client " + std::to_string(c.id) + " has MCS outside 0-11");
    }
    if (c.t_th_mbps && !(*c.t_th_mbps > 0.0)) {
      throw ConfigError("protected client " + std::to_string(c.id) + " needs a positive threshold");
    }
    if (!(c.t_csma_mbps >= 0.0)) throw ConfigError("client " + std::to_string(c.id) + " has negative T_CSMA");
    any_twt = any_twt || c.twt_capable;
  }
  if (!any_twt) throw ConfigError("problem has no TWT-capable client");
  if (!(max_mf >= kMinMf && max_mf <= kMaxMf)) throw ConfigError("max MF must lie in [1, 255]");
  if (oth_us < 0) throw ConfigError("OTh must be non-negative");
  if (!table || table->empty()) throw ConfigError("problem has no throughput table");
  if (horizon_us <= 0) throw ConfigError("horizon must be positive");
}

std::vector<ClientSpec> ProblemSpec::scheduled_clients() const {
  std::vector<ClientSpec> out;
  for (const auto& c : clients) {
    if (c.twt_capable) out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const ClientSpec& a, const ClientSpec& b) { return a.id < b.id; });
  return out;
}

std::optional<double> ProblemSpec::vanilla_downlink_average() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : clients) {
    if (!c.twt_capable && c.direction == Direction::downlink) {
      sum += c.t_csma_mbps;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

const ClientAssignment* Solution::find(ClientId id) const {
  for (const auto& a : per_client) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

double objective(std::span<const double> t_effective_mbps) {
  double sum = 0.0;
  for (double t : t_effective_mbps) {
    if (!(t >= 0.0)) throw DomainError("objective needs non-negative throughputs");
    sum += std::log1p(t);
  }
  return sum;
}

std::string to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::min_throughput: return "min_throughput";
    case ConstraintKind::beat_csma: return "beat_csma";
    case ConstraintKind::uplink_cap: return "uplink_cap";
    case ConstraintKind::round_robin: return "round_robin";
    case ConstraintKind::overlap_threshold: return "overlap_threshold";
    case ConstraintKind::max_mf: return "max_mf";
    case ConstraintKind::schedule_invalid: return "schedule_invalid";
    case ConstraintKind::missing_client: return "missing_client";
    case ConstraintKind::unknown_client: return "unknown_client";
  }
  return "unknown";
}

std::vector<ConstraintViolation> check_constraints(const Solution& sol, const ProblemSpec& spec) {
  std::vector<ConstraintViolation> out;
  auto add = [&](ConstraintKind k, ClientId id, std::string detail) { out.push_back({k, id, std::move(detail)}); };
  const auto t_avg = spec.vanilla_downlink_average();

  std::map<ClientId, const ClientSpec*> by_id;
  for (const auto& c : spec.clients) by_id[c.id] = &c;

  std::int64_t wt_sum = 0;
  for (const auto& a : sol.per_client) {
    const auto it = by_id.find(a.id);
    if (it == by_id.end() || !it->second->twt_capable) {
      add(ConstraintKind::unknown_client, a.id, "assignment for a client that is not TWT-capable");
      continue;
    }
    const ClientSpec& c = *it->second;
    const double t = a.t_effective_mbps;
    if (c.in_protected_set() && t < *c.t_th_mbps) {
      add(ConstraintKind::min_throughput, a.id, "T below guaranteed threshold");
    }
    if (c.in_downlink_set() && t < c.t_csma_mbps) {
      add(ConstraintKind::beat_csma, a.id, "T below the CSMA/CA baseline");
    }
    if (c.in_uplink_set() && t_avg && t > *t_avg) {
      add(ConstraintKind::uplink_cap, a.id, "T above the vanilla downlink average");
    }
    if (std::llabs(sol.pc_st_us - a.schedule.sleeptime_us) > spec.oth_us) {
      add(ConstraintKind::overlap_threshold, a.id, "|PC_ST - ST| exceeds OTh");
    }
    if (a.tuple.mf > spec.max_mf) add(ConstraintKind::max_mf, a.id, "MF above the configured maximum");
    for (auto v : validate_schedule(a.schedule)) add(ConstraintKind::schedule_invalid, a.id, to_string(v));
    wt_sum += a.schedule.waketime_us;
  }
  for (const auto& c : spec.clients) {
    if (c.twt_capable && !sol.find(c.id)) {
      add(ConstraintKind::missing_client, c.id, "TWT-capable client has no schedule");
    }
  }
  if (sol.pc_st_us < wt_sum) add(ConstraintKind::round_robin, 0, "PC_ST shorter than the sum of waketimes");
  return out;
}

std::map<ClientId, TwtSchedule> assign_offsets(const std::map<ClientId, TwtSchedule>& chosen) {
  std::map<ClientId, TwtSchedule> out;
  std::int64_t offset = 0;
  for (const auto& [id, s] : chosen) {
    TwtSchedule placed = s;
    placed.offset_us = offset;
    offset += s.waketime_us;
    out.emplace(id, placed);
  }
  return out;
}

std::vector<ScheduleTuple> grid_tuples(const ThroughputTable& table) {
  std::vector<ScheduleTuple> out;
  out.reserve(table.tuples_per_mcs());
  for (double aa : table.aa_set()) {
    for (double mf : table.mf_set()) out.push_back({aa, mf});
  }
  return out;
}

Solution solve(const ProblemSpec& spec, const SolveOptions& options) {
  SearchContext ctx = make_context(spec);
  if (!options.coarse_to_fine || spec.table->aa_set().size() < 3) {
    return search(ctx, options);
  }

  // Coarse pass on every other AA value.
  const std::size_t mf_count = spec.table->mf_set().size();
  for (auto& row : ctx.allowed) {
    for (std::size_t t = 0; t < row.size(); ++t) row[t] = ctx.grid[t].aa_idx % 2 == 0;
  }
  const Solution coarse = search(ctx, options);
  if (!coarse.feasible) {
    for (auto& row : ctx.allowed) std::fill(row.begin(), row.end(), true);
    return search(ctx, options);
  }

  // Fine pass: one coarse AA step either side of each client's coarse choice.
  for (std::size_t c = 0; c < ctx.clients.size(); ++c) {
    const auto aa_idx = *spec.table->aa_index(coarse.per_client[c].tuple.aa_percent);
    for (std::size_t t = 0; t < ctx.grid.size(); ++t) {
      const std::size_t a = t / mf_count;
      ctx.allowed[c][t] = a + 2 >= aa_idx && a <= aa_idx + 2;
    }
  }
  // The coarse assignment is still allowed, so it bounds the fine pass from below.
  Solution fine = search(ctx, options, coarse.objective - 1e-7);
  if (!fine.feasible || fine.objective < coarse.objective) fine = coarse;
  fine.heuristic = true;
  return fine;
}

std::vector<SweepRow> oth_sweep(const ProblemSpec& spec, std::span<const std::int64_t> oth_values,
                                const SolveOptions& options) {
  if (oth_values.empty()) throw ConfigError("OTh sweep needs at least one value");
  if (!std::is_sorted(oth_values.begin(), oth_values.end())) {
    throw ConfigError("OTh sweep values must be ascending");
  }
  std::vector<SweepRow> rows;
  ProblemSpec at = spec;
  for (std::int64_t oth : oth_values) {
    at.oth_us = oth;
    SweepRow row;
    row.oth_us = oth;
    row.solution = solve(at, options);
    row.feasible = row.solution.feasible;
    row.objective = row.feasible ? row.solution.objective : kNoSolution;
    row.total_throughput_mbps = row.feasible ? system_throughput(row.solution, at) : 0.0;
    if (!rows.empty() && row.feasible && rows.back().feasible) {
      const auto& prev = rows.back().solution.per_client;
      const auto& cur = row.solution.per_client;
      row.plateau = std::equal(prev.begin(), prev.end(), cur.begin(), cur.end(),
                               [](const ClientAssignment& a, const ClientAssignment& b) {
                                 return a.id == b.id && a.tuple == b.tuple;
                               });
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double twt_throughput(const Solution& solution) {
  double sum = 0.0;
  for (const auto& a : solution.per_client) sum += a.t_effective_mbps;
  return sum;
}

double system_throughput(const Solution& solution, const ProblemSpec& spec) {
  double sum = twt_throughput(solution);
  for (const auto& c : spec.clients) {
    if (!c.twt_capable) sum += c.t_csma_mbps;
  }
  return sum;
}

}  // namespace twt
