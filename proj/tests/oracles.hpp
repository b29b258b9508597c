#pragma once

// Reference implementations used only by the tests. Each one is written the
// slow, obvious way so it can check the fast paths in the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <vector>

#include "twtsched/optimizer.hpp"
#include "twtsched/overlap.hpp"
#include "twtsched/schedule.hpp"
#include "twtsched/throughput_table.hpp"

namespace oracle {

struct MicrosecondCounts {
  std::int64_t wake = 0;
  std::int64_t won = 0;
};

struct ReplayResult {
  std::map<twt::ClientId, MicrosecondCounts> per_client;
  std::int64_t idle = 0;
  std::int64_t overlap = 0;  // µs with two or more awake clients
};

inline bool awake_at(const twt::TwtSchedule& s, std::int64_t t, std::int64_t horizon, twt::HorizonPolicy policy) {
  if (t < s.offset_us) return false;
  const std::int64_t k = (t - s.offset_us) / s.cycle_us();
  const std::int64_t start = s.offset_us + k * s.cycle_us();
  if (t - start >= s.waketime_us) return false;
  if (policy == twt::HorizonPolicy::drop && start + s.waketime_us > horizon) return false;
  return true;
}

/// Walks every µs of the horizon and hands it to the lowest (MCS, id) awake.
inline ReplayResult replay(const std::vector<twt::ScheduledClient>& clients, std::int64_t horizon = twt::kHorizonUs,
                           twt::HorizonPolicy policy = twt::HorizonPolicy::truncate) {
  ReplayResult r;
  for (const auto& c : clients) r.per_client[c.id];
  for (std::int64_t t = 0; t < horizon; ++t) {
    const twt::ScheduledClient* winner = nullptr;
    int awake = 0;
    for (const auto& c : clients) {
      if (!awake_at(c.schedule, t, horizon, policy)) continue;
      ++awake;
      ++r.per_client[c.id].wake;
      if (!winner || c.mcs < winner->mcs || (c.mcs == winner->mcs && c.id < winner->id)) winner = &c;
    }
    if (winner) {
      ++r.per_client[winner->id].won;
    } else {
      ++r.idle;
    }
    if (awake >= 2) ++r.overlap;
  }
  return r;
}

inline bool exactly_encodable_by_scan(std::int64_t st) {
  for (int e = 0; e <= 31; ++e) {
    const std::int64_t unit = std::int64_t{1} << e;
    if (st % unit == 0 && st / unit >= 1 && st / unit <= 65535) return true;
  }
  return false;
}

/// Random schedules with 256-multiple WTs and small MCS values so that MCS
/// ties and multi-way overlaps are common.
inline std::vector<twt::ScheduledClient> random_schedule_set(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<std::int64_t> wt_q(1, 255);
  std::uniform_int_distribution<std::int64_t> st(1, 250000);
  std::uniform_int_distribution<std::int64_t> off(0, 120000);
  std::uniform_int_distribution<int> mcs(0, 3);
  std::vector<twt::ScheduledClient> out;
  for (int i = 0; i < n; ++i) {
    twt::TwtSchedule s{wt_q(rng) * 256, st(rng), off(rng)};
    out.push_back({static_cast<twt::ClientId>(10 + 3 * i), mcs(rng), s});
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

// Brute-force solver: every PC_ST candidate times every tuple combination.

inline bool meets_floors(const twt::ProblemSpec& spec, const std::vector<twt::ClientSpec>& scheduled,
                         const std::vector<double>& eff) {
  double t_avg = 0.0;
  int downlink_legacy = 0;
  for (const auto& c : spec.clients) {
    if (!c.twt_capable && c.direction == twt::Direction::downlink) {
      t_avg += c.t_csma_mbps;
      ++downlink_legacy;
    }
  }
  if (downlink_legacy > 0) t_avg /= downlink_legacy;
  for (std::size_t i = 0; i < scheduled.size(); ++i) {
    const auto& c = scheduled[i];
    if (c.t_th_mbps) {
      if (eff[i] < *c.t_th_mbps) return false;
    } else if (c.direction == twt::Direction::downlink) {
      if (eff[i] < c.t_csma_mbps) return false;
    } else if (downlink_legacy > 0 && eff[i] > t_avg) {
      return false;
    }
  }
  return true;
}

struct EnumeratedOptimum {
  double objective = -std::numeric_limits<double>::infinity();
  std::int64_t pc_st = 0;
  std::vector<std::size_t> tuples;
  bool feasible = false;
};

inline EnumeratedOptimum enumerate(const twt::ProblemSpec& spec) {
  const auto& table = *spec.table;
  std::vector<twt::ScheduleTuple> grid;
  std::vector<twt::TwtSchedule> shapes;
  for (double aa : table.aa_set()) {
    for (double mf : table.mf_set()) {
      grid.push_back({aa, mf});
      shapes.push_back(twt::schedule_from_tuple({aa, mf}));
    }
  }
  std::vector<std::int64_t> pc_sts;
  for (std::size_t t = 0; t < grid.size(); ++t) {
    if (grid[t].mf <= spec.max_mf) pc_sts.push_back(shapes[t].sleeptime_us);
  }
  std::sort(pc_sts.begin(), pc_sts.end());
  pc_sts.erase(std::unique(pc_sts.begin(), pc_sts.end()), pc_sts.end());

  std::vector<twt::ClientSpec> scheduled;
  for (const auto& c : spec.clients) {
    if (c.twt_capable) scheduled.push_back(c);
  }
  std::sort(scheduled.begin(), scheduled.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  const std::size_t n = scheduled.size();

  EnumeratedOptimum best;
  std::vector<std::size_t> pick(n, 0);
  const std::size_t combos = static_cast<std::size_t>(std::pow(grid.size(), n));
  // Effective throughputs depend only on the tuples, so evaluate each
  // combination once and then look for the smallest admissible PC_ST.
  for (std::size_t code = 0; code < combos; ++code) {
    std::size_t rest = code;
    for (std::size_t i = n; i-- > 0;) {
      pick[i] = rest % grid.size();
      rest /= grid.size();
    }
    bool mf_ok = true;
    std::int64_t wt_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mf_ok = mf_ok && grid[pick[i]].mf <= spec.max_mf;
      wt_sum += shapes[pick[i]].waketime_us;
    }
    if (!mf_ok) continue;
    std::int64_t chosen_pc = -1;
    for (std::int64_t pc : pc_sts) {
      if (pc < wt_sum) continue;
      bool ok = true;
      for (std::size_t i = 0; i < n && ok; ++i) ok = std::llabs(shapes[pick[i]].sleeptime_us - pc) <= spec.oth_us;
      if (ok) {
        chosen_pc = pc;
        break;
      }
    }
    if (chosen_pc < 0) continue;

    std::vector<twt::TupleScheduledClient> placed;
    std::int64_t offset = 0;
    for (std::size_t i = 0; i < n; ++i) {
      twt::TwtSchedule s = shapes[pick[i]];
      s.offset_us = offset;
      offset += s.waketime_us;
      placed.push_back({scheduled[i].id, scheduled[i].mcs, grid[pick[i]], s});
    }
    const auto rep = twt::effective_throughputs(placed, table, spec.horizon_us);
    std::vector<double> eff;
    for (const auto& p : placed) eff.push_back(rep.effective(p.id));
    if (!meets_floors(spec, scheduled, eff)) continue;
    const double value = twt::objective(eff);
    // Ties go to the smaller (PC_ST, tuple vector) pair.
    const bool better = value > best.objective ||
                        (value == best.objective && (chosen_pc < best.pc_st ||
                                                     (chosen_pc == best.pc_st && pick < best.tuples)));
    if (better) {
      best = {value, chosen_pc, pick, true};
    }
  }
  return best;
}

/// Small random instance: at most 3 TWT clients, 1-4 AA values, 1-3 MF
/// values, arbitrary table values.
inline twt::ProblemSpec random_small_instance(std::mt19937_64& rng) {
  const std::vector<double> aa_pool = twt::default_aa_set();
  const std::vector<double> mf_pool = twt::default_mf_set();
  std::uniform_int_distribution<int> n_aa(1, 4), n_mf(1, 3), n_clients(1, 3), mcs(0, 11);
  std::uniform_real_distribution<double> tput(0.0, 80.0), unit(0.0, 1.0);

  std::vector<double> aa, mf;
  std::sample(aa_pool.begin(), aa_pool.end(), std::back_inserter(aa), n_aa(rng), rng);
  std::sample(mf_pool.begin(), mf_pool.end(), std::back_inserter(mf), n_mf(rng), rng);

  twt::ProblemSpec spec;
  const int n = n_clients(rng);
  std::vector<int> mcs_used;
  for (int i = 0; i < n; ++i) {
    twt::ClientSpec c;
    c.id = static_cast<twt::ClientId>(i + 1);
    c.mcs = mcs(rng) % 3 + 5;  // collisions on MCS exercise the id tie-break
    c.direction = unit(rng) < 0.5 ? twt::Direction::uplink : twt::Direction::downlink;
    if (unit(rng) < 0.5) c.t_th_mbps = 1.0 + 10.0 * unit(rng);
    c.t_csma_mbps = 15.0 * unit(rng);
    spec.clients.push_back(c);
    mcs_used.push_back(c.mcs);
  }
  if (unit(rng) < 0.4) {
    twt::ClientSpec legacy;
    legacy.id = 99;
    legacy.mcs = mcs(rng);
    legacy.direction = twt::Direction::downlink;
    legacy.t_csma_mbps = 10.0 + 40.0 * unit(rng);
    legacy.twt_capable = false;
    spec.clients.push_back(legacy);
  }

  std::vector<twt::TableEntry> entries;
  std::sort(mcs_used.begin(), mcs_used.end());
  mcs_used.erase(std::unique(mcs_used.begin(), mcs_used.end()), mcs_used.end());
  for (int m : mcs_used) {
    for (double a : aa) {
      for (double f : mf) entries.push_back({m, a, f, tput(rng)});
    }
  }
  spec.table = std::make_shared<const twt::ThroughputTable>(twt::ThroughputTable::from_entries(entries));
  spec.oth_us = std::uniform_int_distribution<std::int64_t>(0, 60000)(rng);
  spec.max_mf = unit(rng) < 0.2 ? 10.0 : twt::kDefaultMaxMf;
  return spec;
}

}  // namespace oracle
