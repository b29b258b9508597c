#include "twtsched/overlap.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

#include "twtsched/error.hpp"

namespace twt {

double loss_from_counts(double unimpaired_mbps, std::int64_t lost_us, std::int64_t wake_us) {
  return static_cast<double>(lost_us) * (unimpaired_mbps / static_cast<double>(wake_us));
}

double effective_from_counts(double unimpaired_mbps, std::int64_t lost_us, std::int64_t wake_us) {
  return std::max(0.0, unimpaired_mbps - loss_from_counts(unimpaired_mbps, lost_us, wake_us));
}

std::vector<WakeInterval> expand_intervals(std::span<const ScheduledClient> clients,
                                           std::int64_t horizon_us, HorizonPolicy policy) {
  std::vector<WakeInterval> out;
  for (const auto& c : clients) {
    const auto& s = c.schedule;
    if (s.waketime_us <= 0 || s.sleeptime_us <= 0) {
      throw InvalidScheduleError("client " + std::to_string(c.id) + " has WT or ST equal to zero");
    }
    if (s.offset_us < 0) {
      throw InvalidScheduleError("client " + std::to_string(c.id) + " has a negative offset");
    }
    for (std::int64_t start = s.offset_us; start < horizon_us; start += s.cycle_us()) {
      std::int64_t end = start + s.waketime_us;
      if (end > horizon_us) {
        if (policy == HorizonPolicy::drop) break;
        end = horizon_us;
      }
      out.push_back({start, end, c.id, c.mcs});
    }
  }
  std::sort(out.begin(), out.end(), [](const WakeInterval& a, const WakeInterval& b) {
    return a.start_us != b.start_us ? a.start_us < b.start_us : a.client_id < b.client_id;
  });
  return out;
}

OverlapLossReport overlap_loss(std::span<const WakeInterval> intervals,
                               const std::map<ClientId, double>& unimpaired_mbps,
                               std::int64_t horizon_us) {
  if (horizon_us <= 0) throw DomainError("horizon must be positive");

  // Dense client table in precedence order.
  std::map<ClientId, int> mcs_of;
  for (const auto& iv : intervals) {
    if (iv.start_us < 0 || iv.start_us >= iv.end_us || iv.end_us > horizon_us) {
      throw DomainError("interval [" + std::to_string(iv.start_us) + ", " + std::to_string(iv.end_us) +
                        ") of client " + std::to_string(iv.client_id) + " is empty or outside the horizon");
    }
    const auto [it, inserted] = mcs_of.emplace(iv.client_id, iv.mcs);
    if (!inserted && it->second != iv.mcs) {
      throw DomainError("client " + std::to_string(iv.client_id) + " appears with two MCS indices");
    }
  }
  for (const auto& [id, rate] : unimpaired_mbps) {
    if (!mcs_of.contains(id)) {
      throw DegenerateRateError("client " + std::to_string(id) + " has no scheduled wake time");
    }
    if (!(rate >= 0.0)) throw DomainError("negative unimpaired throughput for client " + std::to_string(id));
  }

  struct Entry {
    ClientId id;
    int mcs;
  };
  std::vector<Entry> clients;
  for (const auto& [id, mcs] : mcs_of) {
    if (!unimpaired_mbps.contains(id)) {
      throw LookupError("no unimpaired throughput for client " + std::to_string(id));
    }
    clients.push_back({id, mcs});
  }
  std::sort(clients.begin(), clients.end(), [](const Entry& a, const Entry& b) {
    return takes_precedence(a.mcs, a.id, b.mcs, b.id);
  });
  std::map<ClientId, std::size_t> rank;
  for (std::size_t i = 0; i < clients.size(); ++i) rank[clients[i].id] = i;

  struct Event {
    std::int64_t t;
    std::size_t who;
    int delta;
  };
  std::vector<Event> events;
  events.reserve(intervals.size() * 2);
  for (const auto& iv : intervals) {
    const std::size_t r = rank.at(iv.client_id);
    events.push_back({iv.start_us, r, +1});
    events.push_back({iv.end_us, r, -1});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.t < b.t; });

  const std::size_t n = clients.size();
  std::vector<int> cover(n, 0);
  std::vector<std::int64_t> wake(n, 0), won(n, 0), lost(n, 0);
  std::int64_t overlap_us = 0;
  std::int64_t covered_us = 0;
  std::int64_t prev = 0;
  std::size_t e = 0;
  while (e < events.size()) {
    const std::int64_t t = events[e].t;
    const std::int64_t len = t - prev;
    if (len > 0) {
      std::size_t awake = 0;
      std::size_t winner = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (cover[i] > 0) {
          ++awake;
          wake[i] += len;
          if (winner == n) {
            winner = i;
          } else {
            lost[i] += len;
          }
        }
      }
      if (winner != n) {
        won[winner] += len;
        covered_us += len;
      }
      if (awake >= 2) overlap_us += len;
    }
    for (; e < events.size() && events[e].t == t; ++e) cover[events[e].who] += events[e].delta;
    prev = t;
  }

  OverlapLossReport report;
  report.horizon_us = horizon_us;
  report.total_overlap_us = overlap_us;
  report.idle_us = horizon_us - covered_us;
  for (std::size_t i = 0; i < n; ++i) {
    if (wake[i] <= 0) {
      throw DegenerateRateError("client " + std::to_string(clients[i].id) + " has zero wake time");
    }
    ClientOverlap co;
    co.wake_us = wake[i];
    co.won_us = won[i];
    co.lost_us = lost[i];
    co.unimpaired_mbps = unimpaired_mbps.at(clients[i].id);
    co.loss_mbps = loss_from_counts(co.unimpaired_mbps, lost[i], wake[i]);
    co.effective_mbps = effective_from_counts(co.unimpaired_mbps, lost[i], wake[i]);
    report.per_client.emplace(clients[i].id, co);
  }
  return report;
}

OverlapLossReport effective_throughputs(std::span<const TupleScheduledClient> clients,
                                        const ThroughputTable& table, std::int64_t horizon_us,
                                        HorizonPolicy policy) {
  std::vector<ScheduledClient> plain;
  std::map<ClientId, double> unimpaired;
  plain.reserve(clients.size());
  for (const auto& c : clients) {
    unimpaired[c.id] = table.lookup(c.mcs, c.tuple);
    plain.push_back({c.id, c.mcs, c.schedule});
  }
  const auto intervals = expand_intervals(plain, horizon_us, policy);
  return overlap_loss(intervals, unimpaired, horizon_us);
}

namespace detail {

void periodic_losses(std::span<const PeriodicClient> by_precedence, std::int64_t horizon_us,
                     HorizonPolicy policy, std::span<std::int64_t> wake_out,
                     std::span<std::int64_t> lost_out) {
  const std::size_t n = by_precedence.size();
  constexpr std::int64_t kNever = INT64_MAX;
  std::int64_t start[64];
  std::int64_t end[64];
  std::uint64_t active = 0;

  auto arm = [&](std::size_t i, std::int64_t s) {
    const auto& c = by_precedence[i];
    if (s >= horizon_us) {
      start[i] = end[i] = kNever;
      return;
    }
    std::int64_t e = s + c.wake_us;
    if (e > horizon_us) {
      if (policy == HorizonPolicy::drop) {
        start[i] = end[i] = kNever;
        return;
      }
      e = horizon_us;
    }
    start[i] = s;
    end[i] = e;
  };

  for (std::size_t i = 0; i < n; ++i) {
    wake_out[i] = 0;
    lost_out[i] = 0;
    arm(i, by_precedence[i].offset_us);
  }

  std::int64_t prev = 0;
  for (;;) {
    std::int64_t t = kNever;
    for (std::size_t i = 0; i < n; ++i) {
      const std::int64_t next = (active >> i & 1U) ? end[i] : start[i];
      t = std::min(t, next);
    }
    if (t == kNever) break;

    if (active != 0) {
      const std::int64_t len = t - prev;
      // Lowest set bit holds the channel.
      std::uint64_t losers = active & (active - 1);
      while (losers) {
        lost_out[static_cast<std::size_t>(std::countr_zero(losers))] += len;
        losers &= losers - 1;
      }
    }

    for (std::size_t i = 0; i < n; ++i) {
      if ((active >> i & 1U) && end[i] == t) {
        active &= ~(std::uint64_t{1} << i);
        wake_out[i] += end[i] - start[i];
        arm(i, start[i] + by_precedence[i].cycle_us);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!(active >> i & 1U) && start[i] == t) active |= std::uint64_t{1} << i;
    }
    prev = t;
  }
}

}  // namespace detail
}  // namespace twt
