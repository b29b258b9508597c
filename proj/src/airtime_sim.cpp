#include "twtsched/airtime_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "twtsched/error.hpp"

namespace twt {

void DcfParams::validate() const {
  if (slot_us <= 0 || difs_us <= 0 || sifs_us <= 0 || ack_us <= 0) {
    throw DomainError("DCF durations must be positive");
  }
  if (cw_min < 0 || cw_min > cw_max) throw DomainError("DCF needs 0 <= cw_min <= cw_max");
  if (payload_bits <= 0) throw DomainError("payload must be positive");
  if (min_frame_us <= 0) throw DomainError("minimum frame airtime must be positive");
  for (const auto& [mcs, us] : frame_airtime_us) {
    if (us <= 0) throw DomainError("frame airtime for MCS " + std::to_string(mcs) + " must be positive");
  }
}

std::int64_t DcfParams::frame_airtime(int mcs) const {
  if (const auto it = frame_airtime_us.find(mcs); it != frame_airtime_us.end()) return it->second;
  const auto rates = SyntheticModelParams::defaults().phy_rate_mbps;
  const auto it = rates.find(mcs);
  if (it == rates.end()) throw DomainError("no frame airtime for MCS " + std::to_string(mcs));
  return static_cast<std::int64_t>(std::ceil(static_cast<double>(payload_bits) / it->second));
}

DcfParams DcfParams::from_rates(const std::map<int, double>& rate_mbps) {
  DcfParams p;
  for (const auto& [mcs, rate] : rate_mbps) {
    if (rate > 0.0) {
      p.frame_airtime_us[mcs] = static_cast<std::int64_t>(std::ceil(static_cast<double>(p.payload_bits) / rate));
    }
  }
  return p;
}

DcfParams DcfParams::from_table(const ThroughputTable& table) {
  std::map<int, double> rates;
  const double aa = table.aa_set().back();
  const double mf = table.mf_set().front();
  for (int mcs : table.mcs_set()) rates[mcs] = table.lookup(mcs, {aa, mf}) / (aa / 100.0);
  return from_rates(rates);
}

std::int64_t SimResult::accounted_us() const {
  std::int64_t sum = idle_us + collision_us + reserved_us;
  for (const auto& [id, s] : per_client) sum += s.airtime_us;
  return sum;
}

SimResult simulate_twt(std::span<const TwtReplayClient> clients, std::int64_t horizon_us) {
  if (horizon_us <= 0) throw DomainError("horizon must be positive");
  std::vector<TwtReplayClient> order(clients.begin(), clients.end());
  for (const auto& c : order) {
    if (c.schedule.waketime_us <= 0 || c.schedule.sleeptime_us <= 0 || c.schedule.offset_us < 0) {
      throw InvalidScheduleError("client " + std::to_string(c.id) + " has a degenerate schedule");
    }
    if (c.schedule.cycle_us() > horizon_us) {
      throw InvalidScheduleError("horizon shorter than one cycle of client " + std::to_string(c.id));
    }
  }
  std::sort(order.begin(), order.end(), [](const TwtReplayClient& a, const TwtReplayClient& b) {
    return takes_precedence(a.mcs, a.id, b.mcs, b.id);
  });

  const std::size_t n = order.size();
  std::vector<std::int64_t> wake(n, 0), won(n, 0);
  std::int64_t idle = 0;
  for (std::int64_t t = 0; t < horizon_us; ++t) {
    bool taken = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& s = order[i].schedule;
      if (t < s.offset_us || (t - s.offset_us) % s.cycle_us() >= s.waketime_us) continue;
      ++wake[i];
      if (!taken) {
        ++won[i];
        taken = true;
      }
    }
    if (!taken) ++idle;
  }

  SimResult r;
  r.horizon_us = horizon_us;
  r.idle_us = idle;
  for (std::size_t i = 0; i < n; ++i) {
    if (wake[i] == 0) {
      throw DegenerateRateError("client " + std::to_string(order[i].id) + " never wakes inside the horizon");
    }
    ClientSimStats st;
    st.airtime_us = won[i];
    st.wake_us = wake[i];
    st.lost_us = wake[i] - won[i];
    const double per_second_scale = static_cast<double>(horizon_us) / static_cast<double>(wake[i]);
    st.throughput_mbps =
        static_cast<double>(won[i]) / static_cast<double>(horizon_us) * (order[i].unimpaired_mbps * per_second_scale);
    r.per_client.emplace(order[i].id, st);
  }
  return r;
}

SimResult simulate_twt(std::span<const TupleScheduledClient> clients, const ThroughputTable& table,
                       std::int64_t horizon_us) {
  std::vector<TwtReplayClient> replay;
  for (const auto& c : clients) replay.push_back({c.id, c.mcs, c.schedule, table.lookup(c.mcs, c.tuple)});
  return simulate_twt(replay, horizon_us);
}

std::vector<BusyWindow> busy_windows(std::span<const TwtReplayClient> clients, std::int64_t horizon_us) {
  std::vector<BusyWindow> raw;
  for (const auto& c : clients) {
    const auto& s = c.schedule;
    if (s.waketime_us <= 0 || s.cycle_us() <= 0) continue;
    for (std::int64_t start = s.offset_us; start < horizon_us; start += s.cycle_us()) {
      raw.push_back({start, std::min(start + s.waketime_us, horizon_us)});
    }
  }
  std::sort(raw.begin(), raw.end(), [](const BusyWindow& a, const BusyWindow& b) { return a.start_us < b.start_us; });
  std::vector<BusyWindow> merged;
  for (const auto& w : raw) {
    if (!merged.empty() && w.start_us <= merged.back().end_us) {
      merged.back().end_us = std::max(merged.back().end_us, w.end_us);
    } else {
      merged.push_back(w);
    }
  }
  return merged;
}

SimResult simulate_csma(std::span<const CsmaStation> stations, const DcfParams& params,
                        std::int64_t horizon_us, std::span<const BusyWindow> busy) {
  params.validate();
  if (horizon_us <= 0) throw DomainError("horizon must be positive");

  struct Station {
    ClientId id;
    std::int64_t full_frame_us;
    int cw;
    std::int64_t counter;
  };
  std::mt19937_64 rng(params.rng_seed);
  SimResult r;
  r.horizon_us = horizon_us;
  r.seed = params.rng_seed;

  std::vector<Station> active;
  for (const auto& s : stations) {
    r.per_client[s.id];
    if (s.saturated) active.push_back({s.id, params.frame_airtime(s.mcs), params.cw_min, 0});
  }
  auto draw = [&](Station& st) {
    std::uniform_int_distribution<int> backoff(0, st.cw);
    st.counter = backoff(rng);
    r.per_client[st.id].backoff_drawn_slots += st.counter;
  };
  for (auto& st : active) draw(st);

  std::vector<std::size_t> ready;
  std::size_t b = 0;
  std::int64_t t = 0;
  while (t < horizon_us) {
    while (b < busy.size() && busy[b].end_us <= t) ++b;
    if (b < busy.size() && busy[b].start_us <= t) {
      const std::int64_t until = std::min(busy[b].end_us, horizon_us);
      r.reserved_us += until - t;
      t = until;
      continue;
    }
    const std::int64_t limit = b < busy.size() ? std::min(busy[b].start_us, horizon_us) : horizon_us;
    if (active.empty() || t + params.difs_us > limit) {
      r.idle_us += limit - t;
      t = limit;
      continue;
    }

    const std::int64_t after_difs = t + params.difs_us;
    std::int64_t m = INT64_MAX;
    for (const auto& st : active) m = std::min(m, st.counter);
    const std::int64_t slots_left = (limit - after_difs) / params.slot_us;
    if (m > slots_left) {
      for (auto& st : active) {
        st.counter -= slots_left;
        r.per_client[st.id].backoff_counted_slots += slots_left;
      }
      r.idle_us += limit - t;
      t = limit;
      continue;
    }

    const std::int64_t tx_start = after_difs + m * params.slot_us;
    ready.clear();
    for (std::size_t i = 0; i < active.size(); ++i) {
      active[i].counter -= m;
      r.per_client[active[i].id].backoff_counted_slots += m;
      if (active[i].counter == 0) ready.push_back(i);
    }

    const std::int64_t room = limit - tx_start - params.sifs_us - params.ack_us;
    bool defer = false;
    std::int64_t longest = 0;
    for (std::size_t i : ready) {
      const std::int64_t full = active[i].full_frame_us;
      if (room < full && room < params.min_frame_us) defer = true;
      longest = std::max(longest, std::min(full, room));
    }
    if (defer) {
      // Counters stay at zero; the stations retry after the busy window.
      r.idle_us += limit - t;
      t = limit;
      continue;
    }

    r.idle_us += tx_start - t;
    const std::int64_t exchange = longest + params.sifs_us + params.ack_us;
    if (ready.size() == 1) {
      Station& st = active[ready.front()];
      auto& stats = r.per_client[st.id];
      const std::int64_t frame = std::min(st.full_frame_us, room);
      stats.airtime_us += exchange;
      stats.wins += 1;
      stats.delivered_bits +=
          static_cast<double>(params.payload_bits) * static_cast<double>(frame) / static_cast<double>(st.full_frame_us);
      st.cw = params.cw_min;
      draw(st);
    } else {
      r.collision_us += exchange;
      for (std::size_t i : ready) {
        Station& st = active[i];
        r.per_client[st.id].collisions += 1;
        st.cw = std::min(2 * (st.cw + 1) - 1, params.cw_max);
        draw(st);
      }
    }
    t = tx_start + exchange;
  }

  for (const auto& st : active) r.per_client[st.id].backoff_pending_slots = st.counter;
  for (auto& [id, stats] : r.per_client) {
    stats.throughput_mbps = stats.delivered_bits / static_cast<double>(horizon_us);
  }
  return r;
}

ComparisonReport compare(const ProblemSpec& spec, const Solution& solution, const DcfParams& params,
                         std::int64_t horizon_us) {
  std::vector<ClientSpec> clients = spec.clients;
  std::sort(clients.begin(), clients.end(), [](const ClientSpec& a, const ClientSpec& b) { return a.id < b.id; });

  ComparisonReport rep;
  rep.seed = params.rng_seed;
  rep.horizon_us = horizon_us;

  std::vector<CsmaStation> everyone;
  for (const auto& c : clients) everyone.push_back({c.id, c.mcs, true});
  rep.csma_run = simulate_csma(everyone, params, horizon_us);

  std::vector<TwtReplayClient> twt_clients;
  std::vector<CsmaStation> legacy;
  for (const auto& c : clients) {
    if (const auto* a = solution.feasible ? solution.find(c.id) : nullptr) {
      twt_clients.push_back({a->id, a->mcs, a->schedule, a->t_unimpaired_mbps});
    } else {
      legacy.push_back({c.id, c.mcs, true});
    }
  }
  if (!twt_clients.empty()) rep.twt_replay = simulate_twt(twt_clients, horizon_us);
  const auto mask = busy_windows(twt_clients, horizon_us);
  rep.legacy_run = simulate_csma(legacy, params, horizon_us, mask);

  for (const auto& c : clients) {
    ComparisonRow row;
    row.id = c.id;
    row.csma_mbps = rep.csma_run.per_client.at(c.id).throughput_mbps;
    if (const auto it = rep.twt_replay.per_client.find(c.id); it != rep.twt_replay.per_client.end()) {
      row.twt_scheduled = true;
      row.twt_mbps = it->second.throughput_mbps;
    } else {
      row.twt_mbps = rep.legacy_run.per_client.at(c.id).throughput_mbps;
    }
    rep.csma_total_mbps += row.csma_mbps;
    rep.twt_total_mbps += row.twt_mbps;
    rep.rows.push_back(row);
  }
  return rep;
}

std::string comparison_csv(const ComparisonReport& report) {
  std::ostringstream os;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };
  os << "client_id,mode,throughput_mbps\n";
  for (const auto& row : report.rows) {
    os << row.id << ",csma," << num(row.csma_mbps) << '\n';
    os << row.id << ",twt," << num(row.twt_mbps) << '\n';
  }
  os << "total,csma," << num(report.csma_total_mbps) << '\n';
  os << "total,twt," << num(report.twt_total_mbps) << '\n';
  return os.str();
}

}  // namespace twt
