#pragma once

// Throughput lost to overlapping wake windows. Whenever two or more clients are
// awake at once, the client with the lowest MCS index (then the lowest id)
// holds the channel and every other awake client loses that airtime at its
// per-wake-µs rate. This yields a lower bound on the achievable throughput.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "twtsched/schedule.hpp"
#include "twtsched/throughput_table.hpp"

namespace twt {

inline constexpr std::int64_t kHorizonUs = 1'000'000;

/// What happens to the last wake window when it crosses the horizon.
enum class HorizonPolicy { truncate, drop };

struct WakeInterval {
  std::int64_t start_us = 0;
  std::int64_t end_us = 0;
  ClientId client_id = 0;
  int mcs = 0;

  friend bool operator==(const WakeInterval&, const WakeInterval&) = default;
};

struct ScheduledClient {
  ClientId id = 0;
  int mcs = 0;
  TwtSchedule schedule;
};

struct TupleScheduledClient {
  ClientId id = 0;
  int mcs = 0;
  ScheduleTuple tuple;
  TwtSchedule schedule;
};

struct ClientOverlap {
  std::int64_t wake_us = 0;  ///< scheduled wake µs inside the horizon
  std::int64_t won_us = 0;   ///< wake µs in which this client held the channel
  std::int64_t lost_us = 0;  ///< wake µs ceded to a higher-priority client
  double unimpaired_mbps = 0.0;
  double loss_mbps = 0.0;
  double effective_mbps = 0.0;
};

struct OverlapLossReport {
  std::map<ClientId, ClientOverlap> per_client;
  /// Time covered by two or more wake windows.
  std::int64_t total_overlap_us = 0;
  /// Time covered by no wake window.
  std::int64_t idle_us = 0;
  std::int64_t horizon_us = kHorizonUs;

  double loss(ClientId id) const { return per_client.at(id).loss_mbps; }
  double effective(ClientId id) const { return per_client.at(id).effective_mbps; }
};

/// True when (mcs_a, id_a) takes the channel from (mcs_b, id_b).
constexpr bool takes_precedence(int mcs_a, ClientId id_a, int mcs_b, ClientId id_b) noexcept {
  return mcs_a != mcs_b ? mcs_a < mcs_b : id_a < id_b;
}

/// Loss in Mbps for lost_us µs at rate unimpaired / wake_us.
double loss_from_counts(double unimpaired_mbps, std::int64_t lost_us, std::int64_t wake_us);
/// max(0, unimpaired - loss).
double effective_from_counts(double unimpaired_mbps, std::int64_t lost_us, std::int64_t wake_us);

/// Wake windows [offset + k*cycle, offset + k*cycle + WT) inside [0, horizon),
/// sorted by start then client id. Throws InvalidScheduleError when WT or ST
/// is zero.
std::vector<WakeInterval> expand_intervals(std::span<const ScheduledClient> clients,
                                           std::int64_t horizon_us = kHorizonUs,
                                           HorizonPolicy policy = HorizonPolicy::truncate);

/// Exact time sweep over the intervals. Every client appearing in the
/// intervals or in `unimpaired` must have both a rate and wake time > 0.
OverlapLossReport overlap_loss(std::span<const WakeInterval> intervals,
                               const std::map<ClientId, double>& unimpaired_mbps,
                               std::int64_t horizon_us = kHorizonUs);

/// lookup -> expand_intervals -> overlap_loss.
OverlapLossReport effective_throughputs(std::span<const TupleScheduledClient> clients,
                                        const ThroughputTable& table,
                                        std::int64_t horizon_us = kHorizonUs,
                                        HorizonPolicy policy = HorizonPolicy::truncate);

namespace detail {

/// Strictly periodic wake pattern. Clients passed to periodic_losses must be
/// ordered by channel precedence (index 0 wins every contest).
struct PeriodicClient {
  std::int64_t offset_us = 0;
  std::int64_t wake_us = 0;
  std::int64_t cycle_us = 0;
};

/// Allocation-free sweep used by the optimizer's inner loop. Writes per-client
/// scheduled wake µs and lost µs. At most 64 clients.
void periodic_losses(std::span<const PeriodicClient> by_precedence, std::int64_t horizon_us,
                     HorizonPolicy policy, std::span<std::int64_t> wake_out,
                     std::span<std::int64_t> lost_out);

}  // namespace detail
}  // namespace twt
