#pragma once

// Desk-scale airtime simulation: a µs-resolution replay of TWT schedules and a
// slotted CSMA/CA (DCF) model with binary exponential backoff. The replay is
// deliberately a separate code path from the overlap sweep so each can check
// the other.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "twtsched/optimizer.hpp"
#include "twtsched/overlap.hpp"
#include "twtsched/schedule.hpp"
#include "twtsched/throughput_table.hpp"

namespace twt {

struct DcfParams {
  std::int64_t slot_us = 9;
  std::int64_t difs_us = 34;
  std::int64_t sifs_us = 16;
  /// Block ACK duration at a legacy rate.
  std::int64_t ack_us = 44;
  int cw_min = 15;
  int cw_max = 1023;
  /// Data PPDU airtime per MCS. MCS values without an entry use the default
  /// computed from the PHY rate map.
  std::map<int, std::int64_t> frame_airtime_us;
  /// Payload carried by one full-length PPDU.
  std::int64_t payload_bits = 32 * 1500 * 8;
  /// Shortest PPDU worth sending into a gap before the next TWT window.
  std::int64_t min_frame_us = 100;
  std::uint64_t rng_seed = 1;

  void validate() const;
  std::int64_t frame_airtime(int mcs) const;

  /// Frame airtimes derived from a table: the full-airtime rate of an MCS is
  /// T(mcs, AA_max, MF_min) / (AA_max / 100).
  static DcfParams from_table(const ThroughputTable& table);
  static DcfParams from_rates(const std::map<int, double>& rate_mbps);
};

struct ClientSimStats {
  std::int64_t airtime_us = 0;  ///< channel time held by successful exchanges
  double throughput_mbps = 0.0;
  std::int64_t collisions = 0;
  std::int64_t wins = 0;
  // TWT replay only.
  std::int64_t wake_us = 0;
  std::int64_t lost_us = 0;
  // CSMA only: slots drawn = slots counted + slots still pending at the horizon.
  std::int64_t backoff_drawn_slots = 0;
  std::int64_t backoff_counted_slots = 0;
  std::int64_t backoff_pending_slots = 0;
  double delivered_bits = 0.0;
};

struct SimResult {
  std::map<ClientId, ClientSimStats> per_client;
  std::int64_t idle_us = 0;
  std::int64_t collision_us = 0;
  /// Time withheld from contention (TWT windows in mixed mode).
  std::int64_t reserved_us = 0;
  std::int64_t horizon_us = 0;
  std::uint64_t seed = 0;

  /// sum(airtime) + idle + collision + reserved.
  std::int64_t accounted_us() const;
};

struct TwtReplayClient {
  ClientId id = 0;
  int mcs = 0;
  TwtSchedule schedule;
  double unimpaired_mbps = 0.0;
};

/// Replays wake windows µs by µs; contested µs go to the lowest (MCS, id).
/// Throughput = unimpaired * won / scheduled wake.
SimResult simulate_twt(std::span<const TwtReplayClient> clients, std::int64_t horizon_us = kHorizonUs);
SimResult simulate_twt(std::span<const TupleScheduledClient> clients, const ThroughputTable& table,
                       std::int64_t horizon_us = kHorizonUs);

struct CsmaStation {
  ClientId id = 0;
  int mcs = 0;
  bool saturated = true;
};

/// Half-open busy windows no station may transmit into.
struct BusyWindow {
  std::int64_t start_us = 0;
  std::int64_t end_us = 0;
};

/// Slotted DCF. Stations draw a backoff in [0, CW], count down idle slots
/// after DIFS, freeze while the medium is busy, and transmit at zero; equal
/// zero counts collide and double CW up to cw_max. Optional busy windows
/// (sorted, disjoint) model airtime claimed by TWT clients: a PPDU is shortened
/// to fit before the next window, or deferred if it would drop below
/// min_frame_us.
SimResult simulate_csma(std::span<const CsmaStation> stations, const DcfParams& params,
                        std::int64_t horizon_us, std::span<const BusyWindow> busy = {});

/// Union of the wake windows, merged and sorted.
std::vector<BusyWindow> busy_windows(std::span<const TwtReplayClient> clients, std::int64_t horizon_us);

struct ComparisonRow {
  ClientId id = 0;
  bool twt_scheduled = false;
  double csma_mbps = 0.0;
  double twt_mbps = 0.0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  double csma_total_mbps = 0.0;
  double twt_total_mbps = 0.0;
  std::uint64_t seed = 0;
  std::int64_t horizon_us = 0;
  SimResult csma_run;
  SimResult twt_replay;
  SimResult legacy_run;
};

/// Three-step comparison: every client on CSMA/CA, then the solution's TWT
/// clients replayed with the remaining clients contending in the idle residue.
ComparisonReport compare(const ProblemSpec& spec, const Solution& solution, const DcfParams& params,
                         std::int64_t horizon_us = kHorizonUs);

/// `client_id,mode,throughput_mbps` with a trailing `total` row per mode.
std::string comparison_csv(const ComparisonReport& report);

}  // namespace twt
