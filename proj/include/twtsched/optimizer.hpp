#pragma once

// Proportionally fair TWT schedule synthesis.
//
// Each TWT-capable client picks one <AA, MF> tuple from the table grid. A
// pseudo client with sleeptime PC_ST anchors every real client's sleeptime to
// within OTh of it, and the round must fit: PC_ST >= sum of all WTs. Offsets
// follow a round-robin layout in ascending id order, overlap losses are
// charged with the lowest-MCS-wins rule, and the objective is
// sum(log(1 + T_effective)) over the scheduled clients.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twtsched/overlap.hpp"
#include "twtsched/schedule.hpp"
#include "twtsched/throughput_table.hpp"

namespace twt {

enum class Direction { uplink, downlink };

struct ClientSpec {
  ClientId id = 0;
  int mcs = 0;
  Direction direction = Direction::downlink;
  /// Guaranteed throughput for protected clients; empty for best effort.
  std::optional<double> t_th_mbps;
  double t_csma_mbps = 0.0;
  bool twt_capable = true;

  bool is_protected() const noexcept { return t_th_mbps.has_value(); }
  /// Protected and scheduled by TWT (throughput floor applies).
  bool in_protected_set() const noexcept { return is_protected() && twt_capable; }
  /// Best-effort downlink (must beat its CSMA baseline).
  bool in_downlink_set() const noexcept { return !is_protected() && direction == Direction::downlink; }
  /// Best-effort uplink (capped at the vanilla downlink average).
  bool in_uplink_set() const noexcept { return !is_protected() && direction == Direction::uplink; }
};

inline constexpr double kDefaultMaxMf = 40.0;

struct ProblemSpec {
  std::vector<ClientSpec> clients;
  std::int64_t oth_us = 0;
  double max_mf = kDefaultMaxMf;
  std::shared_ptr<const ThroughputTable> table;
  std::int64_t horizon_us = kHorizonUs;

  /// Throws ConfigError on an unusable instance.
  void validate() const;
  /// TWT-capable clients in ascending id order.
  std::vector<ClientSpec> scheduled_clients() const;
  /// Mean CSMA throughput of downlink non-TWT clients, empty if there are none.
  std::optional<double> vanilla_downlink_average() const;
};

struct ClientAssignment {
  ClientId id = 0;
  int mcs = 0;
  ScheduleTuple tuple;
  TwtSchedule schedule;
  double t_unimpaired_mbps = 0.0;
  double t_effective_mbps = 0.0;
  double loss_mbps = 0.0;
};

struct Solution {
  /// Scheduled clients in ascending id order.
  std::vector<ClientAssignment> per_client;
  std::int64_t pc_st_us = 0;
  std::int64_t oth_us = 0;
  double objective = 0.0;
  bool feasible = false;
  /// Result of the coarse-to-fine mode; not guaranteed optimal.
  bool heuristic = false;
  std::string infeasibility_reason;

  const ClientAssignment* find(ClientId id) const;
};

/// Sum of log(1 + T) (natural log). Throws DomainError on negative input.
double objective(std::span<const double> t_effective_mbps);

enum class ConstraintKind {
  min_throughput,    // T >= T_th for protected TWT clients
  beat_csma,         // T >= T_CSMA for best-effort downlink clients
  uplink_cap,        // T <= T_avg for best-effort uplink clients
  round_robin,       // PC_ST >= sum WT
  overlap_threshold, // |PC_ST - ST| <= OTh
  max_mf,            // MF <= C
  schedule_invalid,  // schedule breaks a TWT field invariant
  missing_client,    // TWT-capable client without an assignment
  unknown_client,    // assignment for a client that is not TWT-capable
};

struct ConstraintViolation {
  ConstraintKind kind;
  ClientId client_id = 0;  ///< 0 for system-wide constraints
  std::string detail;
};

std::string to_string(ConstraintKind kind);

/// Every violated constraint, evaluated on the solution's effective throughputs.
std::vector<ConstraintViolation> check_constraints(const Solution& solution, const ProblemSpec& spec);

/// offset_i = sum of WT_j over clients with smaller id.
std::map<ClientId, TwtSchedule> assign_offsets(const std::map<ClientId, TwtSchedule>& chosen);

struct SolveOptions {
  /// Worker threads; 0 picks the OpenMP default. 1 runs the serial path.
  int threads = 0;
  /// Coarse grid first, then a restricted fine search (heuristic).
  bool coarse_to_fine = false;
};

/// Exact optimum over the discrete grid (unless coarse_to_fine is set).
/// Ties resolve to the lexicographically smallest (PC_ST, tuple index vector).
/// Throws ConfigError when the table does not cover the grid for a client.
Solution solve(const ProblemSpec& spec, const SolveOptions& options = {});

struct SweepRow {
  std::int64_t oth_us = 0;
  double objective = 0.0;  ///< -inf when infeasible
  double total_throughput_mbps = 0.0;
  bool feasible = false;
  /// Same tuple vector as the previous row.
  bool plateau = false;
  Solution solution;
};

std::vector<SweepRow> oth_sweep(const ProblemSpec& spec, std::span<const std::int64_t> oth_values,
                                const SolveOptions& options = {});

/// Effective TWT throughput of the scheduled clients plus the CSMA baseline of
/// everyone else.
double system_throughput(const Solution& solution, const ProblemSpec& spec);
double twt_throughput(const Solution& solution);

/// Grid tuples in index order (aa-major, mf-minor), as searched by solve().
std::vector<ScheduleTuple> grid_tuples(const ThroughputTable& table);

}  // namespace twt
