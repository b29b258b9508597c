#pragma once

// JSON encodings for client lists, solutions and comparison reports, plus the
// sweep CSV.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "twtsched/airtime_sim.hpp"
#include "twtsched/optimizer.hpp"

namespace twt {

/// {"clients": [{"id", "mcs", "direction", "protection", "t_th_mbps",
/// "t_csma_mbps", "twt_capable"}, ...]}
std::vector<ClientSpec> parse_clients(const nlohmann::json& doc);
std::vector<ClientSpec> load_clients(const std::filesystem::path& path);
nlohmann::json clients_to_json(const std::vector<ClientSpec>& clients);

/// { client_id, wt_us, st_us, offset_us, mantissa, exponent, aa_percent, mf }
nlohmann::json schedule_record(ClientId id, const TwtSchedule& schedule, const ScheduleTuple& tuple);

nlohmann::json solution_to_json(const Solution& solution, const ProblemSpec& spec);
/// Inverse of solution_to_json for the fields a replay needs.
Solution solution_from_json(const nlohmann::json& doc);
Solution load_solution(const std::filesystem::path& path);

nlohmann::json comparison_to_json(const ComparisonReport& report);

/// `oth,objective,total_throughput,feasible,plateau`
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Writes via a temporary sibling file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace twt
