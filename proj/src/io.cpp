#include "twtsched/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "twtsched/error.hpp"

namespace twt {

using nlohmann::json;

namespace {

template <typename T>
T required(const json& obj, const char* key, std::size_t idx) {
  if (!obj.contains(key)) {
    throw ParseError("client #" + std::to_string(idx) + " lacks field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError("client #" + std::to_string(idx) + " field '" + key + "': " + e.what());
  }
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

const char* direction_name(Direction d) { return d == Direction::uplink ? "uplink" : "downlink"; }

}  // namespace

std::vector<ClientSpec> parse_clients(const json& doc) {
  if (!doc.is_object() || !doc.contains("clients") || !doc["clients"].is_array()) {
    throw ParseError("clients file must be an object with a 'clients' array");
  }
  std::vector<ClientSpec> out;
  std::set<ClientId> ids;
  std::size_t idx = 0;
  for (const auto& c : doc["clients"]) {
    ++idx;
    if (!c.is_object()) throw ParseError("client #" + std::to_string(idx) + " is not an object");
    ClientSpec spec;
    const auto raw_id = required<std::int64_t>(c, "id", idx);
    if (raw_id < 0 || raw_id > 0xFFFFFFFFLL) throw ParseError("client #" + std::to_string(idx) + " id out of range");
    spec.id = static_cast<ClientId>(raw_id);
    if (!ids.insert(spec.id).second) throw ParseError("duplicate client id " + std::to_string(spec.id));
    spec.mcs = required<int>(c, "mcs", idx);
    if (spec.mcs < kMinMcs || spec.mcs > kMaxMcs) {
      throw ParseError("client " + std::to_string(spec.id) + " MCS outside 0-11");
    }
    const auto dir = required<std::string>(c, "direction", idx);
    if (dir == "uplink") {
      spec.direction = Direction::uplink;
    } else if (dir == "downlink") {
      spec.direction = Direction::downlink;
    } else {
      throw ParseError("client " + std::to_string(spec.id) + " direction must be 'uplink' or 'downlink'");
    }
    const auto protection = required<std::string>(c, "protection", idx);
    if (protection == "protected") {
      const auto th = required<double>(c, "t_th_mbps", idx);
      if (!(th > 0.0)) throw ParseError("client " + std::to_string(spec.id) + " needs t_th_mbps > 0");
      spec.t_th_mbps = th;
    } else if (protection != "best_effort") {
      throw ParseError("client " + std::to_string(spec.id) + " protection must be 'protected' or 'best_effort'");
    }
    spec.t_csma_mbps = required<double>(c, "t_csma_mbps", idx);
    if (!(spec.t_csma_mbps >= 0.0)) throw ParseError("client " + std::to_string(spec.id) + " has negative t_csma_mbps");
    spec.twt_capable = required<bool>(c, "twt_capable", idx);
    out.push_back(spec);
  }
  if (out.empty()) throw ParseError("clients file lists no clients");
  return out;
}

std::vector<ClientSpec> load_clients(const std::filesystem::path& path) { return parse_clients(read_json(path)); }

json clients_to_json(const std::vector<ClientSpec>& clients) {
  json arr = json::array();
  for (const auto& c : clients) {
    json j = {{"id", c.id},
              {"mcs", c.mcs},
              {"direction", direction_name(c.direction)},
              {"protection", c.is_protected() ? "protected" : "best_effort"},
              {"t_csma_mbps", c.t_csma_mbps},
              {"twt_capable", c.twt_capable}};
    if (c.t_th_mbps) j["t_th_mbps"] = *c.t_th_mbps;
    arr.push_back(std::move(j));
  }
  return {{"clients", arr}};
}

json schedule_record(ClientId id, const TwtSchedule& s, const ScheduleTuple& tuple) {
  const auto enc = encode_wake_interval(s.sleeptime_us);
  return {{"client_id", id},
          {"wt_us", s.waketime_us},
          {"st_us", s.sleeptime_us},
          {"offset_us", s.offset_us},
          {"mantissa", enc.mantissa},
          {"exponent", enc.exponent},
          {"aa_percent", tuple.aa_percent},
          {"mf", tuple.mf}};
}

json solution_to_json(const Solution& sol, const ProblemSpec& spec) {
  json clients = json::array();
  for (const auto& a : sol.per_client) {
    json rec = schedule_record(a.id, a.schedule, a.tuple);
    rec["mcs"] = a.mcs;
    rec["achieved_aa_percent"] = aa_of(a.schedule);
    rec["t_unimpaired_mbps"] = a.t_unimpaired_mbps;
    rec["t_effective_mbps"] = a.t_effective_mbps;
    rec["loss_mbps"] = a.loss_mbps;
    clients.push_back(std::move(rec));
  }
  json doc = {{"feasible", sol.feasible},
              {"objective", sol.feasible ? json(sol.objective) : json(nullptr)},
              {"pc_st_us", sol.pc_st_us},
              {"oth_us", sol.oth_us},
              {"max_mf", spec.max_mf},
              {"heuristic", sol.heuristic},
              {"clients", clients},
              {"totals",
               {{"twt_throughput_mbps", twt_throughput(sol)},
                {"system_throughput_mbps", system_throughput(sol, spec)}}}};
  if (!sol.feasible) doc["infeasibility_reason"] = sol.infeasibility_reason;
  return doc;
}

Solution solution_from_json(const json& doc) {
  try {
    Solution sol;
    sol.feasible = doc.at("feasible").get<bool>();
    sol.objective = doc.at("objective").is_null() ? -INFINITY : doc.at("objective").get<double>();
    sol.pc_st_us = doc.at("pc_st_us").get<std::int64_t>();
    sol.oth_us = doc.at("oth_us").get<std::int64_t>();
    sol.heuristic = doc.value("heuristic", false);
    sol.infeasibility_reason = doc.value("infeasibility_reason", std::string{});
    for (const auto& c : doc.at("clients")) {
      ClientAssignment a;
      a.id = c.at("client_id").get<ClientId>();
      a.mcs = c.at("mcs").get<int>();
      a.tuple = {c.at("aa_percent").get<double>(), c.at("mf").get<double>()};
      a.schedule = {c.at("wt_us").get<std::int64_t>(), c.at("st_us").get<std::int64_t>(),
                    c.at("offset_us").get<std::int64_t>()};
      a.t_unimpaired_mbps = c.at("t_unimpaired_mbps").get<double>();
      a.t_effective_mbps = c.at("t_effective_mbps").get<double>();
      a.loss_mbps = c.value("loss_mbps", 0.0);
      sol.per_client.push_back(a);
    }
    return sol;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed solution JSON: ") + e.what());
  }
}

Solution load_solution(const std::filesystem::path& path) { return solution_from_json(read_json(path)); }

json comparison_to_json(const ComparisonReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"client_id", r.id},
                    {"twt_scheduled", r.twt_scheduled},
                    {"csma_mbps", r.csma_mbps},
                    {"twt_mbps", r.twt_mbps}});
  }
  return {{"seed", rep.seed},
          {"horizon_us", rep.horizon_us},
          {"clients", rows},
          {"totals", {{"csma_mbps", rep.csma_total_mbps}, {"twt_mbps", rep.twt_total_mbps}}}};
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  char buf[64];
  os << "oth,objective,total_throughput,feasible,plateau\n";
  for (const auto& r : rows) {
    os << r.oth_us << ',';
    if (r.feasible) {
      std::snprintf(buf, sizeof buf, "%.6f", r.objective);
      os << buf;
    } else {
      os << "-inf";
    }
    std::snprintf(buf, sizeof buf, "%.4f", r.total_throughput_mbps);
    os << ',' << buf << ',' << (r.feasible ? "true" : "false") << ',' << (r.plateau ? "true" : "false") << '\n';
  }
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace twt
