#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "twtsched/error.hpp"
#include "twtsched/io.hpp"

using namespace twt;
using nlohmann::json;

TEST_CASE("shipped clients file") {
  const auto clients = load_clients(fixture::data_path("deployment_clients.json"));
  REQUIRE(clients.size() == 6);
  CHECK(clients[1].id == 2);
  CHECK_FALSE(clients[1].twt_capable);
  CHECK_FALSE(clients[1].is_protected());
  CHECK(clients[1].t_csma_mbps == doctest::Approx(32.97));
  CHECK(clients[3].direction == Direction::downlink);
  CHECK(*clients[3].t_th_mbps == doctest::Approx(18.0));

  const auto again = parse_clients(clients_to_json(clients));
  REQUIRE(again.size() == clients.size());
  for (std::size_t i = 0; i < clients.size(); ++i) {
    CHECK(again[i].id == clients[i].id);
    CHECK(again[i].mcs == clients[i].mcs);
    CHECK(again[i].t_th_mbps == clients[i].t_th_mbps);
  }
}

TEST_CASE("malformed clients") {
  const json base = {{"id", 1}, {"mcs", 7}, {"direction", "uplink"}, {"protection", "best_effort"},
                     {"t_csma_mbps", 3.0}, {"twt_capable", true}};
  auto wrap = [](const json& c) { return json{{"clients", json::array({c})}}; };
  CHECK_NOTHROW(parse_clients(wrap(base)));

  auto no_mcs = base;
  no_mcs.erase("mcs");
  CHECK_THROWS_AS(parse_clients(wrap(no_mcs)), ParseError);
  auto bad_dir = base;
  bad_dir["direction"] = "sideways";
  CHECK_THROWS_AS(parse_clients(wrap(bad_dir)), ParseError);
  auto no_th = base;
  no_th["protection"] = "protected";
  CHECK_THROWS_AS(parse_clients(wrap(no_th)), ParseError);
  auto mcs12 = base;
  mcs12["mcs"] = 12;
  CHECK_THROWS_AS(parse_clients(wrap(mcs12)), ParseError);
  CHECK_THROWS_AS(parse_clients(json{{"clients", json::array({base, base})}}), ParseError);
  CHECK_THROWS_AS(parse_clients(json{{"clients", json::array()}}), ParseError);
  CHECK_THROWS_AS(parse_clients(json::array()), ParseError);
  CHECK_THROWS_AS(load_clients("/nonexistent/clients.json"), ParseError);
}

TEST_CASE("schedule record") {
  const auto rec = schedule_record(3, {65280, 195840, 130560}, {25, 1});
  CHECK(rec["wt_us"] == 65280);
  CHECK(rec["st_us"] == 195840);
  CHECK(rec["offset_us"] == 130560);
  CHECK(rec["mantissa"] == 48960);
  CHECK(rec["exponent"] == 2);
  CHECK(rec["client_id"] == 3);
}

TEST_CASE("solution json round trip") {
  const auto spec = fixture::deployment_instance(10000);
  const auto sol = solve(spec);
  REQUIRE(sol.feasible);
  const auto doc = solution_to_json(sol, spec);
  CHECK(doc["clients"].size() == 4);
  CHECK(doc["totals"].contains("twt_throughput_mbps"));
  CHECK(doc["totals"].contains("system_throughput_mbps"));

  const auto back = solution_from_json(json::parse(doc.dump()));
  REQUIRE(back.per_client.size() == sol.per_client.size());
  CHECK(back.pc_st_us == sol.pc_st_us);
  CHECK(back.objective == sol.objective);
  for (std::size_t i = 0; i < sol.per_client.size(); ++i) {
    CHECK(back.per_client[i].schedule == sol.per_client[i].schedule);
    CHECK(back.per_client[i].tuple == sol.per_client[i].tuple);
    CHECK(back.per_client[i].t_effective_mbps == sol.per_client[i].t_effective_mbps);
  }

  const auto infeasible = solve(fixture::deployment_instance(0));
  const auto idoc = solution_to_json(infeasible, spec);
  CHECK(idoc["objective"].is_null());
  CHECK(idoc.contains("infeasibility_reason"));
  CHECK_THROWS_AS(solution_from_json(json{{"feasible", true}}), ParseError);
}

TEST_CASE("sweep csv") {
  SweepRow a;
  a.oth_us = 1000;
  SweepRow b;
  b.oth_us = 2000;
  b.feasible = true;
  b.objective = 12.5;
  b.total_throughput_mbps = 100.25;
  const std::vector<SweepRow> rows{a, b};
  CHECK(sweep_csv(rows) ==
        "oth,objective,total_throughput,feasible,plateau\n"
        "1000,-inf,0.0000,false,false\n"
        "2000,12.500000,100.2500,true,false\n");
}

TEST_CASE("atomic write") {
  const auto dir = std::filesystem::temp_directory_path() / "twtsched_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.txt";
  write_file_atomic(path, "first\n");
  write_file_atomic(path, "second\n");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "second");
  CHECK_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
  CHECK_THROWS_AS(write_file_atomic(dir / "missing" / "x.txt", "x"), Error);
  std::filesystem::remove_all(dir);
}
