// twt-sched: table generation, schedule synthesis, OTh sweeps, simulation and
// wake interval encoding from the command line.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "twtsched/airtime_sim.hpp"
#include "twtsched/error.hpp"
#include "twtsched/io.hpp"
#include "twtsched/optimizer.hpp"
#include "twtsched/schedule.hpp"
#include "twtsched/throughput_table.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInfeasible = 2;

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    twt::write_file_atomic(out_path, content);
  }
}

int threads_from_env() {
  const char* raw = std::getenv("TWT_SCHED_THREADS");
  if (!raw || !*raw) return 0;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (*end != '\0' || v < 0) throw twt::ConfigError("TWT_SCHED_THREADS must be a non-negative integer");
  return static_cast<int>(v);
}

struct ProblemFlags {
  std::string clients;
  std::string table;
  double max_mf = twt::kDefaultMaxMf;
  bool refine = false;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--clients", clients, "Clients JSON file")->required();
    cmd.add_option("--table", table, "Throughput table CSV")->required();
    cmd.add_option("--max-mf", max_mf, "Largest multiplication factor (C)");
    cmd.add_flag("--heuristic-refine", refine, "Coarse-to-fine search (not guaranteed optimal)");
  }

  twt::ProblemSpec load(std::int64_t oth) const {
    twt::ProblemSpec spec;
    spec.clients = twt::load_clients(clients);
    spec.table = std::make_shared<const twt::ThroughputTable>(twt::load_table(table));
    spec.oth_us = oth;
    spec.max_mf = max_mf;
    spec.validate();
    return spec;
  }

  twt::SolveOptions options() const { return {threads_from_env(), refine}; }
};

int run_solve(const ProblemFlags& flags, std::int64_t oth, const std::string& out) {
  const auto spec = flags.load(oth);
  const auto sol = twt::solve(spec, flags.options());
  emit(out, twt::solution_to_json(sol, spec).dump(2) + "\n");
  if (!sol.feasible) {
    std::cerr << "infeasible: " << sol.infeasibility_reason << '\n';
    return kExitInfeasible;
  }
  return kExitOk;
}

int run_sweep(const ProblemFlags& flags, std::int64_t lo, std::int64_t hi, std::int64_t step,
              const std::string& out) {
  if (step <= 0 || lo < 0 || hi < lo) throw twt::ConfigError("sweep needs 0 <= oth-min <= oth-max and step > 0");
  std::vector<std::int64_t> values;
  for (std::int64_t v = lo; v <= hi; v += step) values.push_back(v);
  const auto spec = flags.load(lo);
  emit(out, twt::sweep_csv(twt::oth_sweep(spec, values, flags.options())));
  return kExitOk;
}

int run_simulate(const std::string& solution_path, const std::string& clients_path, const std::string& table_path,
                 std::uint64_t seed, std::int64_t horizon_s, const std::string& format, const std::string& out) {
  if (horizon_s <= 0) throw twt::ConfigError("--horizon-s must be positive");
  twt::ProblemSpec spec;
  spec.clients = twt::load_clients(clients_path);
  const auto sol = twt::load_solution(solution_path);
  twt::DcfParams params;
  if (!table_path.empty()) params = twt::DcfParams::from_table(twt::load_table(table_path));
  params.rng_seed = seed;
  const auto report = twt::compare(spec, sol, params, horizon_s * 1'000'000);
  if (format == "json") {
    emit(out, twt::comparison_to_json(report).dump(2) + "\n");
  } else {
    emit(out, twt::comparison_csv(report));
  }
  return kExitOk;
}

std::vector<double> split_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw twt::ConfigError("bad number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

int run_gen_table(const std::vector<int>& mcs, double beta, double gamma, const std::string& phy_rates,
                  const std::string& out) {
  auto params = twt::SyntheticModelParams::defaults();
  params.beta = beta;
  params.gamma = gamma;
  if (!phy_rates.empty()) {
    const auto rates = split_doubles(phy_rates);
    if (rates.size() != 12) throw twt::ConfigError("--phy-rates needs 12 values (MCS 0-11)");
    params.phy_rate_mbps.clear();
    for (int i = 0; i < 12; ++i) params.phy_rate_mbps[i] = rates[i];
  }
  const auto table = twt::generate_synthetic_table(params, twt::default_aa_set(), twt::default_mf_set(), mcs);
  std::ostringstream os;
  twt::save_table(table, os);
  emit(out, os.str());
  return kExitOk;
}

void print_schedule(const twt::TwtSchedule& s) {
  std::printf("WT=%lld us\nST=%lld us\noffset=%lld us\n", static_cast<long long>(s.waketime_us),
              static_cast<long long>(s.sleeptime_us), static_cast<long long>(s.offset_us));
  if (s.sleeptime_us >= 1) {
    try {
      const auto enc = twt::encode_wake_interval(s.sleeptime_us);
      std::printf("mantissa=%u\nexponent=%d\n", enc.mantissa, enc.exponent);
    } catch (const twt::UnencodableError&) {
      std::printf("mantissa=n/a\nexponent=n/a\n");
    }
  } else {
    std::printf("mantissa=n/a\nexponent=n/a\n");
  }
  if (s.cycle_us() > 0) std::printf("achieved_aa=%.4f %%\n", twt::aa_of(s));
}

int run_encode(CLI::Option* aa_opt, double aa, double mf, CLI::Option* wt_opt, std::int64_t wt, std::int64_t st,
               std::int64_t offset) {
  twt::TwtSchedule s;
  if (aa_opt->count() > 0) {
    s = twt::schedule_from_tuple({aa, mf});
    s.offset_us = offset;
  } else if (wt_opt->count() > 0) {
    s = {wt, st, offset};
  } else {
    throw twt::ConfigError("encode needs --aa/--mf or --wt/--st");
  }
  print_schedule(s);
  const auto violations = twt::validate_schedule(s);
  if (violations.empty()) {
    std::printf("valid=yes\n");
    return kExitOk;
  }
  std::printf("valid=no\n");
  for (auto v : violations) std::printf("violation: %s\n", twt::to_string(v).c_str());
  return kExitInputError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TWT schedule synthesis and airtime simulation"};
  app.require_subcommand(1);

  ProblemFlags solve_flags;
  std::int64_t oth = 0;
  std::string solve_out;
  auto* solve_cmd = app.add_subcommand("solve", "Compute the proportionally fair TWT schedule");
  solve_flags.add_to(*solve_cmd);
  solve_cmd->add_option("--oth", oth, "Overlap threshold in us")->required();
  solve_cmd->add_option("--out", solve_out, "Solution JSON path (default stdout)");

  ProblemFlags sweep_flags;
  std::int64_t oth_min = 0, oth_max = 0, step = 1000;
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "Solve across a range of overlap thresholds");
  sweep_flags.add_to(*sweep_cmd);
  sweep_cmd->add_option("--oth-min", oth_min, "First OTh in us")->required();
  sweep_cmd->add_option("--oth-max", oth_max, "Last OTh in us")->required();
  sweep_cmd->add_option("--step", step, "OTh increment in us")->required();
  sweep_cmd->add_option("--out", sweep_out, "CSV path (default stdout)");

  std::string sim_solution, sim_clients, sim_table, sim_format = "csv", sim_out;
  std::uint64_t seed = 1;
  std::int64_t horizon_s = 1;
  auto* sim_cmd = app.add_subcommand("simulate", "Compare CSMA/CA against the TWT deployment");
  sim_cmd->add_option("--solution", sim_solution, "Solution JSON from 'solve'")->required();
  sim_cmd->add_option("--clients", sim_clients, "Clients JSON file")->required();
  sim_cmd->add_option("--table", sim_table, "Throughput table used to size CSMA frames");
  sim_cmd->add_option("--seed", seed, "Backoff RNG seed");
  sim_cmd->add_option("--horizon-s", horizon_s, "Simulated seconds");
  sim_cmd->add_option("--format", sim_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sim_cmd->add_option("--out", sim_out, "Report path (default stdout)");

  std::vector<int> mcs;
  double beta = twt::SyntheticModelParams{}.beta;
  double gamma = twt::SyntheticModelParams{}.gamma;
  std::string phy_rates, gen_out;
  auto* gen_cmd = app.add_subcommand("gen-table", "Write a synthetic throughput table");
  gen_cmd->add_option("--mcs", mcs, "MCS indices")->required()->delimiter(',');
  gen_cmd->add_option("--beta", beta, "High-MF penalty slope");
  gen_cmd->add_option("--gamma", gamma, "AA exponent of the MF penalty");
  gen_cmd->add_option("--phy-rates", phy_rates, "12 comma-separated rates in Mbps for MCS 0-11");
  gen_cmd->add_option("--out", gen_out, "CSV path (default stdout)");

  double aa = 0.0, mf = 1.0;
  std::int64_t wt = 0, st = 0, offset = 0;
  auto* enc_cmd = app.add_subcommand("encode", "Quantize and encode one schedule");
  auto* aa_opt = enc_cmd->add_option("--aa", aa, "Active airtime in percent");
  auto* mf_opt = enc_cmd->add_option("--mf", mf, "Multiplication factor");
  auto* wt_opt = enc_cmd->add_option("--wt", wt, "Waketime in us");
  auto* st_opt = enc_cmd->add_option("--st", st, "Sleeptime in us");
  enc_cmd->add_option("--offset", offset, "Offset in us");
  aa_opt->needs(mf_opt);
  mf_opt->needs(aa_opt);
  wt_opt->needs(st_opt);
  st_opt->needs(wt_opt);
  aa_opt->excludes(wt_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*solve_cmd) return run_solve(solve_flags, oth, solve_out);
    if (*sweep_cmd) return run_sweep(sweep_flags, oth_min, oth_max, step, sweep_out);
    if (*sim_cmd) return run_simulate(sim_solution, sim_clients, sim_table, seed, horizon_s, sim_format, sim_out);
    if (*gen_cmd) return run_gen_table(mcs, beta, gamma, phy_rates, gen_out);
    if (*enc_cmd) return run_encode(aa_opt, aa, mf, wt_opt, wt, st, offset);
  } catch (const twt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}
