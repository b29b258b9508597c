// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "twtsched/airtime_sim.hpp"
#include "twtsched/io.hpp"
#include "twtsched/optimizer.hpp"

using namespace twt;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > limit_s) {
    out.pass = false;
    out.detail += " [over time limit of " + std::to_string(limit_s) + " s]";
  }
  if (!out.pass) ++failures;
  std::printf("%s  %-28s %7.2fs  %s\n", out.pass ? "PASS" : "FAIL", name, secs, out.detail.c_str());
  std::fflush(stdout);
}

std::shared_ptr<const ThroughputTable> one_mcs_table() {
  return std::make_shared<const ThroughputTable>(generate_synthetic_table(
      SyntheticModelParams::defaults(), default_aa_set(), default_mf_set(), {7}));
}

Outcome grid_cardinality() {
  const auto tuples = grid_tuples(*one_mcs_table());
  std::set<std::pair<std::int64_t, std::int64_t>> shapes;
  for (const auto& t : tuples) {
    const auto s = schedule_from_tuple(t);
    shapes.insert({s.waketime_us, s.sleeptime_us});
  }
  std::ostringstream d;
  d << tuples.size() << " tuples, " << shapes.size() << " distinct schedules";
  return {tuples.size() == 378 && shapes.size() == 378, d.str()};
}

Outcome quantization_suite() {
  int ok = 0;
  double worst = 0.0;
  for (const auto& t : grid_tuples(*one_mcs_table())) {
    const auto s = schedule_from_tuple(t);
    const double drift = std::abs(aa_of(s) - t.aa_percent);
    worst = std::max(worst, drift);
    const bool good = s.waketime_us % 256 == 0 && s.waketime_us >= 256 && s.waketime_us <= 65280 &&
                      oracle::exactly_encodable_by_scan(s.sleeptime_us) && drift <= 1.0 &&
                      validate_schedule(s).empty();
    ok += good;
  }
  std::ostringstream d;
  d << ok << "/378 valid, worst AA drift " << worst << " pp";
  return {ok == 378, d.str()};
}

Outcome overlap_oracle() {
  std::mt19937_64 rng(20240501);
  int matched = 0, sets = 0;
  std::int64_t overlap_seen = 0;
  while (sets < 100) {
    const int n = 2 + sets % 5;
    const auto cs = oracle::random_schedule_set(rng, n);
    const auto brute = oracle::replay(cs);
    std::map<ClientId, double> rates;
    for (const auto& c : cs) rates[c.id] = 4.0 + c.mcs;
    const auto rep = overlap_loss(expand_intervals(cs), rates);
    bool same = rep.idle_us == brute.idle && rep.total_overlap_us == brute.overlap;
    for (const auto& c : cs) {
      const auto& b = brute.per_client.at(c.id);
      const auto& g = rep.per_client.at(c.id);
      same = same && g.wake_us == b.wake && g.lost_us == b.wake - b.won &&
             g.loss_mbps == loss_from_counts(rates[c.id], b.wake - b.won, b.wake);
    }
    overlap_seen += brute.overlap;
    matched += same;
    ++sets;
  }
  std::ostringstream d;
  d << matched << "/100 sets exact, " << overlap_seen << " contested us in total";
  return {matched == 100 && overlap_seen > 0, d.str()};
}

Outcome solver_exactness() {
  std::mt19937_64 rng(8675309);
  int matched = 0, feasible = 0;
  for (int i = 0; i < 50; ++i) {
    const auto spec = oracle::random_small_instance(rng);
    const auto expect = oracle::enumerate(spec);
    const auto got = solve(spec);
    const bool same = got.feasible == expect.feasible && (!expect.feasible || got.objective == expect.objective);
    matched += same;
    feasible += expect.feasible;
  }
  std::ostringstream d;
  d << matched << "/50 instances match enumeration (" << feasible << " feasible)";
  return {matched == 50 && feasible > 0, d.str()};
}

std::vector<std::int64_t> deployment_oths() {
  std::vector<std::int64_t> v;
  for (std::int64_t o = 1000; o <= 12000; o += 1000) v.push_back(o);
  return v;
}

const std::vector<SweepRow>& deployment_sweep() {
  static const auto rows = [] {
    const auto spec = fixture::deployment_instance();
    const auto oths = deployment_oths();
    return oth_sweep(spec, oths);
  }();
  return rows;
}

Outcome oth_behavior() {
  const auto& rows = deployment_sweep();
  std::size_t first_feasible = rows.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].feasible) {
      first_feasible = i;
      break;
    }
  }
  bool threshold = first_feasible > 0 && first_feasible < rows.size();
  for (std::size_t i = first_feasible; i < rows.size(); ++i) threshold = threshold && rows[i].feasible;
  bool monotone = true;
  int plateaus = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    monotone = monotone && rows[i].objective >= rows[i - 1].objective;
    plateaus += rows[i].plateau;
  }
  std::ostringstream d;
  d << "OTh* = " << (first_feasible < rows.size() ? rows[first_feasible].oth_us : -1) << " us, monotone "
    << (monotone ? "yes" : "no") << ", " << plateaus << " plateau rows";
  return {threshold && monotone && plateaus >= 1, d.str()};
}

Outcome symmetry() {
  int checked = 0, equal = 0;
  for (const auto& r : deployment_sweep()) {
    if (!r.feasible) continue;
    ++checked;
    const auto* a = r.solution.find(4);
    const auto* b = r.solution.find(5);
    equal += a && b && a->t_effective_mbps == b->t_effective_mbps;
  }
  std::ostringstream d;
  d << "clients 4 and 5 equal in " << equal << "/" << checked << " feasible solutions";
  return {checked > 0 && equal == checked, d.str()};
}

Outcome homogeneity() {
  int cases = 0, uniform = 0;
  for (int n : {2, 3, 4, 5}) {
    for (int mcs : {3, 7, 10}) {
      ProblemSpec spec;
      for (int i = 0; i < n; ++i) {
        ClientSpec c;
        c.id = static_cast<ClientId>(i + 1);
        c.mcs = mcs;
        c.direction = Direction::downlink;
        c.t_th_mbps = 2.0;
        spec.clients.push_back(c);
      }
      spec.table = fixture::synthetic_table();
      spec.oth_us = 0;
      const auto sol = solve(spec);
      if (!sol.feasible) continue;
      ++cases;
      bool same = true;
      for (const auto& a : sol.per_client) same = same && a.tuple == sol.per_client.front().tuple;
      uniform += same;
    }
  }
  std::ostringstream d;
  d << uniform << "/" << cases << " feasible instances use one tuple for all clients";
  return {cases == 12 && uniform == cases, d.str()};
}

Outcome sim_agreement() {
  std::mt19937_64 rng(4242);
  const auto table = fixture::synthetic_table();
  const auto grid = grid_tuples(*table);
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
  std::uniform_int_distribution<int> mcs(0, 11);
  std::uniform_int_distribution<std::int64_t> jitter(0, 40000);
  int matched = 0;
  for (int i = 0; i < 20; ++i) {
    std::vector<TupleScheduledClient> cs;
    std::int64_t offset = 0;
    const int n = 2 + i % 5;
    for (int k = 0; k < n; ++k) {
      const auto t = grid[pick(rng)];
      auto s = schedule_from_tuple(t);
      // Half the sets keep the round-robin layout, half are shifted to overlap.
      s.offset_us = i % 2 == 0 ? offset : jitter(rng);
      offset += s.waketime_us;
      cs.push_back({static_cast<ClientId>(k + 1), mcs(rng), t, s});
    }
    const auto sim = simulate_twt(cs, *table);
    const auto rep = effective_throughputs(cs, *table);
    bool same = sim.idle_us == rep.idle_us;
    for (const auto& c : cs) {
      const auto& st = sim.per_client.at(c.id);
      const auto& r = rep.per_client.at(c.id);
      same = same && st.airtime_us == r.won_us && st.wake_us == r.wake_us;
    }
    matched += same;
  }
  std::ostringstream d;
  d << matched << "/20 schedule sets agree to the us";
  return {matched == 20, d.str()};
}

Outcome csma_fairness() {
  // Backoff capture makes shares converge slowly; see README.
  constexpr std::int64_t kHorizon = 3600'000'000;
  int runs = 0, fair = 0;
  double worst = 0.0;
  for (int n : {2, 4, 6}) {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
      std::vector<CsmaStation> st;
      for (int i = 0; i < n; ++i) st.push_back({static_cast<ClientId>(i + 1), 7, true});
      DcfParams p;
      p.rng_seed = seed;
      const auto r = simulate_csma(st, p, kHorizon);
      std::int64_t wins = 0;
      for (const auto& [id, s] : r.per_client) wins += s.wins;
      bool ok = wins > 0;
      for (const auto& [id, s] : r.per_client) {
        const double rel = std::abs(static_cast<double>(s.wins) / wins * n - 1.0);
        worst = std::max(worst, rel);
        ok = ok && rel <= 0.05;
      }
      ++runs;
      fair += ok;
    }
  }
  std::ostringstream d;
  d << fair << "/" << runs << " runs within 5% of 1/n over " << kHorizon / 1'000'000 << " s, worst deviation "
    << worst * 100 << "%";
  return {fair == runs, d.str()};
}

Outcome determinism() {
  int checked = 0, identical = 0;
  for (std::int64_t oth : {2000, 6000, 10000}) {
    const auto spec = fixture::deployment_instance(oth);
    const auto ref = solution_to_json(solve(spec, {1, false}), spec).dump();
    for (int threads : {2, 8}) {
      ++checked;
      identical += solution_to_json(solve(spec, {threads, false}), spec).dump() == ref;
    }
  }
  std::ostringstream d;
  d << identical << "/" << checked << " multi-thread solves byte-identical to the serial one";
  return {identical == checked, d.str()};
}

}  // namespace

int main() {
  run("grid_cardinality", 1, grid_cardinality);
  run("quantization_suite", 1, quantization_suite);
  run("overlap_oracle", 30, overlap_oracle);
  run("solver_exactness", 60, solver_exactness);
  run("oth_behavior", 300, oth_behavior);
  run("symmetry", 300, symmetry);
  run("homogeneity", 300, homogeneity);
  run("sim_analysis_agreement", 30, sim_agreement);
  run("csma_fairness", 120, csma_fairness);
  run("determinism", 300, determinism);
  std::printf("%s: %d failing\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
