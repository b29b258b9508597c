#include "twtsched/throughput_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>

#include "twtsched/error.hpp"

namespace twt {
namespace {

constexpr double kKeyEps = 1e-9;
constexpr const char* kHeader = "mcs,aa_percent,mf,throughput_mbps";

std::optional<std::size_t> find_near(const std::vector<double>& set, double v) {
  const auto it = std::lower_bound(set.begin(), set.end(), v - kKeyEps);
  if (it != set.end() && std::abs(*it - v) <= kKeyEps) {
    return static_cast<std::size_t>(it - set.begin());
  }
  return std::nullopt;
}

std::vector<double> unique_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v) {
    if (out.empty() || std::abs(out.back() - x) > kKeyEps) out.push_back(x);
  }
  return out;
}

std::string key_text(int mcs, double aa, double mf) {
  std::ostringstream os;
  os << "(mcs " << mcs << ", aa " << aa << ", mf " << mf << ")";
  return os.str();
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  if (field.empty()) return false;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), out);
  return res.ec == std::errc{} && res.ptr == field.data() + field.size();
}

}  // namespace

ThroughputTable ThroughputTable::from_entries(const std::vector<TableEntry>& entries) {
  if (entries.empty()) throw SparseTableError("throughput table has no entries");

  std::vector<int> mcs;
  std::vector<double> aa;
  std::vector<double> mf;
  for (const auto& e : entries) {
    if (e.mcs < kMinMcs || e.mcs > kMaxMcs) {
      throw DomainError("MCS index " + std::to_string(e.mcs) + " outside 0-11");
    }
    if (!(e.aa_percent > 0.0 && e.aa_percent < 100.0)) {
      throw DomainError("AA " + shortest(e.aa_percent) + " outside (0, 100)");
    }
    if (!(e.mf >= kMinMf && e.mf <= kMaxMf)) {
      throw DomainError("MF " + shortest(e.mf) + " outside [1, 255]");
    }
    if (!(e.throughput_mbps >= 0.0) || !std::isfinite(e.throughput_mbps)) {
      throw DomainError("throughput at " + key_text(e.mcs, e.aa_percent, e.mf) + " is negative or not finite");
    }
    mcs.push_back(e.mcs);
    aa.push_back(e.aa_percent);
    mf.push_back(e.mf);
  }
  std::sort(mcs.begin(), mcs.end());
  mcs.erase(std::unique(mcs.begin(), mcs.end()), mcs.end());

  ThroughputTable t;
  t.mcs_set_ = std::move(mcs);
  t.aa_set_ = unique_sorted(std::move(aa));
  t.mf_set_ = unique_sorted(std::move(mf));
  const std::size_t cells = t.mcs_set_.size() * t.aa_set_.size() * t.mf_set_.size();
  t.values_.assign(cells, 0.0);
  std::vector<bool> filled(cells, false);

  for (const auto& e : entries) {
    const std::size_t mi = *t.mcs_index(e.mcs);
    const std::size_t ai = *t.aa_index(e.aa_percent);
    const std::size_t fi = *t.mf_index(e.mf);
    const std::size_t idx = (mi * t.aa_set_.size() + ai) * t.mf_set_.size() + fi;
    if (filled[idx]) {
      throw DuplicateKeyError("duplicate table key " + key_text(e.mcs, e.aa_percent, e.mf));
    }
    filled[idx] = true;
    t.values_[idx] = e.throughput_mbps;
  }
  for (std::size_t mi = 0; mi < t.mcs_set_.size(); ++mi) {
    for (std::size_t ai = 0; ai < t.aa_set_.size(); ++ai) {
      for (std::size_t fi = 0; fi < t.mf_set_.size(); ++fi) {
        if (!filled[(mi * t.aa_set_.size() + ai) * t.mf_set_.size() + fi]) {
          throw SparseTableError("missing table key " +
                                 key_text(t.mcs_set_[mi], t.aa_set_[ai], t.mf_set_[fi]));
        }
      }
    }
  }
  return t;
}

std::optional<std::size_t> ThroughputTable::mcs_index(int mcs) const {
  const auto it = std::lower_bound(mcs_set_.begin(), mcs_set_.end(), mcs);
  if (it != mcs_set_.end() && *it == mcs) return static_cast<std::size_t>(it - mcs_set_.begin());
  return std::nullopt;
}

std::optional<std::size_t> ThroughputTable::aa_index(double aa) const { return find_near(aa_set_, aa); }
std::optional<std::size_t> ThroughputTable::mf_index(double mf) const { return find_near(mf_set_, mf); }

double ThroughputTable::lookup(int mcs, const ScheduleTuple& tuple) const {
  const auto mi = mcs_index(mcs);
  const auto ai = aa_index(tuple.aa_percent);
  const auto fi = mf_index(tuple.mf);
  if (!mi || !ai || !fi) {
    throw LookupError("no table entry for " + key_text(mcs, tuple.aa_percent, tuple.mf));
  }
  return at(*mi, *ai, *fi);
}

std::vector<TableEntry> ThroughputTable::entries() const {
  std::vector<TableEntry> out;
  out.reserve(values_.size());
  for (std::size_t mi = 0; mi < mcs_set_.size(); ++mi) {
    for (std::size_t ai = 0; ai < aa_set_.size(); ++ai) {
      for (std::size_t fi = 0; fi < mf_set_.size(); ++fi) {
        out.push_back({mcs_set_[mi], aa_set_[ai], mf_set_[fi], at(mi, ai, fi)});
      }
    }
  }
  return out;
}

ThroughputTable parse_table(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<TableEntry> entries;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      // Tolerate a UTF-8 byte order mark.
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (line != kHeader) {
        throw ParseError(std::string("expected header '") + kHeader + "'", line_no);
      }
      have_header = true;
      continue;
    }
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 4) {
      throw ParseError("expected 4 fields, found " + std::to_string(fields.size()), line_no);
    }
    TableEntry e;
    if (!parse_number(fields[0], e.mcs) || !parse_number(fields[1], e.aa_percent) ||
        !parse_number(fields[2], e.mf) || !parse_number(fields[3], e.throughput_mbps)) {
      throw ParseError("malformed row '" + line + "'", line_no);
    }
    entries.push_back(e);
  }
  if (!have_header) throw ParseError("empty table file");
  if (entries.empty()) throw ParseError("table file has a header but no rows");
  return ThroughputTable::from_entries(entries);
}

ThroughputTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open table file " + path.string());
  return parse_table(in);
}

void save_table(const ThroughputTable& table, std::ostream& out) {
  out << kHeader << '\n';
  for (const auto& e : table.entries()) {
    out << e.mcs << ',' << shortest(e.aa_percent) << ',' << shortest(e.mf) << ','
        << shortest(e.throughput_mbps) << '\n';
  }
}

SyntheticModelParams SyntheticModelParams::defaults() {
  SyntheticModelParams p;
  p.phy_rate_mbps = {{0, 8.6},   {1, 17.2},  {2, 25.8},  {3, 34.4},  {4, 51.6},   {5, 68.8},
                     {6, 77.4},  {7, 86.0},  {8, 103.2}, {9, 114.7}, {10, 129.0}, {11, 143.4}};
  return p;
}

void SyntheticModelParams::validate() const {
  if (!(beta >= 0.0)) throw DomainError("beta must be >= 0");
  if (!(gamma >= 1.0)) throw DomainError("gamma must be >= 1");
  double prev = -1.0;
  for (const auto& [mcs, rate] : phy_rate_mbps) {
    if (mcs < kMinMcs || mcs > kMaxMcs) throw DomainError("PHY rate given for MCS " + std::to_string(mcs));
    if (!(rate > prev)) throw DomainError("PHY rates must be strictly increasing in MCS");
    prev = rate;
  }
}

ThroughputTable generate_synthetic_table(const SyntheticModelParams& params,
                                         const std::vector<double>& aa_set,
                                         const std::vector<double>& mf_set,
                                         const std::vector<int>& mcs_set) {
  params.validate();
  std::vector<TableEntry> entries;
  entries.reserve(aa_set.size() * mf_set.size() * mcs_set.size());
  for (int mcs : mcs_set) {
    const auto it = params.phy_rate_mbps.find(mcs);
    if (it == params.phy_rate_mbps.end()) {
      throw DomainError("no PHY rate configured for MCS " + std::to_string(mcs));
    }
    for (double aa : aa_set) {
      const double share = aa / 100.0;
      for (double mf : mf_set) {
        const double penalty = std::max(0.0, 1.0 - params.beta * (mf - 1.0) * std::pow(share, params.gamma));
        entries.push_back({mcs, aa, mf, it->second * share * penalty});
      }
    }
  }
  return ThroughputTable::from_entries(entries);
}

std::vector<double> default_aa_set() {
  std::vector<double> out;
  for (int aa = 10; aa <= 95; aa += 5) out.push_back(aa);
  return out;
}

std::vector<double> default_mf_set() {
  return {1, 1.25, 1.5, 1.7, 1.9, 2, 2.5, 3, 4, 5, 6, 8, 10, 12.75, 15, 17, 20, 25.5, 30, 40, 51};
}

}  // namespace twt
