#pragma once

// Discrete throughput surface T(MCS, AA, MF) used in place of an analytical
// throughput model. Tables are dense over mcs_set x aa_set x mf_set and are
// never interpolated.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "twtsched/schedule.hpp"

namespace twt {

inline constexpr int kMinMcs = 0;
inline constexpr int kMaxMcs = 11;

struct TableEntry {
  int mcs = 0;
  double aa_percent = 0.0;
  double mf = 1.0;
  double throughput_mbps = 0.0;
};

class ThroughputTable {
 public:
  ThroughputTable() = default;

  /// Builds a dense table; throws DuplicateKeyError / SparseTableError /
  /// DomainError on malformed content.
  static ThroughputTable from_entries(const std::vector<TableEntry>& entries);

  /// Exact stored value. Throws LookupError for any key off the grid.
  double lookup(int mcs, const ScheduleTuple& tuple) const;
  double at(std::size_t mcs_idx, std::size_t aa_idx, std::size_t mf_idx) const {
    return values_[(mcs_idx * aa_set_.size() + aa_idx) * mf_set_.size() + mf_idx];
  }

  std::optional<std::size_t> mcs_index(int mcs) const;
  std::optional<std::size_t> aa_index(double aa) const;
  std::optional<std::size_t> mf_index(double mf) const;

  const std::vector<int>& mcs_set() const noexcept { return mcs_set_; }
  const std::vector<double>& aa_set() const noexcept { return aa_set_; }
  const std::vector<double>& mf_set() const noexcept { return mf_set_; }
  std::size_t tuples_per_mcs() const noexcept { return aa_set_.size() * mf_set_.size(); }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  /// Entries in (mcs, aa, mf) ascending order.
  std::vector<TableEntry> entries() const;

  friend bool operator==(const ThroughputTable&, const ThroughputTable&) = default;

 private:
  std::vector<int> mcs_set_;
  std::vector<double> aa_set_;
  std::vector<double> mf_set_;
  std::vector<double> values_;
};

/// CSV with the header `mcs,aa_percent,mf,throughput_mbps`.
ThroughputTable parse_table(std::istream& in);
ThroughputTable load_table(const std::filesystem::path& path);
void save_table(const ThroughputTable& table, std::ostream& out);

/// Stand-in for a measured surface:
///   T = phy(mcs) * aa/100 * max(0, 1 - beta * (mf - 1) * (aa/100)^gamma)
/// i.e. linear in AA at MF 1, with a drop-off at high MF that steepens with AA.
struct SyntheticModelParams {
  std::map<int, double> phy_rate_mbps;
  double beta = 0.01;
  double gamma = 2.0;

  /// HE 20 MHz single-stream rates (0.8 µs GI) for MCS 0-11.
  static SyntheticModelParams defaults();
  void validate() const;
};

ThroughputTable generate_synthetic_table(const SyntheticModelParams& params,
                                         const std::vector<double>& aa_set,
                                         const std::vector<double>& mf_set,
                                         const std::vector<int>& mcs_set);

/// AA in {10, 15, ..., 95}.
std::vector<double> default_aa_set();
/// 21 multiplication factors between 1 and 51.
std::vector<double> default_mf_set();

}  // namespace twt
