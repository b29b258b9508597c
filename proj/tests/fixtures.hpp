#pragma once

#include <memory>
#include <string>

#include "twtsched/io.hpp"
#include "twtsched/optimizer.hpp"
#include "twtsched/throughput_table.hpp"

namespace fixture {

inline std::string data_path(const std::string& name) { return std::string(TWTSCHED_DATA_DIR) + "/" + name; }

inline std::shared_ptr<const twt::ThroughputTable> synthetic_table() {
  static const auto table = std::make_shared<const twt::ThroughputTable>(twt::generate_synthetic_table(
      twt::SyntheticModelParams::defaults(), twt::default_aa_set(), twt::default_mf_set(),
      {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}));
  return table;
}

/// Six clients shaped like the deployment table: four TWT-capable, one
/// best-effort uplink legacy client and one protected downlink legacy client.
inline twt::ProblemSpec deployment_instance(std::int64_t oth_us = 10000) {
  twt::ProblemSpec spec;
  spec.clients = twt::load_clients(data_path("deployment_clients.json"));
  spec.table = synthetic_table();
  spec.oth_us = oth_us;
  return spec;
}

}  // namespace fixture
