#pragma once

#include <cstdint>

namespace dbmd {

// Coordinator-side tally of matrix entries moved per direction. Each round
// counts one aggregated collection and one broadcast of the same shape, no
// matter how many workers contributed; the initial distribution of the data
// and the coefficient phase are local and never counted.
struct CommLedger {
  std::uint64_t broadcast_entries = 0;  // coordinator -> workers
  std::uint64_t collect_entries = 0;    // workers -> coordinator
  std::uint64_t agd_rounds = 0;
  std::uint64_t admm_rounds = 0;
  std::uint64_t cease_rounds = 0;

  void add_broadcast(std::uint64_t entries) { broadcast_entries += entries; }
  void add_collect(std::uint64_t entries) { collect_entries += entries; }
  std::uint64_t total_entries() const {
    return broadcast_entries + collect_entries;
  }
};

}  // namespace dbmd
