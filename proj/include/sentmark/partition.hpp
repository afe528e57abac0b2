#pragma once

#include <cstdint>
#include <vector>

#include "sentmark/lsh.hpp"

namespace sentmark {

// Per-step pseudorandom split of the 2^d signature space into valid and
// blocked region sets, seeded by the previous sentence's signature.
struct RegionPartition {
  std::vector<bool> valid_mask;  // indexed by decimal signature
  int valid_count = 0;
  std::uint64_t seed_used = 0;

  int total() const { return static_cast<int>(valid_mask.size()); }
  int blocked_count() const { return total() - valid_count; }

  // Sorted decimal signatures of the valid set.
  std::vector<std::uint32_t> valid_signatures() const;
};

// seed = mask_seed(decimal(prev_sig) * prime); Fisher-Yates over the 2^d
// signatures under that seed; the first round-half-up(gamma * 2^d) ids form
// the valid set. Pure function of its inputs, so generation and detection
// recompute identical partitions.
//
// Throws std::invalid_argument when gamma * 2^d < 1 (empty valid set) or
// gamma is outside (0, 1).
RegionPartition mask_regions(const Signature& prev_sig, std::uint64_t prime,
                             double gamma, int d);

bool is_valid(const Signature& sig, const RegionPartition& partition);

}  // namespace sentmark
