#include "sentmark/partition.hpp"

#include <stdexcept>

#include "sentmark/prng.hpp"

namespace sentmark {

std::vector<std::uint32_t> RegionPartition::valid_signatures() const {
  std::vector<std::uint32_t> out;
  out.reserve(valid_count);
  for (std::uint32_t i = 0; i < valid_mask.size(); ++i) {
    if (valid_mask[i]) out.push_back(i);
  }
  return out;
}

RegionPartition mask_regions(const Signature& prev_sig, std::uint64_t prime,
                             double gamma, int d) {
  if (d < 1 || d > 24) {
    throw std::invalid_argument("mask_regions: d must be in [1, 24]");
  }
  if (gamma <= 0.0 || gamma >= 1.0) {
    throw std::invalid_argument("mask_regions: gamma must be in (0, 1)");
  }
  if (prev_sig.size() != d) {
    throw std::invalid_argument("mask_regions: signature length mismatch");
  }
  const std::uint32_t n = 1u << d;
  if (gamma * static_cast<double>(n) < 1.0) {
    throw std::invalid_argument("mask_regions: empty valid set");
  }
  const int n_valid = round_half_up(gamma * static_cast<double>(n));

  const std::uint64_t seed =
      mask_seed(static_cast<std::uint64_t>(signature_to_decimal(prev_sig)) *
                prime);
  const std::vector<std::uint32_t> order = shuffled_indices(n, seed);

  RegionPartition part;
  part.seed_used = seed;
  part.valid_count = n_valid;
  part.valid_mask.assign(n, false);
  for (int i = 0; i < n_valid; ++i) {
    part.valid_mask[order[i]] = true;
  }
  return part;
}

bool is_valid(const Signature& sig, const RegionPartition& partition) {
  const std::uint32_t dec = signature_to_decimal(sig);
  if (dec >= partition.valid_mask.size()) {
    throw std::invalid_argument("is_valid: signature length mismatch");
  }
  return partition.valid_mask[dec];
}

}  // namespace sentmark
