#pragma once

#include <cstdint>
#include <vector>

#include "sentmark/embedding.hpp"

namespace sentmark {

// d-bit region signature. bits[0] is the most significant digit of the
// decimal cast; both sides of detection rely on that convention.
struct Signature {
  std::vector<std::uint8_t> bits;

  bool operator==(const Signature& other) const = default;
  int size() const { return static_cast<int>(bits.size()); }
};

// Keyed random-hyperplane LSH. The d Gaussian normals are re-derived from
// (key, d, dim) wherever needed and never serialized, so the watermark key
// stays the single secret.
class LshHyperplanes {
 public:
  // Normals drawn from a Box-Muller gaussian stream seeded by the key,
  // filled row-major. 1 <= d <= 24, dim >= 2.
  LshHyperplanes(std::uint64_t key, int d, int dim);

  int d() const { return d_; }
  int dim() const { return dim_; }
  std::uint64_t key() const { return key_; }
  // Normal vector for digit i (0-based).
  const Vec& normal(int i) const { return normals_[i]; }

 private:
  std::uint64_t key_;
  int d_;
  int dim_;
  std::vector<Vec> normals_;
};

// Digit i is 1 iff normal(i) . v > 0; an exact zero maps to 0. Throws on
// dimension mismatch.
Signature signature_of(const Vec& v, const LshHyperplanes& planes);

// Decimal cast with bits[0] as MSB: [1,0,1] -> 5.
std::uint32_t signature_to_decimal(const Signature& sig);

// min over i of |cos(v, normal(i))|; the distance-to-boundary proxy used by
// the rejection margin.
double min_abs_cos(const Vec& v, const LshHyperplanes& planes);

// Strict margin test: min_abs_cos(v) > m.
bool margin_satisfied(const Vec& v, const LshHyperplanes& planes, double m);

}  // namespace sentmark
