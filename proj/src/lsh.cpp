#include "sentmark/lsh.hpp"

#include <cmath>
#include <stdexcept>

#include "sentmark/prng.hpp"

namespace sentmark {

namespace {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

void check_dim(const Vec& v, const LshHyperplanes& planes) {
  if (static_cast<int>(v.size()) != planes.dim()) {
    throw std::invalid_argument("lsh: embedding dimension mismatch");
  }
}

}  // namespace

LshHyperplanes::LshHyperplanes(std::uint64_t key, int d, int dim)
    : key_(key), d_(d), dim_(dim) {
  if (d < 1 || d > 24) {
    throw std::invalid_argument("lsh dimension d must be in [1, 24]");
  }
  if (dim < 2) {
    throw std::invalid_argument("embedding dimension must be >= 2");
  }
  GaussianStream gauss(key);
  normals_.resize(d);
  for (int i = 0; i < d; ++i) {
    normals_[i].resize(dim);
    double sq = 0.0;
    for (int j = 0; j < dim; ++j) {
      normals_[i][j] = gauss.next();
      sq += normals_[i][j] * normals_[i][j];
    }
    if (sq == 0.0) {
      throw std::runtime_error("lsh: degenerate zero normal vector");
    }
  }
}

Signature signature_of(const Vec& v, const LshHyperplanes& planes) {
  check_dim(v, planes);
  Signature sig;
  sig.bits.resize(planes.d());
  for (int i = 0; i < planes.d(); ++i) {
    sig.bits[i] = dot(planes.normal(i), v) > 0.0 ? 1 : 0;
  }
  return sig;
}

std::uint32_t signature_to_decimal(const Signature& sig) {
  std::uint32_t value = 0;
  for (std::uint8_t bit : sig.bits) {
    value = (value << 1) | (bit ? 1u : 0u);
  }
  return value;
}

double min_abs_cos(const Vec& v, const LshHyperplanes& planes) {
  check_dim(v, planes);
  const double nv = norm(v);
  if (nv == 0.0) throw std::invalid_argument("lsh: zero embedding");
  double best = 1.0;
  for (int i = 0; i < planes.d(); ++i) {
    const double c =
        std::fabs(dot(planes.normal(i), v)) / (norm(planes.normal(i)) * nv);
    if (c < best) best = c;
  }
  return best;
}

bool margin_satisfied(const Vec& v, const LshHyperplanes& planes, double m) {
  if (m < 0.0) throw std::invalid_argument("margin must be >= 0");
  return min_abs_cos(v, planes) > m;
}

}  // namespace sentmark
