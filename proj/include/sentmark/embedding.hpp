#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sentmark {

using Vec = std::vector<double>;

// Anything that maps a sentence to a fixed-dimension vector. Generation and
// detection only see this contract, so tests can substitute synthetic
// embedders and a neural encoder can be plugged in behind it later.
class Embedder {
 public:
  virtual ~Embedder() = default;

  // Unit-norm embedding of the sentence. Pure: identical text gives an
  // identical vector. Throws std::invalid_argument on empty text.
  virtual Vec embed(const std::string& text) const = 0;

  virtual int dim() const = 0;
};

// cosine(a, b) = a.b / (|a| |b|), in [-1, 1]. Throws on length mismatch or a
// zero vector.
double cosine(const Vec& a, const Vec& b);

// Deterministic reference encoder: case-fold, slide character 3-grams over
// the trimmed text, hash each gram into `feature_dim` count buckets with
// splitmix64, apply a linear projection to `dim` and L2-normalize.
//
// The projection is the only learned state; train_embedder fits it with the
// contrastive hinge objective below.
class EmbedderModel final : public Embedder {
 public:
  EmbedderModel() = default;
  EmbedderModel(int dim, int feature_dim, Vec projection,
                bool normalize = true);

  // Gaussian projection scaled by 1/sqrt(feature_dim), seeded stream.
  static EmbedderModel random(int dim, int feature_dim, std::uint64_t seed);
  // Identity projection (requires feature_dim == dim); handy for tracing the
  // hashing pipeline bucket-by-bucket.
  static EmbedderModel identity(int dim);

  Vec embed(const std::string& text) const override;
  int dim() const override { return dim_; }
  int feature_dim() const { return feature_dim_; }
  bool normalize() const { return normalize_; }
  const Vec& projection() const { return projection_; }
  Vec& projection() { return projection_; }

  // Sparse hashed 3-gram counts: (bucket, count) pairs sorted by bucket.
  // Texts shorter than 3 characters hash as a single gram.
  std::vector<std::pair<std::uint32_t, double>> features(
      const std::string& text) const;

  // Versioned binary format: magic "SSEM1", little-endian u32 dim,
  // u32 feature_dim, u8 normalize flag, then dim*feature_dim row-major
  // 64-bit floats.
  void save(const std::string& path) const;
  static EmbedderModel load(const std::string& path);

 private:
  int dim_ = 0;
  int feature_dim_ = 0;
  Vec projection_;  // row-major dim_ x feature_dim_
  bool normalize_ = true;
};

struct Triplet {
  std::string anchor;
  std::string positive;
  std::string negative;
};

using TripletBatch = std::vector<Triplet>;

// Single hinge term max{delta - f_pos + f_neg, 0}.
double hinge_term(double f_pos, double f_neg, double delta);

// Sum of hinge terms over the batch, f = cosine of embedded pairs.
// delta must be positive.
double contrastive_loss(const TripletBatch& batch, const EmbedderModel& model,
                        double delta);

// Gradient of contrastive_loss with respect to the projection matrix,
// flattened row-major to match EmbedderModel::projection(). The hinge
// subgradient at the kink is zero (terms contribute only when strictly
// positive).
Vec contrastive_gradient(const TripletBatch& batch, const EmbedderModel& model,
                         double delta);

struct TrainOptions {
  double delta = 0.8;
  double learning_rate = 0.1;
  int epochs = 10;
  int batch_size = 8;
  std::uint64_t seed = 1;
};

struct TrainResult {
  EmbedderModel model;
  // Mean per-triple loss; entry 0 is the pre-training loss, then one entry
  // after each epoch.
  std::vector<double> epoch_losses;
};

// Plain mini-batch gradient descent on the contrastive objective.
// Deterministic given the seed. Throws std::runtime_error if the loss goes
// non-finite.
TrainResult train_embedder(const TripletBatch& corpus,
                           const EmbedderModel& initial,
                           const TrainOptions& options);

}  // namespace sentmark
