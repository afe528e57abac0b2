#include "sentmark/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include "sentmark/prng.hpp"
#include "sentmark/tokenize.hpp"

namespace sentmark {

namespace {

std::string trimmed(const std::string& text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return text.substr(b, e - b);
}

std::uint64_t pack_gram(const char* data, std::size_t len) {
  std::uint64_t packed = 0;
  for (std::size_t i = 0; i < len && i < 8; ++i) {
    packed |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[i]))
              << (8 * i);
  }
  return packed;
}

void l2_normalize(Vec& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  if (sq <= 0.0) {
    throw std::runtime_error("embedding has zero norm; projection degenerate");
  }
  const double inv = 1.0 / std::sqrt(sq);
  for (double& x : v) x *= inv;
}

// d cos(x, y) / d x with x = P fx, y = P fy already computed.
// Returns (y_hat - cos * x_hat) / |x|.
Vec cosine_grad_wrt_first(const Vec& x, const Vec& y, double cos_xy) {
  double nx = 0.0, ny = 0.0;
  for (double v : x) nx += v * v;
  for (double v : y) ny += v * v;
  nx = std::sqrt(nx);
  ny = std::sqrt(ny);
  Vec g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    g[i] = (y[i] / ny - cos_xy * x[i] / nx) / nx;
  }
  return g;
}

}  // namespace

double cosine(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine: dimension mismatch");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("cosine: zero vector");
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

EmbedderModel::EmbedderModel(int dim, int feature_dim, Vec projection,
                             bool normalize)
    : dim_(dim),
      feature_dim_(feature_dim),
      projection_(std::move(projection)),
      normalize_(normalize) {
  if (dim_ < 1 || feature_dim_ < 1) {
    throw std::invalid_argument("EmbedderModel: dimensions must be positive");
  }
  if (projection_.size() !=
      static_cast<std::size_t>(dim_) * static_cast<std::size_t>(feature_dim_)) {
    throw std::invalid_argument("EmbedderModel: projection size mismatch");
  }
}

EmbedderModel EmbedderModel::random(int dim, int feature_dim,
                                    std::uint64_t seed) {
  Vec proj(static_cast<std::size_t>(dim) * feature_dim);
  GaussianStream gauss(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(feature_dim));
  for (double& p : proj) p = gauss.next() * scale;
  return EmbedderModel(dim, feature_dim, std::move(proj));
}

EmbedderModel EmbedderModel::identity(int dim) {
  Vec proj(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i) {
    proj[static_cast<std::size_t>(i) * dim + i] = 1.0;
  }
  return EmbedderModel(dim, dim, std::move(proj));
}

std::vector<std::pair<std::uint32_t, double>> EmbedderModel::features(
    const std::string& text) const {
  const std::string t = ascii_lower(trimmed(text));
  if (t.empty()) {
    throw std::invalid_argument("empty sentence");
  }
  std::map<std::uint32_t, double> counts;
  if (t.size() < 3) {
    const std::uint32_t bucket = static_cast<std::uint32_t>(
        mix64(pack_gram(t.data(), t.size())) % feature_dim_);
    counts[bucket] += 1.0;
  } else {
    for (std::size_t i = 0; i + 3 <= t.size(); ++i) {
      const std::uint32_t bucket = static_cast<std::uint32_t>(
          mix64(pack_gram(t.data() + i, 3)) % feature_dim_);
      counts[bucket] += 1.0;
    }
  }
  return {counts.begin(), counts.end()};
}

Vec EmbedderModel::embed(const std::string& text) const {
  const auto feats = features(text);
  Vec v(dim_, 0.0);
  for (const auto& [bucket, count] : feats) {
    const double* col = projection_.data() + bucket;
    for (int r = 0; r < dim_; ++r) {
      v[r] += col[static_cast<std::size_t>(r) * feature_dim_] * count;
    }
  }
  if (normalize_) l2_normalize(v);
  return v;
}

void EmbedderModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open model file for write: " + path);
  out.write("SSEM1", 5);
  auto put_u32 = [&out](std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                          static_cast<unsigned char>((v >> 8) & 0xFF),
                          static_cast<unsigned char>((v >> 16) & 0xFF),
                          static_cast<unsigned char>((v >> 24) & 0xFF)};
    out.write(reinterpret_cast<const char*>(b), 4);
  };
  put_u32(static_cast<std::uint32_t>(dim_));
  put_u32(static_cast<std::uint32_t>(feature_dim_));
  const unsigned char norm = normalize_ ? 1 : 0;
  out.write(reinterpret_cast<const char*>(&norm), 1);
  for (double value : projection_) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(value));
    std::memcpy(&bits, &value, sizeof(bits));
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) {
      b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xFF);
    }
    out.write(reinterpret_cast<const char*>(b), 8);
  }
  if (!out) throw std::runtime_error("model write failed: " + path);
}

EmbedderModel EmbedderModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  char magic[5];
  in.read(magic, 5);
  if (!in || std::string(magic, 5) != "SSEM1") {
    throw std::runtime_error("bad model file magic: " + path);
  }
  auto get_u32 = [&in, &path]() {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw std::runtime_error("truncated model file: " + path);
    return static_cast<std::uint32_t>(b[0]) |
           (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  };
  const std::uint32_t dim = get_u32();
  const std::uint32_t feature_dim = get_u32();
  unsigned char norm = 0;
  in.read(reinterpret_cast<char*>(&norm), 1);
  Vec proj(static_cast<std::size_t>(dim) * feature_dim);
  for (double& value : proj) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw std::runtime_error("truncated model file: " + path);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    }
    std::memcpy(&value, &bits, sizeof(value));
  }
  return EmbedderModel(static_cast<int>(dim), static_cast<int>(feature_dim),
                       std::move(proj), norm != 0);
}

double hinge_term(double f_pos, double f_neg, double delta) {
  return std::max(delta - f_pos + f_neg, 0.0);
}

double contrastive_loss(const TripletBatch& batch, const EmbedderModel& model,
                        double delta) {
  if (delta <= 0.0) {
    throw std::invalid_argument("contrastive margin must be positive");
  }
  double loss = 0.0;
  for (const Triplet& t : batch) {
    const Vec a = model.embed(t.anchor);
    const Vec p = model.embed(t.positive);
    const Vec n = model.embed(t.negative);
    loss += hinge_term(cosine(a, p), cosine(a, n), delta);
  }
  return loss;
}

Vec contrastive_gradient(const TripletBatch& batch, const EmbedderModel& model,
                         double delta) {
  if (delta <= 0.0) {
    throw std::invalid_argument("contrastive margin must be positive");
  }
  const int dim = model.dim();
  const int fdim = model.feature_dim();
  Vec grad(static_cast<std::size_t>(dim) * fdim, 0.0);

  // Raw (un-normalized) projections; cosine is scale-free so gradients can be
  // taken straight through P f.
  auto project = [&](const std::vector<std::pair<std::uint32_t, double>>& f) {
    Vec v(dim, 0.0);
    for (const auto& [bucket, count] : f) {
      for (int r = 0; r < dim; ++r) {
        v[r] += model.projection()[static_cast<std::size_t>(r) * fdim + bucket] *
                count;
      }
    }
    return v;
  };
  auto accumulate = [&](const Vec& dcos_dx,
                        const std::vector<std::pair<std::uint32_t, double>>& f,
                        double sign) {
    for (const auto& [bucket, count] : f) {
      for (int r = 0; r < dim; ++r) {
        grad[static_cast<std::size_t>(r) * fdim + bucket] +=
            sign * dcos_dx[r] * count;
      }
    }
  };

  for (const Triplet& t : batch) {
    const auto fa = model.features(t.anchor);
    const auto fp = model.features(t.positive);
    const auto fn = model.features(t.negative);
    const Vec xa = project(fa);
    const Vec xp = project(fp);
    const Vec xn = project(fn);
    const double f_pos = cosine(xa, xp);
    const double f_neg = cosine(xa, xn);
    if (delta - f_pos + f_neg <= 0.0) continue;  // hinge inactive

    // d term / dP = -dcos(a,p)/dP + dcos(a,n)/dP
    accumulate(cosine_grad_wrt_first(xa, xp, f_pos), fa, -1.0);
    accumulate(cosine_grad_wrt_first(xp, xa, f_pos), fp, -1.0);
    accumulate(cosine_grad_wrt_first(xa, xn, f_neg), fa, +1.0);
    accumulate(cosine_grad_wrt_first(xn, xa, f_neg), fn, +1.0);
  }
  return grad;
}

TrainResult train_embedder(const TripletBatch& corpus,
                           const EmbedderModel& initial,
                           const TrainOptions& options) {
  if (corpus.empty()) {
    throw std::invalid_argument("train_embedder: empty corpus");
  }
  if (options.learning_rate <= 0.0) {
    throw std::invalid_argument("train_embedder: learning rate must be positive");
  }
  TrainResult result;
  result.model = initial;
  const auto mean_loss = [&](const EmbedderModel& m) {
    return contrastive_loss(corpus, m, options.delta) /
           static_cast<double>(corpus.size());
  };
  result.epoch_losses.push_back(mean_loss(result.model));

  SplitMix64 rng(options.seed);
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const int batch_size = std::max(options.batch_size, 1);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    fisher_yates(order, rng);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(batch_size)) {
      TripletBatch batch;
      for (std::size_t k = start;
           k < std::min(order.size(), start + batch_size); ++k) {
        batch.push_back(corpus[order[k]]);
      }
      const Vec grad = contrastive_gradient(batch, result.model, options.delta);
      Vec& proj = result.model.projection();
      for (std::size_t i = 0; i < proj.size(); ++i) {
        proj[i] -= options.learning_rate * grad[i];
      }
    }
    const double loss = mean_loss(result.model);
    if (!std::isfinite(loss)) {
      throw std::runtime_error(
          "train_embedder: non-finite loss at epoch " + std::to_string(epoch) +
          " (lr=" + std::to_string(options.learning_rate) + ")");
    }
    result.epoch_losses.push_back(loss);
  }
  return result;
}

}  // namespace sentmark
