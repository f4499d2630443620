#include <algorithm>
#include <cmath>

#include "sarcasm/embed.hpp"
#include "sarcasm/rng.hpp"

namespace sarcasm {
namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

std::optional<std::span<const double>> WordEmbeddings::find(const std::string& word) const {
  const auto it = vocabulary.find(word);
  if (it == vocabulary.end()) return std::nullopt;
  return row(it->second);
}

void Word2VecConfig::validate() const {
  if (dim == 0) throw Error(ErrorKind::Config, "word2vec: dim must be > 0");
  if (window == 0) throw Error(ErrorKind::Config, "word2vec: window must be > 0");
  if (negatives == 0) throw Error(ErrorKind::Config, "word2vec: negatives must be > 0");
  if (!(lr > 0.0)) throw Error(ErrorKind::Config, "word2vec: lr must be > 0");
}

SgnsGradients sgns_loss_and_grad(std::span<const double> center, std::span<const double> context,
                                 const std::vector<std::span<const double>>& negatives) {
  const std::size_t d = center.size();
  if (context.size() != d)
    throw Error(ErrorKind::InvalidArgument, "sgns: center/context dimension mismatch");
  for (const auto& n : negatives)
    if (n.size() != d) throw Error(ErrorKind::InvalidArgument, "sgns: negative dimension mismatch");

  SgnsGradients g;
  g.center.assign(d, 0.0);
  g.context.assign(d, 0.0);
  g.negatives.assign(negatives.size(), std::vector<double>(d, 0.0));

  // d/dx [-log s(x)] = s(x) - 1, d/dx [-log s(-x)] = s(x).
  const double pos = dot(center, context);
  g.loss = softplus(-pos);
  const double coef_pos = sigmoid(pos) - 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    g.center[i] += coef_pos * context[i];
    g.context[i] = coef_pos * center[i];
  }
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    const double neg = dot(center, negatives[k]);
    g.loss += softplus(neg);
    const double coef = sigmoid(neg);
    for (std::size_t i = 0; i < d; ++i) {
      g.center[i] += coef * negatives[k][i];
      g.negatives[k][i] = coef * center[i];
    }
  }
  return g;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(ErrorKind::InvalidArgument, "cosine: dimension mismatch");
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

Word2VecResult train_word2vec(const std::vector<TokenList>& corpus, const Word2VecConfig& cfg) {
  cfg.validate();

  std::map<std::string, std::size_t> counts;
  for (const auto& doc : corpus)
    for (const auto& t : doc) ++counts[t];
  if (counts.size() < 2)
    throw Error(ErrorKind::InvalidArgument, "word2vec: corpus needs >= 2 distinct tokens");

  Word2VecResult result;
  auto& emb = result.embeddings;
  emb.dim = cfg.dim;
  std::vector<double> cumulative;  // unigram^0.75 sampling table
  double total_weight = 0.0;
  {
    std::uint32_t next = 0;
    for (const auto& [word, count] : counts) {
      emb.vocabulary.emplace(word, next++);
      total_weight += std::pow(static_cast<double>(count), 0.75);
      cumulative.push_back(total_weight);
    }
  }
  const std::size_t vocab = counts.size();
  const std::size_t dim = cfg.dim;

  Rng rng(cfg.seed);
  emb.vectors.resize(vocab * dim);
  for (auto& x : emb.vectors) x = (rng.uniform01() - 0.5) / static_cast<double>(dim);
  std::vector<double> context_vectors(vocab * dim, 0.0);

  std::vector<std::vector<std::uint32_t>> ids;
  ids.reserve(corpus.size());
  std::size_t pairs_per_epoch = 0;
  for (const auto& doc : corpus) {
    auto& row = ids.emplace_back();
    for (const auto& t : doc) row.push_back(emb.vocabulary.at(t));
    const std::size_t n = row.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i >= cfg.window ? i - cfg.window : 0;
      const std::size_t hi = std::min(n - 1, i + cfg.window);
      pairs_per_epoch += hi - lo;
    }
  }
  const double total_pairs = static_cast<double>(pairs_per_epoch * cfg.epochs);

  const auto draw_negative = [&]() -> std::uint32_t {
    const double r = rng.uniform01() * total_weight;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    return static_cast<std::uint32_t>(
        std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), vocab - 1));
  };
  const auto in_row = [&](std::uint32_t w) {
    return std::span<double>(emb.vectors).subspan(w * dim, dim);
  };
  const auto out_row = [&](std::uint32_t w) {
    return std::span<double>(context_vectors).subspan(w * dim, dim);
  };

  std::size_t processed = 0;
  std::vector<std::uint32_t> negative_ids;
  std::vector<std::span<const double>> negative_rows;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    std::size_t epoch_pairs = 0;
    for (const auto& row : ids) {
      const std::size_t n = row.size();
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= cfg.window ? i - cfg.window : 0;
        const std::size_t hi = std::min(n - 1, i + cfg.window);
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          const double lr =
              cfg.lr * std::max(1e-4, 1.0 - static_cast<double>(processed) / total_pairs);
          ++processed;

          const std::uint32_t center = row[i];
          const std::uint32_t context = row[j];
          negative_ids.clear();
          negative_rows.clear();
          for (std::size_t k = 0; k < cfg.negatives; ++k) {
            const auto neg = draw_negative();
            if (neg == context) continue;
            negative_ids.push_back(neg);
            negative_rows.push_back(out_row(neg));
          }
          const auto g = sgns_loss_and_grad(in_row(center), out_row(context), negative_rows);
          epoch_loss += g.loss;
          ++epoch_pairs;

          auto u = in_row(center);
          auto v = out_row(context);
          for (std::size_t x = 0; x < dim; ++x) v[x] -= lr * g.context[x];
          for (std::size_t k = 0; k < negative_ids.size(); ++k) {
            auto w = out_row(negative_ids[k]);
            for (std::size_t x = 0; x < dim; ++x) w[x] -= lr * g.negatives[k][x];
          }
          for (std::size_t x = 0; x < dim; ++x) u[x] -= lr * g.center[x];
        }
      }
    }
    result.epoch_losses.push_back(epoch_pairs ? epoch_loss / static_cast<double>(epoch_pairs)
                                              : 0.0);
  }
  return result;
}

}  // namespace sarcasm
