#include "morphvec/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace morphvec {

namespace {

constexpr double kMaxScore = 6.0;
constexpr int kNegativeRetries = 10;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

void fill_uniform(Matrix& m, std::size_t rows, std::mt19937_64& rng) {
  const double scale = 1.0 / static_cast<double>(m.cols());
  for (std::size_t r = 0; r < rows; ++r)
    for (Real& v : m.row(r)) v = (uniform01(rng) - 0.5) * scale;
}

std::uint64_t worker_seed(std::uint64_t seed, std::size_t worker) {
  return seed ^ (0x9E3779B97F4A7C15ull * (worker + 1));
}

}  // namespace

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  if (name == "cbow") return ModelKind::Cbow;
  if (name == "skipgram" || name == "skip-gram") return ModelKind::SkipGram;
  return std::nullopt;
}

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::Cbow ? "cbow" : "skipgram";
}

double TrainConfig::start_lr() const {
  if (lr_start) return *lr_start;
  return model == ModelKind::Cbow ? 0.05 : 0.025;
}

double TrainConfig::min_lr() const { return lr_min ? *lr_min : start_lr() * 1e-4; }

void TrainConfig::validate() const {
  if (dim == 0) throw std::invalid_argument("dim must be positive");
  if (window == 0) throw std::invalid_argument("window must be positive");
  if (negatives == 0) throw std::invalid_argument("negatives must be positive");
  if (!(start_lr() > 0)) throw std::invalid_argument("lr_start must be positive");
  if (min_lr() < 0 || min_lr() > start_lr())
    throw std::invalid_argument("lr_min must lie in [0, lr_start]");
  if (subsample_t && !(*subsample_t > 0))
    throw std::invalid_argument("subsample threshold must be positive");
  if (min_count == 0) throw std::invalid_argument("min_count must be positive");
  if (threads == 0) throw std::invalid_argument("threads must be positive");
  if (!(noise_power >= 0)) throw std::invalid_argument("noise power must be non-negative");
  if (noise_table_size == 0) throw std::invalid_argument("noise table size must be positive");
}

EmbeddingModel init_model(const Vocabulary& vocab, const TrainConfig& config) {
  if (vocab.empty()) throw std::invalid_argument("cannot initialize a model over an empty vocabulary");
  config.validate();
  EmbeddingModel model{vocab, Matrix(vocab.size(), config.dim), Matrix(vocab.size(), config.dim),
                       config, std::nullopt};
  std::mt19937_64 rng(config.seed);
  fill_uniform(model.input, vocab.size(), rng);
  return model;
}

EmbeddingModel init_subword_model(const SubwordIndex& index, const TrainConfig& config) {
  const Vocabulary& vocab = index.word_vocab();
  if (vocab.empty()) throw std::invalid_argument("cannot initialize a model over an empty vocabulary");
  config.validate();
  EmbeddingModel model{vocab, Matrix(index.rows(), config.dim), Matrix(vocab.size(), config.dim),
                       config, index};
  std::mt19937_64 rng(config.seed);
  fill_uniform(model.input, vocab.size(), rng);
  return model;
}

NoiseTable build_noise_table(const Vocabulary& vocab, double power, std::size_t size) {
  if (vocab.empty()) throw std::invalid_argument("noise table needs a non-empty vocabulary");
  if (size < vocab.size())
    throw std::invalid_argument("noise table size " + std::to_string(size) +
                                " is smaller than the vocabulary (" + std::to_string(vocab.size()) + ")");
  std::vector<double> weights(vocab.size());
  double total = 0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    weights[i] = std::pow(static_cast<double>(vocab.count(i)), power);
    total += weights[i];
  }
  if (!(total > 0)) throw std::invalid_argument("noise weights sum to zero");

  NoiseTable noise;
  noise.power = power;
  noise.table.reserve(size);
  double cumulative = 0;
  std::size_t filled = 0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    cumulative += weights[i];
    std::size_t end = static_cast<std::size_t>(std::llround(cumulative / total * static_cast<double>(size)));
    if (i + 1 == vocab.size()) end = size;
    end = std::min(end, size);
    for (; filled < end; ++filled) noise.table.push_back(static_cast<std::uint32_t>(i));
  }
  return noise;
}

std::size_t effective_noise_table_size(std::size_t vocab_size, std::size_t configured) {
  return std::max(vocab_size, std::min(configured, vocab_size * 1000));
}

double negative_sampling_step(EmbeddingModel& model, std::span<const Real> hidden,
                              std::size_t target, std::span<const std::size_t> negatives,
                              double lr, std::span<Real> hidden_gradient) {
  const std::size_t rows = model.context.rows();
  if (target >= rows) throw std::out_of_range("target index out of range");
  if (hidden.size() != model.context.cols() || hidden_gradient.size() != hidden.size())
    throw std::invalid_argument("hidden vector has the wrong dimension");

  double loss = 0;
  auto apply = [&](std::size_t word, double label) {
    auto out = model.context.row(word);
    const double score = dot(out, hidden);
    loss += label > 0 ? softplus(-score) : softplus(score);
    const double e = label - sigmoid(std::clamp(score, -kMaxScore, kMaxScore));
    axpy(e, out, hidden_gradient);
    axpy(lr * e, hidden, out);
  };

  apply(target, 1.0);
  for (std::size_t w : negatives) {
    if (w >= rows) throw std::out_of_range("negative index out of range");
    if (w == target) throw std::invalid_argument("negative sample equals the target");
    apply(w, 0.0);
  }
  return loss;
}

double input_rows_step(EmbeddingModel& model, std::span<const std::size_t> input_rows,
                       std::size_t target, std::span<const std::size_t> negatives, double lr) {
  if (input_rows.empty()) return 0;
  const std::size_t dim = model.dim();
  std::vector<Real> hidden(dim, 0);
  std::vector<Real> grad(dim, 0);
  for (std::size_t r : input_rows) {
    if (r >= model.input.rows()) throw std::out_of_range("input row out of range");
    axpy(1, model.input.row(r), hidden);
  }
  const double inv = 1.0 / static_cast<double>(input_rows.size());
  for (Real& v : hidden) v *= inv;
  const double loss = negative_sampling_step(model, hidden, target, negatives, lr, grad);
  for (std::size_t r : input_rows) axpy(lr * inv, grad, model.input.row(r));
  return loss;
}

SentenceTrainer::SentenceTrainer(EmbeddingModel& model, const NoiseTable& noise, std::uint64_t seed)
    : model_(model), noise_(noise), rng_(seed) {
  if (model.subwords) {
    subword_rows_.reserve(model.vocab.size());
    for (const auto& token : model.vocab.tokens())
      subword_rows_.push_back(model.subwords->input_rows(token));
  } else {
    identity_.resize(model.vocab.size());
    for (std::size_t i = 0; i < identity_.size(); ++i) identity_[i] = i;
  }
}

std::span<const std::size_t> SentenceTrainer::rows_of(std::size_t word) const {
  if (!subword_rows_.empty()) return subword_rows_[word];
  return std::span<const std::size_t>(identity_).subspan(word, 1);
}

void SentenceTrainer::draw_negatives(std::size_t target) {
  negatives_.clear();
  for (std::size_t k = 0; k < model_.config.negatives; ++k) {
    for (int attempt = 0; attempt <= kNegativeRetries; ++attempt) {
      const std::size_t w = noise_.sample(rng_);
      if (w != target) {
        negatives_.push_back(w);
        break;
      }
    }
  }
}

double SentenceTrainer::train_sentence_cbow(std::span<const std::size_t> indices, double lr) {
  const std::size_t n = indices.size();
  const std::size_t window = model_.config.window;
  double loss = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t b = 1 + rng_() % window;
    rows_.clear();
    const std::size_t lo = t >= b ? t - b : 0;
    const std::size_t hi = std::min(n - 1, t + b);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j == t) continue;
      auto r = rows_of(indices[j]);
      rows_.insert(rows_.end(), r.begin(), r.end());
    }
    if (rows_.empty()) continue;
    draw_negatives(indices[t]);
    loss += input_rows_step(model_, rows_, indices[t], negatives_, lr);
  }
  return loss;
}

double SentenceTrainer::train_sentence_skipgram(std::span<const std::size_t> indices, double lr) {
  const std::size_t n = indices.size();
  const std::size_t window = model_.config.window;
  double loss = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t b = 1 + rng_() % window;
    const std::size_t lo = t >= b ? t - b : 0;
    const std::size_t hi = std::min(n - 1, t + b);
    const auto center_rows = rows_of(indices[t]);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j == t) continue;
      draw_negatives(indices[j]);
      loss += input_rows_step(model_, center_rows, indices[j], negatives_, lr);
    }
  }
  return loss;
}

double SentenceTrainer::train_sentence(std::span<const std::size_t> indices, double lr) {
  return model_.config.model == ModelKind::Cbow ? train_sentence_cbow(indices, lr)
                                                 : train_sentence_skipgram(indices, lr);
}

namespace {

void run_training(EmbeddingModel& model, const SentenceSource& corpus, TrainStats* stats) {
  const TrainConfig& config = model.config;
  const Vocabulary& vocab = model.vocab;
  if (stats) *stats = TrainStats{};
  if (config.epochs == 0) return;

  const NoiseTable noise = build_noise_table(
      vocab, config.noise_power, effective_noise_table_size(vocab.size(), config.noise_table_size));

  std::vector<double> keep(vocab.size(), 1.0);
  if (config.subsample_t)
    for (std::size_t i = 0; i < vocab.size(); ++i)
      keep[i] = subsample_keep_prob(vocab.count(i), vocab.total_count(), *config.subsample_t);

  const double lr_start = config.start_lr();
  const double lr_min = config.min_lr();
  const double expected =
      static_cast<double>(config.epochs) * static_cast<double>(std::max<std::uint64_t>(1, vocab.total_count()));
  std::atomic<std::uint64_t> processed{0};

  const std::size_t workers = config.threads;
  std::vector<std::vector<double>> losses(workers, std::vector<double>(config.epochs, 0));
  std::vector<std::vector<std::uint64_t>> trained(workers, std::vector<std::uint64_t>(config.epochs, 0));

  auto work = [&](std::size_t worker) {
    SentenceTrainer trainer(model, noise, worker_seed(config.seed, worker));
    std::vector<std::size_t> ids;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      std::size_t sentence = 0;
      corpus.for_each([&](std::span<const std::string> tokens) {
        if (sentence++ % workers != worker) return;
        ids.clear();
        std::uint64_t seen = 0;
        for (const auto& tok : tokens) {
          auto id = vocab.find(tok);
          if (!id) continue;
          ++seen;
          if (keep[*id] < 1.0 && uniform01(trainer.rng()) >= keep[*id]) continue;
          ids.push_back(*id);
        }
        const std::uint64_t done = processed.fetch_add(seen, std::memory_order_relaxed);
        const double lr =
            std::max(lr_min, lr_start - (lr_start - lr_min) * static_cast<double>(done) / expected);
        losses[worker][epoch] += trainer.train_sentence(ids, lr);
        trained[worker][epoch] += ids.size();
      });
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  if (stats) {
    stats->epoch_loss.assign(config.epochs, 0);
    stats->epoch_tokens.assign(config.epochs, 0);
    for (std::size_t w = 0; w < workers; ++w)
      for (std::size_t e = 0; e < config.epochs; ++e) {
        stats->epoch_loss[e] += losses[w][e];
        stats->epoch_tokens[e] += trained[w][e];
      }
  }
}

}  // namespace

EmbeddingModel train(const SentenceSource& corpus, const Vocabulary& vocab,
                     const TrainConfig& config, TrainStats* stats) {
  EmbeddingModel model = init_model(vocab, config);
  run_training(model, corpus, stats);
  return model;
}

EmbeddingModel train_subword(const SentenceSource& corpus, const SubwordIndex& index,
                             const TrainConfig& config, TrainStats* stats) {
  EmbeddingModel model = init_subword_model(index, config);
  run_training(model, corpus, stats);
  return model;
}

std::vector<double> full_softmax(const EmbeddingModel& model, std::span<const Real> hidden) {
  std::vector<double> scores(model.context.rows());
  double best = -INFINITY;
  for (std::size_t w = 0; w < scores.size(); ++w) {
    scores[w] = dot(model.context.row(w), hidden);
    best = std::max(best, scores[w]);
  }
  double z = 0;
  for (double& s : scores) {
    s = std::exp(s - best);
    z += s;
  }
  for (double& s : scores) s /= z;
  return scores;
}

VectorStore word_store(const EmbeddingModel& model) {
  VectorStore store(model.dim());
  if (model.subwords) {
    const SubwordModel sub = to_subword_model(model);
    for (const auto& token : model.vocab.tokens()) store.set(token, sub.vector(token));
    return store;
  }
  for (std::size_t i = 0; i < model.vocab.size(); ++i)
    store.set(model.vocab.token(i), model.input.row(i));
  return store;
}

VectorStore context_store(const EmbeddingModel& model) {
  VectorStore store(model.dim());
  for (std::size_t i = 0; i < model.vocab.size(); ++i)
    store.set(model.vocab.token(i), model.context.row(i));
  return store;
}

SubwordModel to_subword_model(const EmbeddingModel& model) {
  if (!model.subwords) throw std::invalid_argument("model was not trained with subwords");
  const std::size_t words = model.vocab.size();
  const std::size_t dim = model.dim();
  Matrix word_table(words, dim);
  Matrix ngram_table(model.subwords->buckets(), dim);
  for (std::size_t r = 0; r < words; ++r)
    std::copy_n(model.input.row(r).begin(), dim, word_table.row(r).begin());
  for (std::size_t b = 0; b < ngram_table.rows(); ++b)
    std::copy_n(model.input.row(words + b).begin(), dim, ngram_table.row(b).begin());
  return SubwordModel{*model.subwords, std::move(word_table), std::move(ngram_table)};
}

}  // namespace morphvec
