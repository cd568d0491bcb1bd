#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "morphvec/corpus.hpp"
#include "morphvec/matrix.hpp"
#include "morphvec/store.hpp"
#include "morphvec/subword.hpp"
#include "morphvec/vocab.hpp"

namespace morphvec {

enum class ModelKind { Cbow, SkipGram };

std::optional<ModelKind> parse_model_kind(std::string_view name);
std::string_view to_string(ModelKind kind);

struct TrainConfig {
  ModelKind model = ModelKind::Cbow;
  std::size_t dim = 300;
  // Context words per side. A total window span of 2c+1 tokens.
  std::size_t window = 2;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  // Unset: 0.05 for CBOW, 0.025 for Skip-Gram.
  std::optional<double> lr_start;
  // Unset: lr_start * 1e-4.
  std::optional<double> lr_min;
  // Unset disables subsampling.
  std::optional<double> subsample_t = 1e-3;
  std::uint64_t min_count = 5;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  double noise_power = 0.75;
  std::size_t noise_table_size = 10'000'000;

  double start_lr() const;
  double min_lr() const;

  // Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

// Input rows are word vectors (plus hashed n-gram rows for subword models);
// context rows are the output-side vectors, one per vocabulary word.
struct EmbeddingModel {
  Vocabulary vocab;
  Matrix input;
  Matrix context;
  TrainConfig config;
  std::optional<SubwordIndex> subwords;

  std::size_t dim() const noexcept { return context.cols(); }
};

EmbeddingModel init_model(const Vocabulary& vocab, const TrainConfig& config);

// Word rows are initialized as in init_model; n-gram bucket rows start at zero
// so that buckets never touched in training contribute nothing.
EmbeddingModel init_subword_model(const SubwordIndex& index, const TrainConfig& config);

struct NoiseTable {
  std::vector<std::uint32_t> table;
  double power = 0.75;

  std::size_t size() const noexcept { return table.size(); }
  std::uint32_t sample(std::mt19937_64& rng) const { return table[rng() % table.size()]; }
};

// Each token gets round(cumulative share) slots, so its slot count is within
// one of size * count^power / sum(count^power).
NoiseTable build_noise_table(const Vocabulary& vocab, double power, std::size_t size);

// Noise table size used by train(): at least V, at most config.noise_table_size,
// and no more than 1000 slots per vocabulary entry.
std::size_t effective_noise_table_size(std::size_t vocab_size, std::size_t configured);

// One positive target and its negatives against a hidden vector. Returns the
// loss computed before any update. Adds sum(e * context[w]) to
// hidden_gradient, where e = label - sigmoid(context[w] . hidden), then moves
// each context[w] by lr * e * hidden.
double negative_sampling_step(EmbeddingModel& model, std::span<const Real> hidden,
                              std::size_t target, std::span<const std::size_t> negatives,
                              double lr, std::span<Real> hidden_gradient);

// Hidden vector is the mean of the given input rows; each row then receives
// lr * hidden_gradient / rows.size(), which is the exact gradient step.
double input_rows_step(EmbeddingModel& model, std::span<const std::size_t> input_rows,
                       std::size_t target, std::span<const std::size_t> negatives, double lr);

class SentenceTrainer {
 public:
  SentenceTrainer(EmbeddingModel& model, const NoiseTable& noise, std::uint64_t seed);

  double train_sentence_cbow(std::span<const std::size_t> indices, double lr);
  double train_sentence_skipgram(std::span<const std::size_t> indices, double lr);
  double train_sentence(std::span<const std::size_t> indices, double lr);

  std::mt19937_64& rng() noexcept { return rng_; }

 private:
  std::span<const std::size_t> rows_of(std::size_t word) const;
  void draw_negatives(std::size_t target);

  EmbeddingModel& model_;
  const NoiseTable& noise_;
  std::mt19937_64 rng_;
  std::vector<std::vector<std::size_t>> subword_rows_;
  std::vector<std::size_t> identity_;
  std::vector<std::size_t> rows_;
  std::vector<std::size_t> negatives_;
};

struct TrainStats {
  std::vector<double> epoch_loss;
  std::vector<std::uint64_t> epoch_tokens;
};

EmbeddingModel train(const SentenceSource& corpus, const Vocabulary& vocab,
                     const TrainConfig& config, TrainStats* stats = nullptr);

// fastText-style training: every word is the mean of its dedicated row and
// its hashed n-gram rows.
EmbeddingModel train_subword(const SentenceSource& corpus, const SubwordIndex& index,
                             const TrainConfig& config, TrainStats* stats = nullptr);

// Exact softmax over the vocabulary for a hidden vector (diagnostic only).
std::vector<double> full_softmax(const EmbeddingModel& model, std::span<const Real> hidden);

// Input vectors of the vocabulary words.
VectorStore word_store(const EmbeddingModel& model);
VectorStore context_store(const EmbeddingModel& model);

// Splits a subword-trained model into its word and n-gram tables.
SubwordModel to_subword_model(const EmbeddingModel& model);

}  // namespace morphvec
