#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "morphvec/compose.hpp"
#include "morphvec/matrix.hpp"
#include "morphvec/store.hpp"

namespace morphvec {

// Throws std::invalid_argument if either vector is zero.
double cosine(std::span<const Real> u, std::span<const Real> v);

using Resolver = std::function<std::optional<std::vector<Real>>(std::string_view)>;

Resolver store_resolver(const VectorStore& store);
Resolver composer_resolver(const Composer& composer);

struct Ranked {
  std::string token;
  double similarity = 0;

  friend bool operator==(const Ranked&, const Ranked&) = default;
};

// Candidate set with cached norms. Ranking is by cosine, descending, ties
// broken by store order. Zero candidates are never ranked.
class NeighborIndex {
 public:
  explicit NeighborIndex(const VectorStore& candidates);

  // Empty when the query is a zero vector.
  std::vector<Ranked> nearest(std::span<const Real> query, std::size_t top_n,
                              std::span<const std::string> exclude = {}) const;

  const VectorStore& store() const noexcept { return store_; }

 private:
  const VectorStore& store_;
  std::vector<double> norms_;
};

struct AnalogyQuestion {
  std::string a, b, c, d;
};

struct GroupQuestion {
  std::vector<std::string> members;
  std::size_t odd_index = 0;
};

// Ranks candidates against v(b) - v(a) + v(c). nullopt when a, b or c does
// not resolve (or the query vector is zero); the question is then skipped.
std::optional<std::vector<Ranked>> analogy_predict(std::string_view a, std::string_view b,
                                                   std::string_view c, const NeighborIndex& index,
                                                   const Resolver& resolve, std::size_t top_n,
                                                   bool exclude_inputs = false);

std::optional<std::vector<Ranked>> analogy_predict(std::string_view a, std::string_view b,
                                                   std::string_view c, const VectorStore& store,
                                                   std::size_t top_n, bool exclude_inputs = false);

inline constexpr std::size_t kDefaultTopN[] = {1, 3, 5, 10, 20, 40};

struct AnalogyResult {
  std::vector<std::size_t> ns;
  // Correct / evaluated (skipped questions excluded).
  std::vector<double> accuracy;
  // Correct / total (skipped questions counted wrong).
  std::vector<double> accuracy_all;
  std::vector<std::size_t> correct;
  std::size_t total = 0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;

  double oov_rate() const { return total ? static_cast<double>(skipped) / total : 0.0; }
};

AnalogyResult analogy_accuracy(std::span<const AnalogyQuestion> questions,
                               const NeighborIndex& index, const Resolver& resolve,
                               std::span<const std::size_t> ns = kDefaultTopN,
                               bool exclude_inputs = false);

AnalogyResult analogy_accuracy(std::span<const AnalogyQuestion> questions, const VectorStore& store,
                               std::span<const std::size_t> ns = kDefaultTopN,
                               bool exclude_inputs = false);

// Member farthest (by cosine) from the mean of the resolvable members, as an
// index into `members`. Ties go to the earliest member. nullopt when fewer
// than three members resolve to non-zero vectors.
std::optional<std::size_t> odd_one_out(std::span<const std::string> members,
                                       const Resolver& resolve);

struct GroupResult {
  std::size_t total = 0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::size_t correct = 0;

  double accuracy() const { return evaluated ? static_cast<double>(correct) / evaluated : 0.0; }
  double accuracy_all() const { return total ? static_cast<double>(correct) / total : 0.0; }
  double oov_rate() const { return total ? static_cast<double>(skipped) / total : 0.0; }
};

GroupResult group_accuracy(std::span<const GroupQuestion> questions, const Resolver& resolve);

struct Document {
  std::string label;
  std::vector<std::string> tokens;
};

struct ClassifyOptions {
  std::size_t epochs = 200;
  double lr = 0.1;
};

struct ClassifyResult {
  double accuracy = 0;
  std::size_t test_docs = 0;
  std::size_t tokens = 0;
  std::size_t oov_tokens = 0;
  std::vector<std::string> labels;

  double oov_rate() const { return tokens ? static_cast<double>(oov_tokens) / tokens : 0.0; }
};

// Softmax regression over mean word vectors (OOV words contribute `oov`),
// trained by full-batch gradient descent from a zero start.
ClassifyResult classify_docs(std::span<const Document> train, std::span<const Document> test,
                             const Resolver& resolve, std::span<const Real> oov,
                             const ClassifyOptions& options = {});

ClassifyResult classify_docs(std::span<const Document> train, std::span<const Document> test,
                             const Composer& composer, const ClassifyOptions& options = {});

// "a b c d" per line; blank lines and ":" section headers are skipped.
std::vector<AnalogyQuestion> load_analogy_questions(const std::filesystem::path& path);
std::vector<AnalogyQuestion> parse_analogy_questions(std::istream& in, const std::string& source);

// Members per line with the odd one first; members are shuffled with `seed`.
std::vector<GroupQuestion> load_group_questions(const std::filesystem::path& path,
                                                std::uint64_t seed);
std::vector<GroupQuestion> parse_group_questions(std::istream& in, const std::string& source,
                                                 std::uint64_t seed);

// "label<TAB>token token ..." per line.
std::vector<Document> load_documents(const std::filesystem::path& path);
std::vector<Document> parse_documents(std::istream& in, const std::string& source);

struct EvalReport {
  std::string model_name;
  std::optional<AnalogyResult> analogy;
  std::optional<GroupResult> group;
  std::optional<ClassifyResult> classification;
};

// Human-readable table: one row per model, one column per n.
std::string format_table(const EvalReport& report);

// Flat "metric<TAB>value" lines.
std::string format_metrics(const EvalReport& report);

}  // namespace morphvec
