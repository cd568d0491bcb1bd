#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "morphvec/matrix.hpp"
#include "morphvec/vocab.hpp"

namespace morphvec {

// Splits a UTF-8 string into code points (each returned as its byte
// sequence). Invalid bytes are returned one by one.
std::vector<std::string> utf8_chars(std::string_view text);

// Character n-grams of "<word>" for n in [n_min, n_max] in position order,
// followed by "<word>" itself. An n-gram that spans the whole wrapped word is
// only emitted once, as the final entry. Duplicates are kept.
std::vector<std::string> extract_ngrams(std::string_view word, int n_min, int n_max);

// 32-bit FNV-1a over the UTF-8 bytes, reduced modulo buckets.
std::uint32_t fnv1a(std::string_view bytes) noexcept;
std::size_t hash_ngram(std::string_view ngram, std::size_t buckets);

// Maps a word to the rows of a fastText input matrix laid out as
// [word_vocab.size() dedicated word rows | buckets hashed n-gram rows].
class SubwordIndex {
 public:
  static constexpr int kDefaultMinN = 3;
  static constexpr int kDefaultMaxN = 6;
  static constexpr std::size_t kDefaultBuckets = 2'000'000;

  SubwordIndex(Vocabulary word_vocab, int n_min = kDefaultMinN, int n_max = kDefaultMaxN,
               std::size_t buckets = kDefaultBuckets);

  int n_min() const noexcept { return n_min_; }
  int n_max() const noexcept { return n_max_; }
  std::size_t buckets() const noexcept { return buckets_; }
  const Vocabulary& word_vocab() const noexcept { return words_; }
  std::size_t rows() const noexcept { return words_.size() + buckets_; }

  // Bucket indices (not offset by the word rows) of every bag entry. Words
  // containing a boundary marker have no n-grams.
  std::vector<std::size_t> ngram_buckets(std::string_view word) const;

  // Matrix rows for a word: its dedicated row when in vocabulary, then
  // words_.size() + bucket for each bag entry.
  std::vector<std::size_t> input_rows(std::string_view word) const;

 private:
  Vocabulary words_;
  int n_min_;
  int n_max_;
  std::size_t buckets_;
};

// Sum of the hashed n-gram vectors plus the dedicated word vector when the
// word has one. ngram_table has index.buckets() rows; word_table has
// index.word_vocab().size() rows.
std::vector<Real> fasttext_word_vector(std::string_view word, const Matrix& word_table,
                                       const Matrix& ngram_table, const SubwordIndex& index);

// Trained fastText-style tables plus the index that addresses them.
struct SubwordModel {
  SubwordIndex index;
  Matrix word_table;
  Matrix ngram_table;

  std::vector<Real> vector(std::string_view word) const {
    return fasttext_word_vector(word, word_table, ngram_table, index);
  }

  // Writes <prefix>.subword (n_min n_max buckets), <prefix>.words.vec and
  // <prefix>.ngrams.vec (non-zero bucket rows keyed by bucket number).
  void save(const std::filesystem::path& prefix) const;
  static SubwordModel load(const std::filesystem::path& prefix);
};

// Greedy byte-pair-encoding model over code points. Stand-in for an external
// piece tokenizer: pieces are later trained as independent tokens.
class BpeModel {
 public:
  using Merge = std::pair<std::string, std::string>;

  BpeModel() = default;
  BpeModel(std::vector<Merge> merges, Vocabulary piece_vocab, std::size_t target_size);

  const std::vector<Merge>& merges() const noexcept { return merges_; }
  const Vocabulary& piece_vocab() const noexcept { return pieces_; }
  std::size_t target_size() const noexcept { return target_size_; }

  std::vector<std::string> encode(std::string_view word) const;

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static BpeModel load(std::istream& in, const std::string& source = "bpe");
  static BpeModel load(const std::filesystem::path& path);

 private:
  std::vector<Merge> merges_;
  Vocabulary pieces_;
  std::size_t target_size_ = 0;
  std::map<Merge, std::size_t, std::less<>> rank_;
};

// word -> count pairs. Words must not contain whitespace.
using WordCounts = std::vector<std::pair<std::string, std::uint64_t>>;

BpeModel train_bpe(const WordCounts& words, std::size_t target_size);

inline std::vector<std::string> bpe_encode(const BpeModel& model, std::string_view word) {
  return model.encode(word);
}

}  // namespace morphvec
