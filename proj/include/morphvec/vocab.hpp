#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace morphvec {

// Raw occurrence counts, before any filtering. Per-worker counters can be
// merged; the resulting Vocabulary does not depend on merge order.
class TokenCounter {
 public:
  void add(std::string_view token, std::uint64_t n = 1);
  void add_all(std::span<const std::string> tokens);
  void merge(const TokenCounter& other);

  std::size_t distinct() const noexcept { return counts_.size(); }
  const std::unordered_map<std::string, std::uint64_t>& counts() const noexcept {
    return counts_;
  }

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;
};

// Token <-> index map ordered by descending count, ties broken
// lexicographically. Index 0 is the most frequent token.
class Vocabulary {
 public:
  Vocabulary() = default;

  static Vocabulary from_counts(const TokenCounter& counter, std::uint64_t min_count);

  // Keeps the given order. Used for piece inventories and reloaded models.
  static Vocabulary from_ordered(std::vector<std::string> tokens,
                                 std::vector<std::uint64_t> counts, std::uint64_t min_count = 1);

  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }

  const std::string& token(std::size_t i) const { return tokens_.at(i); }
  std::uint64_t count(std::size_t i) const { return counts_.at(i); }
  std::optional<std::size_t> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  std::uint64_t total_count() const noexcept { return total_; }
  std::uint64_t min_count() const noexcept { return min_count_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.counts_ == b.counts_ && a.min_count_ == b.min_count_;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  void rebuild_index();

  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
  std::uint64_t total_ = 0;
  std::uint64_t min_count_ = 1;
};

Vocabulary build_vocab(std::span<const std::string> tokens, std::uint64_t min_count);

// Probability of keeping one occurrence of a token with relative frequency
// f = token_count / total: min(1, sqrt(t / f)).
double subsample_keep_prob(std::uint64_t token_count, std::uint64_t total, double t);

}  // namespace morphvec
