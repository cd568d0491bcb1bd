#include "morphvec/vocab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace morphvec {

void TokenCounter::add(std::string_view token, std::uint64_t n) {
  auto it = counts_.find(std::string(token));
  if (it == counts_.end())
    counts_.emplace(std::string(token), n);
  else
    it->second += n;
}

void TokenCounter::add_all(std::span<const std::string> tokens) {
  for (const auto& t : tokens) ++counts_[t];
}

void TokenCounter::merge(const TokenCounter& other) {
  for (const auto& [token, n] : other.counts_) counts_[token] += n;
}

Vocabulary Vocabulary::from_counts(const TokenCounter& counter, std::uint64_t min_count) {
  if (min_count == 0) throw std::invalid_argument("min_count must be positive");
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (const auto& [token, n] : counter.counts())
    if (n >= min_count) kept.emplace_back(token, n);
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary v;
  v.min_count_ = min_count;
  v.tokens_.reserve(kept.size());
  v.counts_.reserve(kept.size());
  for (auto& [token, n] : kept) {
    v.tokens_.push_back(std::move(token));
    v.counts_.push_back(n);
  }
  v.rebuild_index();
  return v;
}

Vocabulary Vocabulary::from_ordered(std::vector<std::string> tokens,
                                    std::vector<std::uint64_t> counts,
                                    std::uint64_t min_count) {
  if (tokens.size() != counts.size())
    throw std::invalid_argument("token and count lists differ in length");
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  v.counts_ = std::move(counts);
  v.min_count_ = min_count;
  v.rebuild_index();
  if (v.index_.size() != v.tokens_.size())
    throw std::invalid_argument("duplicate token in vocabulary");
  return v;
}

void Vocabulary::rebuild_index() {
  index_.clear();
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], i);
  total_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::optional<std::size_t> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocab(std::span<const std::string> tokens, std::uint64_t min_count) {
  TokenCounter counter;
  counter.add_all(tokens);
  return Vocabulary::from_counts(counter, min_count);
}

double subsample_keep_prob(std::uint64_t token_count, std::uint64_t total, double t) {
  if (total == 0) throw std::invalid_argument("subsampling needs a non-empty corpus");
  if (token_count > total) throw std::invalid_argument("token count exceeds corpus total");
  if (!(t > 0)) throw std::invalid_argument("subsampling threshold must be positive");
  const double f = static_cast<double>(token_count) / static_cast<double>(total);
  if (f <= t) return 1.0;
  return std::sqrt(t / f);
}

}  // namespace morphvec
