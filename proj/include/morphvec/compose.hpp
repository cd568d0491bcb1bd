#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "morphvec/corpus.hpp"
#include "morphvec/matrix.hpp"
#include "morphvec/store.hpp"
#include "morphvec/subword.hpp"

namespace morphvec {

enum class Scheme {
  Surface,
  Lemma,
  LemmaSuffixLemmaOnly,
  LemmaSuffixAverage,
  DerivedSuffix,
  PieceAverage,
  FastText,
};

// "surface", "lemma", "lemma-suffix-lemma", "lemma-suffix-average",
// "derived-suffix", "piece-average", "fasttext"
std::optional<Scheme> parse_scheme(std::string_view name);
std::string_view to_string(Scheme scheme);

// Per-suffix mean of (surface - lemma) vector differences.
struct SuffixOffsetTable {
  std::size_t dim = 0;
  std::map<std::uint32_t, std::vector<Real>> offsets;
  std::map<std::uint32_t, std::size_t> support;
  // Pairs dropped because the surface or lemma vector was missing.
  std::map<std::uint32_t, std::size_t> skipped;

  const std::vector<Real>* find(std::uint32_t suffix_id) const {
    auto it = offsets.find(suffix_id);
    return it == offsets.end() ? nullptr : &it->second;
  }

  // Offsets as a store keyed by ">>id"; support counts go to a sidecar
  // "<path>.support" TSV (suffix, support, skipped).
  VectorStore to_store() const;
  static SuffixOffsetTable from_store(const VectorStore& store);
  void save(const std::filesystem::path& path) const;
  static SuffixOffsetTable load(const std::filesystem::path& path);
};

// Surface and lemma vectors both come from `store`.
SuffixOffsetTable derive_suffix_offsets(std::span<const AnnotatedType> types,
                                        const VectorStore& store);

// Variant taking the lemma side of each difference from a second store.
SuffixOffsetTable derive_suffix_offsets(std::span<const AnnotatedType> types,
                                        const VectorStore& surface_store,
                                        const VectorStore& lemma_store);

// Borrowed stores; a scheme only reads the members it needs.
struct StoreBundle {
  const VectorStore* surface = nullptr;
  const VectorStore* lemma = nullptr;
  const VectorStore* lemma_suffix = nullptr;
  const VectorStore* pieces = nullptr;
  const SuffixOffsetTable* offsets = nullptr;
  const BpeModel* bpe = nullptr;
  const SubwordModel* subword = nullptr;
};

// Names of the bundle members `scheme` needs but `stores` lacks.
std::vector<std::string> missing_requirements(Scheme scheme, const StoreBundle& stores);

// Throws ConfigError listing the missing members.
void check_requirements(Scheme scheme, const StoreBundle& stores);

std::size_t bundle_dim(Scheme scheme, const StoreBundle& stores);

// nullopt marks the word as out of vocabulary under this scheme.
std::optional<std::vector<Real>> compose(const AnnotatedToken& word, Scheme scheme,
                                         const StoreBundle& stores);

std::vector<Real> oov_vector(std::size_t dim, Real value = 0);

// Surface form -> most frequent analysis in an annotated corpus (first seen
// wins ties). Lets evaluation resolve plain words under lemma-based schemes.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::span<const AnnotatedType> types);

  std::optional<AnnotatedToken> analyze(std::string_view surface) const;
  const std::vector<std::string>& surfaces() const noexcept { return order_; }
  std::size_t size() const noexcept { return order_.size(); }

 private:
  std::unordered_map<std::string, std::pair<AnnotatedToken, std::uint64_t>> entries_;
  std::vector<std::string> order_;
};

// Resolves plain words to vectors under one scheme. Words the lexicon does
// not know are analyzed as (surface, surface, 0).
class Composer {
 public:
  Composer(Scheme scheme, StoreBundle stores, const Lexicon* lexicon = nullptr, Real oov_value = 0);

  Scheme scheme() const noexcept { return scheme_; }
  std::size_t dim() const noexcept { return dim_; }

  std::optional<std::vector<Real>> resolve(std::string_view word) const;
  std::vector<Real> resolve_or_oov(std::string_view word) const;
  const std::vector<Real>& oov() const noexcept { return oov_; }

  // Composed vectors for every resolvable word, in the given order.
  VectorStore materialize(std::span<const std::string> words) const;

 private:
  Scheme scheme_;
  StoreBundle stores_;
  const Lexicon* lexicon_;
  std::size_t dim_;
  std::vector<Real> oov_;
};

}  // namespace morphvec
