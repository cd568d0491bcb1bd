#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "morphvec/subword.hpp"
#include "morphvec/vocab.hpp"

namespace morphvec {

// One corpus word as produced by an upstream morphological analyzer.
// suffix_id 0 means the word carries no inflection.
struct AnnotatedToken {
  std::string surface;
  std::string lemma;
  std::uint32_t suffix_id = 0;

  friend bool operator==(const AnnotatedToken&, const AnnotatedToken&) = default;
};

using Sentence = std::vector<AnnotatedToken>;

enum class MorphForm { Surface, Lemma, LemmaSuffix, Pieces };

// "surface", "lemma", "lemma-suffix", "pieces"
std::optional<MorphForm> parse_morph_form(std::string_view name);
std::string_view to_string(MorphForm form);

// Marker prepended to suffix ids when they are rendered as tokens.
inline constexpr std::string_view kSuffixPrefix = ">>";

std::string suffix_token(std::uint32_t suffix_id);
std::optional<std::uint32_t> parse_suffix_token(std::string_view token);

// Streams sentences from `surface<TAB>lemma<TAB>suffix_id` lines; a blank
// line ends a sentence.
class AnnotatedReader {
 public:
  AnnotatedReader(std::istream& in, std::string source = "annotated");

  // False at end of input.
  bool next(Sentence& sentence);

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
};

std::vector<Sentence> read_annotated(std::istream& in, const std::string& source = "annotated");
std::vector<Sentence> read_annotated(const std::filesystem::path& path);

std::vector<std::string> split_whitespace(std::string_view line);

// Pieces requires a BPE model; passing none for it is a contract violation.
std::vector<std::string> render_form(std::span<const AnnotatedToken> sentence, MorphForm form,
                                     const BpeModel* bpe = nullptr);

// A replayable sequence of token sentences. Training walks it once per
// epoch; each call must yield the same sentences in the same order.
class SentenceSource {
 public:
  using Visitor = std::function<void(std::span<const std::string>)>;
  virtual ~SentenceSource() = default;
  virtual void for_each(const Visitor& visit) const = 0;
};

class InMemorySource final : public SentenceSource {
 public:
  explicit InMemorySource(std::vector<std::vector<std::string>> sentences)
      : sentences_(std::move(sentences)) {}
  void for_each(const Visitor& visit) const override;
  const std::vector<std::vector<std::string>>& sentences() const noexcept { return sentences_; }

 private:
  std::vector<std::vector<std::string>> sentences_;
};

// Raw text: one sentence per line, whitespace tokenized. Re-read from disk on
// every pass.
class RawFileSource final : public SentenceSource {
 public:
  explicit RawFileSource(std::filesystem::path path);
  void for_each(const Visitor& visit) const override;

 private:
  std::filesystem::path path_;
};

// Annotated corpus rendered on the fly into one of the training forms.
class AnnotatedFileSource final : public SentenceSource {
 public:
  AnnotatedFileSource(std::filesystem::path path, MorphForm form, const BpeModel* bpe = nullptr);
  void for_each(const Visitor& visit) const override;

 private:
  std::filesystem::path path_;
  MorphForm form_;
  const BpeModel* bpe_;
};

TokenCounter count_tokens(const SentenceSource& source);

// One row per distinct (surface, lemma, suffix_id) triple with its corpus
// frequency, in first-seen order.
struct AnnotatedType {
  std::string surface;
  std::string lemma;
  std::uint32_t suffix_id = 0;
  std::uint64_t count = 0;
};

std::vector<AnnotatedType> collect_annotated_types(std::span<const Sentence> sentences);

}  // namespace morphvec
