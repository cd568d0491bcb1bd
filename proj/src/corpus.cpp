#include "morphvec/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "morphvec/errors.hpp"

namespace morphvec {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

bool has_space(std::string_view s) { return std::any_of(s.begin(), s.end(), is_space); }

bool is_blank(std::string_view s) { return std::all_of(s.begin(), s.end(), is_space); }

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

}  // namespace

std::optional<MorphForm> parse_morph_form(std::string_view name) {
  if (name == "surface") return MorphForm::Surface;
  if (name == "lemma") return MorphForm::Lemma;
  if (name == "lemma-suffix") return MorphForm::LemmaSuffix;
  if (name == "pieces") return MorphForm::Pieces;
  return std::nullopt;
}

std::string_view to_string(MorphForm form) {
  switch (form) {
    case MorphForm::Surface: return "surface";
    case MorphForm::Lemma: return "lemma";
    case MorphForm::LemmaSuffix: return "lemma-suffix";
    case MorphForm::Pieces: return "pieces";
  }
  return "?";
}

std::string suffix_token(std::uint32_t suffix_id) {
  return std::string(kSuffixPrefix) + std::to_string(suffix_id);
}

std::optional<std::uint32_t> parse_suffix_token(std::string_view token) {
  if (!token.starts_with(kSuffixPrefix)) return std::nullopt;
  token.remove_prefix(kSuffixPrefix.size());
  std::uint32_t id = 0;
  auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), id);
  if (ec != std::errc{} || end != token.data() + token.size() || token.empty()) return std::nullopt;
  return id;
}

AnnotatedReader::AnnotatedReader(std::istream& in, std::string source)
    : in_(in), source_(std::move(source)) {}

bool AnnotatedReader::next(Sentence& sentence) {
  sentence.clear();
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) {
      if (sentence.empty()) continue;
      return true;
    }

    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos || line.find('\t', tab2 + 1) != std::string::npos)
      throw ParseError(source_, line_, "expected 3 tab-separated fields");

    std::string_view view(line);
    AnnotatedToken token;
    token.surface = std::string(view.substr(0, tab1));
    token.lemma = std::string(view.substr(tab1 + 1, tab2 - tab1 - 1));
    const std::string_view id_field = view.substr(tab2 + 1);
    if (token.surface.empty() || has_space(token.surface))
      throw ParseError(source_, line_, "surface form must be non-empty and whitespace-free");
    if (token.lemma.empty() || has_space(token.lemma))
      throw ParseError(source_, line_, "lemma must be non-empty and whitespace-free");
    auto [end, ec] =
        std::from_chars(id_field.data(), id_field.data() + id_field.size(), token.suffix_id);
    if (id_field.empty() || ec != std::errc{} || end != id_field.data() + id_field.size())
      throw ParseError(source_, line_, "suffix id is not a non-negative integer: '" +
                                           std::string(id_field) + "'");
    sentence.push_back(std::move(token));
  }
  return !sentence.empty();
}

std::vector<Sentence> read_annotated(std::istream& in, const std::string& source) {
  AnnotatedReader reader(in, source);
  std::vector<Sentence> out;
  Sentence s;
  while (reader.next(s)) out.push_back(s);
  return out;
}

std::vector<Sentence> read_annotated(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_annotated(in, path.string());
}

std::vector<std::string> split_whitespace(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string> render_form(std::span<const AnnotatedToken> sentence, MorphForm form,
                                     const BpeModel* bpe) {
  if (form == MorphForm::Pieces && bpe == nullptr)
    throw std::invalid_argument("pieces form needs a BPE model");
  std::vector<std::string> out;
  out.reserve(form == MorphForm::LemmaSuffix ? 2 * sentence.size() : sentence.size());
  for (const auto& token : sentence) {
    switch (form) {
      case MorphForm::Surface:
        out.push_back(token.surface);
        break;
      case MorphForm::Lemma:
        out.push_back(token.lemma);
        break;
      case MorphForm::LemmaSuffix:
        out.push_back(token.lemma);
        out.push_back(suffix_token(token.suffix_id));
        break;
      case MorphForm::Pieces:
        for (auto& piece : bpe->encode(token.surface)) out.push_back(std::move(piece));
        break;
    }
  }
  return out;
}

void InMemorySource::for_each(const Visitor& visit) const {
  for (const auto& s : sentences_) visit(s);
}

RawFileSource::RawFileSource(std::filesystem::path path) : path_(std::move(path)) {}

void RawFileSource::for_each(const Visitor& visit) const {
  auto in = open_input(path_);
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = split_whitespace(line);
    if (!tokens.empty()) visit(tokens);
  }
}

AnnotatedFileSource::AnnotatedFileSource(std::filesystem::path path, MorphForm form,
                                         const BpeModel* bpe)
    : path_(std::move(path)), form_(form), bpe_(bpe) {
  if (form == MorphForm::Pieces && bpe == nullptr)
    throw std::invalid_argument("pieces form needs a BPE model");
}

void AnnotatedFileSource::for_each(const Visitor& visit) const {
  auto in = open_input(path_);
  AnnotatedReader reader(in, path_.string());
  Sentence s;
  while (reader.next(s)) visit(render_form(s, form_, bpe_));
}

TokenCounter count_tokens(const SentenceSource& source) {
  TokenCounter counter;
  source.for_each([&](std::span<const std::string> tokens) { counter.add_all(tokens); });
  return counter;
}

std::vector<AnnotatedType> collect_annotated_types(std::span<const Sentence> sentences) {
  std::vector<AnnotatedType> out;
  std::map<std::tuple<std::string_view, std::string_view, std::uint32_t>, std::size_t> where;
  for (const auto& s : sentences) {
    for (const auto& t : s) {
      auto key = std::make_tuple(std::string_view(t.surface), std::string_view(t.lemma), t.suffix_id);
      auto it = where.find(key);
      if (it != where.end()) {
        ++out[it->second].count;
        continue;
      }
      out.push_back({t.surface, t.lemma, t.suffix_id, 1});
      where.emplace(key, out.size() - 1);
    }
  }
  return out;
}

}  // namespace morphvec
