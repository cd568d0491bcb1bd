#include "morphvec/compose.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "morphvec/errors.hpp"

namespace morphvec {

namespace {

std::vector<Real> to_vec(std::span<const Real> s) { return {s.begin(), s.end()}; }

void accumulate_pair(const AnnotatedType& t, const VectorStore& surface_store,
                     const VectorStore& lemma_store, SuffixOffsetTable& table,
                     std::map<std::uint32_t, std::vector<Real>>& sums) {
  auto surface = surface_store.lookup(t.surface);
  auto lemma = lemma_store.lookup(t.lemma);
  if (!surface || !lemma) {
    ++table.skipped[t.suffix_id];
    return;
  }
  auto& sum = sums[t.suffix_id];
  if (sum.empty()) sum.assign(table.dim, 0);
  for (std::size_t k = 0; k < table.dim; ++k) sum[k] += (*surface)[k] - (*lemma)[k];
  ++table.support[t.suffix_id];
}

}  // namespace

std::optional<Scheme> parse_scheme(std::string_view name) {
  if (name == "surface") return Scheme::Surface;
  if (name == "lemma") return Scheme::Lemma;
  if (name == "lemma-suffix-lemma") return Scheme::LemmaSuffixLemmaOnly;
  if (name == "lemma-suffix-average") return Scheme::LemmaSuffixAverage;
  if (name == "derived-suffix") return Scheme::DerivedSuffix;
  if (name == "piece-average") return Scheme::PieceAverage;
  if (name == "fasttext") return Scheme::FastText;
  return std::nullopt;
}

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Surface: return "surface";
    case Scheme::Lemma: return "lemma";
    case Scheme::LemmaSuffixLemmaOnly: return "lemma-suffix-lemma";
    case Scheme::LemmaSuffixAverage: return "lemma-suffix-average";
    case Scheme::DerivedSuffix: return "derived-suffix";
    case Scheme::PieceAverage: return "piece-average";
    case Scheme::FastText: return "fasttext";
  }
  return "?";
}

VectorStore SuffixOffsetTable::to_store() const {
  VectorStore store(dim);
  for (const auto& [id, vec] : offsets) store.set(suffix_token(id), vec);
  return store;
}

SuffixOffsetTable SuffixOffsetTable::from_store(const VectorStore& store) {
  SuffixOffsetTable table;
  table.dim = store.dim();
  for (std::size_t i = 0; i < store.size(); ++i) {
    auto id = parse_suffix_token(store.token(i));
    if (!id) throw ParseError("offsets", i + 2, "not a suffix token: '" + store.token(i) + "'");
    table.offsets[*id] = to_vec(store.vector(i));
    table.support[*id] = 1;
  }
  return table;
}

void SuffixOffsetTable::save(const std::filesystem::path& path) const {
  save_text(to_store(), path);
  const std::filesystem::path side(path.string() + ".support");
  std::ofstream out(side, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + side.string());
  std::map<std::uint32_t, std::pair<std::size_t, std::size_t>> rows;
  for (const auto& [id, n] : support) rows[id].first = n;
  for (const auto& [id, n] : skipped) rows[id].second = n;
  for (const auto& [id, r] : rows) out << suffix_token(id) << '\t' << r.first << '\t' << r.second << '\n';
}

SuffixOffsetTable SuffixOffsetTable::load(const std::filesystem::path& path) {
  SuffixOffsetTable table = from_store(load_text(path));
  const std::filesystem::path side(path.string() + ".support");
  std::ifstream in(side, std::ios::binary);
  if (!in) return table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string token;
    std::size_t support = 0;
    std::size_t skipped = 0;
    if (!(fields >> token >> support >> skipped))
      throw ParseError(side.string(), lineno, "expected 'suffix support skipped'");
    auto id = parse_suffix_token(token);
    if (!id) throw ParseError(side.string(), lineno, "not a suffix token: '" + token + "'");
    if (table.offsets.count(*id)) table.support[*id] = support;
    if (skipped > 0) table.skipped[*id] = skipped;
  }
  return table;
}

SuffixOffsetTable derive_suffix_offsets(std::span<const AnnotatedType> types,
                                        const VectorStore& store) {
  return derive_suffix_offsets(types, store, store);
}

SuffixOffsetTable derive_suffix_offsets(std::span<const AnnotatedType> types,
                                        const VectorStore& surface_store,
                                        const VectorStore& lemma_store) {
  if (surface_store.dim() != lemma_store.dim())
    throw std::invalid_argument("surface and lemma stores differ in dimension");
  SuffixOffsetTable table;
  table.dim = surface_store.dim();
  std::map<std::uint32_t, std::vector<Real>> sums;
  for (const auto& t : types) accumulate_pair(t, surface_store, lemma_store, table, sums);
  if (sums.empty()) throw std::invalid_argument("no (surface, lemma) pair has both vectors in the store");
  for (auto& [id, sum] : sums) {
    const double n = static_cast<double>(table.support[id]);
    for (Real& v : sum) v /= n;
    table.offsets[id] = std::move(sum);
  }
  return table;
}

std::vector<std::string> missing_requirements(Scheme scheme, const StoreBundle& s) {
  std::vector<std::string> missing;
  auto need = [&](bool present, const char* name) {
    if (!present) missing.emplace_back(name);
  };
  switch (scheme) {
    case Scheme::Surface: need(s.surface, "surface store"); break;
    case Scheme::Lemma: need(s.lemma, "lemma store"); break;
    case Scheme::LemmaSuffixLemmaOnly:
    case Scheme::LemmaSuffixAverage: need(s.lemma_suffix, "lemma-suffix store"); break;
    case Scheme::DerivedSuffix:
      need(s.lemma, "lemma store");
      need(s.offsets, "suffix offset table");
      break;
    case Scheme::PieceAverage:
      need(s.pieces, "piece store");
      need(s.bpe, "BPE model");
      break;
    case Scheme::FastText: need(s.subword, "subword model"); break;
  }
  return missing;
}

void check_requirements(Scheme scheme, const StoreBundle& stores) {
  const auto missing = missing_requirements(scheme, stores);
  if (missing.empty()) return;
  std::string msg = "scheme '" + std::string(to_string(scheme)) + "' is missing:";
  for (const auto& m : missing) msg += " " + m + ";";
  msg.pop_back();
  throw ConfigError(msg);
}

std::size_t bundle_dim(Scheme scheme, const StoreBundle& s) {
  check_requirements(scheme, s);
  switch (scheme) {
    case Scheme::Surface: return s.surface->dim();
    case Scheme::Lemma: return s.lemma->dim();
    case Scheme::LemmaSuffixLemmaOnly:
    case Scheme::LemmaSuffixAverage: return s.lemma_suffix->dim();
    case Scheme::DerivedSuffix:
      if (s.offsets->dim != s.lemma->dim())
        throw ConfigError("suffix offsets and lemma store differ in dimension");
      return s.lemma->dim();
    case Scheme::PieceAverage: return s.pieces->dim();
    case Scheme::FastText: return s.subword->ngram_table.cols();
  }
  return 0;
}

std::optional<std::vector<Real>> compose(const AnnotatedToken& word, Scheme scheme,
                                         const StoreBundle& s) {
  check_requirements(scheme, s);
  switch (scheme) {
    case Scheme::Surface:
      if (auto v = s.surface->lookup(word.surface)) return to_vec(*v);
      return std::nullopt;
    case Scheme::Lemma:
      if (auto v = s.lemma->lookup(word.lemma)) return to_vec(*v);
      return std::nullopt;
    case Scheme::LemmaSuffixLemmaOnly:
      if (auto v = s.lemma_suffix->lookup(word.lemma)) return to_vec(*v);
      return std::nullopt;
    case Scheme::LemmaSuffixAverage: {
      auto lemma = s.lemma_suffix->lookup(word.lemma);
      auto suffix = s.lemma_suffix->lookup(suffix_token(word.suffix_id));
      if (!lemma || !suffix) return std::nullopt;
      std::vector<Real> out(lemma->size());
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = ((*lemma)[k] + (*suffix)[k]) / 2;
      return out;
    }
    case Scheme::DerivedSuffix: {
      auto lemma = s.lemma->lookup(word.lemma);
      const auto* offset = s.offsets->find(word.suffix_id);
      if (!lemma || !offset) return std::nullopt;
      if (offset->size() != lemma->size())
        throw ConfigError("suffix offsets and lemma store differ in dimension");
      std::vector<Real> out(lemma->size());
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = (*lemma)[k] + (*offset)[k];
      return out;
    }
    case Scheme::PieceAverage: {
      std::vector<Real> out(s.pieces->dim(), 0);
      std::size_t found = 0;
      for (const auto& piece : s.bpe->encode(word.surface)) {
        if (auto v = s.pieces->lookup(piece)) {
          axpy(1, *v, out);
          ++found;
        }
      }
      if (found == 0) return std::nullopt;
      for (Real& v : out) v /= static_cast<double>(found);
      return out;
    }
    case Scheme::FastText:
      return s.subword->vector(word.surface);
  }
  return std::nullopt;
}

std::vector<Real> oov_vector(std::size_t dim, Real value) { return std::vector<Real>(dim, value); }

Lexicon::Lexicon(std::span<const AnnotatedType> types) {
  for (const auto& t : types) {
    auto it = entries_.find(t.surface);
    if (it == entries_.end()) {
      entries_.emplace(t.surface, std::make_pair(AnnotatedToken{t.surface, t.lemma, t.suffix_id}, t.count));
      order_.push_back(t.surface);
    } else if (t.count > it->second.second) {
      it->second = {AnnotatedToken{t.surface, t.lemma, t.suffix_id}, t.count};
    }
  }
}

std::optional<AnnotatedToken> Lexicon::analyze(std::string_view surface) const {
  auto it = entries_.find(std::string(surface));
  if (it == entries_.end()) return std::nullopt;
  return it->second.first;
}

Composer::Composer(Scheme scheme, StoreBundle stores, const Lexicon* lexicon, Real oov_value)
    : scheme_(scheme), stores_(stores), lexicon_(lexicon), dim_(bundle_dim(scheme, stores)),
      oov_(oov_vector(dim_, oov_value)) {}

std::optional<std::vector<Real>> Composer::resolve(std::string_view word) const {
  std::optional<AnnotatedToken> analysis;
  if (lexicon_) analysis = lexicon_->analyze(word);
  if (!analysis) analysis = AnnotatedToken{std::string(word), std::string(word), 0};
  return compose(*analysis, scheme_, stores_);
}

std::vector<Real> Composer::resolve_or_oov(std::string_view word) const {
  if (auto v = resolve(word)) return std::move(*v);
  return oov_;
}

VectorStore Composer::materialize(std::span<const std::string> words) const {
  VectorStore store(dim_);
  for (const auto& w : words)
    if (auto v = resolve(w)) store.set(w, *v);
  return store;
}

}  // namespace morphvec
