#include "morphvec/subword.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "morphvec/errors.hpp"
#include "morphvec/store.hpp"

namespace morphvec {

namespace {

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

}  // namespace

std::vector<std::string> utf8_chars(std::string_view text) {
  std::vector<std::string> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = utf8_length(static_cast<unsigned char>(text[i]));
    if (i + len > text.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if (!is_continuation(static_cast<unsigned char>(text[i + k]))) {
        len = 1;
        break;
      }
    }
    out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

std::vector<std::string> extract_ngrams(std::string_view word, int n_min, int n_max) {
  if (word.empty()) throw std::invalid_argument("cannot extract n-grams of an empty word");
  if (word.find_first_of("<>") != std::string_view::npos)
    throw std::invalid_argument("word contains a boundary marker: " + std::string(word));
  if (n_min < 1 || n_min > n_max) throw std::invalid_argument("need 1 <= n_min <= n_max");

  std::vector<std::string> chars = utf8_chars(word);
  chars.insert(chars.begin(), "<");
  chars.emplace_back(">");
  const auto len = static_cast<int>(chars.size());

  std::vector<std::string> bag;
  for (int n = n_min; n <= n_max && n < len; ++n) {
    for (int start = 0; start + n <= len; ++start) {
      std::string gram;
      for (int k = start; k < start + n; ++k) gram += chars[k];
      bag.push_back(std::move(gram));
    }
  }
  bag.push_back("<" + std::string(word) + ">");
  return bag;
}

std::uint32_t fnv1a(std::string_view bytes) noexcept {
  std::uint32_t h = 2166136261u;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 16777619u;
  }
  return h;
}

std::size_t hash_ngram(std::string_view ngram, std::size_t buckets) {
  if (buckets == 0) throw std::invalid_argument("bucket count must be positive");
  return fnv1a(ngram) % buckets;
}

SubwordIndex::SubwordIndex(Vocabulary word_vocab, int n_min, int n_max, std::size_t buckets)
    : words_(std::move(word_vocab)), n_min_(n_min), n_max_(n_max), buckets_(buckets) {
  if (n_min < 1 || n_min > n_max) throw std::invalid_argument("need 1 <= n_min <= n_max");
  if (buckets == 0) throw std::invalid_argument("bucket count must be positive");
}

std::vector<std::size_t> SubwordIndex::ngram_buckets(std::string_view word) const {
  std::vector<std::size_t> out;
  if (word.empty() || word.find_first_of("<>") != std::string_view::npos) return out;
  for (const auto& gram : extract_ngrams(word, n_min_, n_max_))
    out.push_back(hash_ngram(gram, buckets_));
  return out;
}

std::vector<std::size_t> SubwordIndex::input_rows(std::string_view word) const {
  std::vector<std::size_t> rows;
  if (auto id = words_.find(word)) rows.push_back(*id);
  for (std::size_t b : ngram_buckets(word)) rows.push_back(words_.size() + b);
  return rows;
}

std::vector<Real> fasttext_word_vector(std::string_view word, const Matrix& word_table,
                                       const Matrix& ngram_table, const SubwordIndex& index) {
  std::vector<Real> out(ngram_table.cols(), 0);
  for (std::size_t b : index.ngram_buckets(word)) axpy(1, ngram_table.row(b), out);
  if (auto id = index.word_vocab().find(word)) axpy(1, word_table.row(*id), out);
  return out;
}

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& prefix, const char* suffix) {
  return std::filesystem::path(prefix.string() + suffix);
}

}  // namespace

void SubwordModel::save(const std::filesystem::path& prefix) const {
  {
    const auto meta = with_suffix(prefix, ".subword");
    std::ofstream out(meta, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + meta.string());
    out << "subword " << index.n_min() << ' ' << index.n_max() << ' ' << index.buckets() << '\n';
  }
  VectorStore words(word_table.cols());
  for (std::size_t i = 0; i < index.word_vocab().size(); ++i)
    words.set(index.word_vocab().token(i), word_table.row(i));
  save_text(words, with_suffix(prefix, ".words.vec"));

  VectorStore grams(ngram_table.cols());
  for (std::size_t b = 0; b < ngram_table.rows(); ++b) {
    auto row = ngram_table.row(b);
    if (std::any_of(row.begin(), row.end(), [](Real v) { return v != 0; }))
      grams.set(std::to_string(b), row);
  }
  save_text(grams, with_suffix(prefix, ".ngrams.vec"));
}

SubwordModel SubwordModel::load(const std::filesystem::path& prefix) {
  const auto meta = with_suffix(prefix, ".subword");
  std::ifstream in(meta, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + meta.string());
  std::string tag;
  int n_min = 0;
  int n_max = 0;
  std::size_t buckets = 0;
  if (!(in >> tag >> n_min >> n_max >> buckets) || tag != "subword")
    throw ParseError(meta.string(), 1, "expected 'subword <n_min> <n_max> <buckets>'");

  const VectorStore words = load_text(with_suffix(prefix, ".words.vec"));
  const auto grams_path = with_suffix(prefix, ".ngrams.vec");
  const VectorStore grams = load_text(grams_path);
  if (grams.dim() != words.dim())
    throw ParseError(grams_path.string(), 1, "n-gram table dimension differs from word table");

  std::vector<std::uint64_t> counts(words.size(), 0);
  SubwordIndex index(Vocabulary::from_ordered(words.tokens(), std::move(counts), 0), n_min, n_max,
                     buckets);
  Matrix ngram_table(buckets, words.dim());
  for (std::size_t i = 0; i < grams.size(); ++i) {
    std::size_t bucket = 0;
    const auto& tok = grams.token(i);
    auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), bucket);
    if (ec != std::errc{} || end != tok.data() + tok.size() || bucket >= buckets)
      throw ParseError(grams_path.string(), i + 2, "bad bucket id '" + tok + "'");
    auto row = grams.vector(i);
    std::copy(row.begin(), row.end(), ngram_table.row(bucket).begin());
  }
  return SubwordModel{std::move(index), words.to_matrix(), std::move(ngram_table)};
}

// ---------------------------------------------------------------------------
// BPE

BpeModel::BpeModel(std::vector<Merge> merges, Vocabulary piece_vocab, std::size_t target_size)
    : merges_(std::move(merges)), pieces_(std::move(piece_vocab)), target_size_(target_size) {
  for (std::size_t i = 0; i < merges_.size(); ++i) rank_.emplace(merges_[i], i);
}

std::vector<std::string> BpeModel::encode(std::string_view word) const {
  std::vector<std::string> symbols = utf8_chars(word);
  if (rank_.empty()) return symbols;
  while (symbols.size() > 1) {
    std::size_t best_rank = merges_.size();
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      auto it = rank_.find(Merge{symbols[i], symbols[i + 1]});
      if (it != rank_.end() && it->second < best_rank) best_rank = it->second;
    }
    if (best_rank == merges_.size()) break;
    const auto& [left, right] = merges_[best_rank];
    std::vector<std::string> next;
    next.reserve(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
        next.push_back(left + right);
        ++i;
      } else {
        next.push_back(std::move(symbols[i]));
      }
    }
    symbols = std::move(next);
  }
  return symbols;
}

void BpeModel::save(std::ostream& out) const {
  out << "bpe " << target_size_ << '\n';
  for (const auto& [left, right] : merges_) out << left << ' ' << right << '\n';
}

void BpeModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  save(out);
  if (!out) throw IoError("write failed: " + path.string());
}

BpeModel BpeModel::load(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing 'bpe <target_size>' header");
  std::size_t target = 0;
  {
    std::istringstream header(line);
    std::string tag;
    if (!(header >> tag >> target) || tag != "bpe" || !(header >> std::ws).eof())
      throw ParseError(source, 1, "expected 'bpe <target_size>'");
  }

  std::vector<Merge> merges;
  std::vector<std::string> pieces;
  std::unordered_set<std::string> seen;
  auto add_piece = [&](std::string p) {
    if (seen.insert(p).second) pieces.push_back(std::move(p));
  };
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto space = line.find(' ');
    if (space == std::string::npos || space == 0 || space + 1 == line.size() ||
        line.find(' ', space + 1) != std::string::npos)
      throw ParseError(source, lineno, "expected 'left right'");
    std::string left = line.substr(0, space);
    std::string right = line.substr(space + 1);
    for (const auto& side : {left, right})
      for (auto& c : utf8_chars(side)) add_piece(std::move(c));
    add_piece(left + right);
    merges.emplace_back(std::move(left), std::move(right));
  }
  std::vector<std::uint64_t> counts(pieces.size(), 0);
  return BpeModel(std::move(merges), Vocabulary::from_ordered(std::move(pieces), std::move(counts), 0),
                  target);
}

BpeModel BpeModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return load(in, path.string());
}

namespace {

// Incremental pair statistics for greedy BPE training.
class BpeTrainer {
 public:
  explicit BpeTrainer(const WordCounts& words) {
    for (const auto& [word, count] : words) {
      if (count == 0 || word.empty()) continue;
      Word w;
      w.count = count;
      for (auto& c : utf8_chars(word)) {
        const int id = intern(c);
        char_counts_[id] += count;
        w.symbols.push_back(id);
      }
      words_.push_back(std::move(w));
    }
    for (std::size_t i = 0; i < words_.size(); ++i) add_pairs(i, +1);
  }

  std::size_t alphabet_size() const { return char_counts_.size(); }

  BpeModel run(std::size_t target_size) {
    std::vector<std::pair<int, std::uint64_t>> alphabet(char_counts_.begin(), char_counts_.end());
    std::sort(alphabet.begin(), alphabet.end(), [&](const auto& a, const auto& b) {
      return symbols_[a.first] < symbols_[b.first];
    });
    std::vector<std::string> piece_tokens;
    std::vector<std::uint64_t> piece_counts;
    std::unordered_set<std::string> piece_set;
    for (const auto& [id, n] : alphabet) {
      piece_tokens.push_back(symbols_[id]);
      piece_counts.push_back(n);
      piece_set.insert(symbols_[id]);
    }

    std::vector<BpeModel::Merge> merges;
    while (piece_tokens.size() < target_size && !queue_.empty()) {
      const Entry best = *queue_.begin();
      if (best.count < 2) break;
      const std::string merged = symbols_[best.left] + symbols_[best.right];
      merges.emplace_back(symbols_[best.left], symbols_[best.right]);
      if (piece_set.insert(merged).second) {
        piece_tokens.push_back(merged);
        piece_counts.push_back(best.count);
      }
      apply_merge(best.left, best.right, intern(merged));
    }
    return BpeModel(std::move(merges),
                    Vocabulary::from_ordered(std::move(piece_tokens), std::move(piece_counts), 0),
                    target_size);
  }

 private:
  struct Word {
    std::vector<int> symbols;
    std::uint64_t count = 0;
  };

  struct Entry {
    std::uint64_t count;
    int left;
    int right;
  };

  struct EntryOrder {
    const std::vector<std::string>* symbols;
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.count != b.count) return a.count > b.count;
      const auto& sa = *symbols;
      if (sa[a.left] != sa[b.left]) return sa[a.left] < sa[b.left];
      return sa[a.right] < sa[b.right];
    }
  };

  static std::uint64_t key(int left, int right) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(left)) << 32) |
           static_cast<std::uint32_t>(right);
  }

  int intern(const std::string& s) {
    auto [it, inserted] = ids_.emplace(s, static_cast<int>(symbols_.size()));
    if (inserted) symbols_.push_back(s);
    return it->second;
  }

  void bump(int left, int right, std::int64_t delta, std::size_t word) {
    const std::uint64_t k = key(left, right);
    auto& count = pair_counts_[k];
    if (count > 0) queue_.erase(Entry{count, left, right});
    count = static_cast<std::uint64_t>(static_cast<std::int64_t>(count) + delta);
    if (count > 0) queue_.insert(Entry{count, left, right});
    if (delta > 0) where_[k].insert(word);
  }

  void add_pairs(std::size_t word, int sign) {
    const Word& w = words_[word];
    for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i)
      bump(w.symbols[i], w.symbols[i + 1], sign * static_cast<std::int64_t>(w.count), word);
  }

  void apply_merge(int left, int right, int merged) {
    auto found = where_.find(key(left, right));
    if (found == where_.end()) return;
    std::vector<std::size_t> affected(found->second.begin(), found->second.end());
    std::sort(affected.begin(), affected.end());
    for (std::size_t word : affected) {
      Word& w = words_[word];
      bool present = false;
      for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i)
        if (w.symbols[i] == left && w.symbols[i + 1] == right) present = true;
      if (!present) continue;
      add_pairs(word, -1);
      std::vector<int> next;
      next.reserve(w.symbols.size());
      for (std::size_t i = 0; i < w.symbols.size(); ++i) {
        if (i + 1 < w.symbols.size() && w.symbols[i] == left && w.symbols[i + 1] == right) {
          next.push_back(merged);
          ++i;
        } else {
          next.push_back(w.symbols[i]);
        }
      }
      w.symbols = std::move(next);
      add_pairs(word, +1);
    }
  }

  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> ids_;
  std::unordered_map<int, std::uint64_t> char_counts_;
  std::vector<Word> words_;
  std::unordered_map<std::uint64_t, std::uint64_t> pair_counts_;
  std::unordered_map<std::uint64_t, std::unordered_set<std::size_t>> where_;
  std::set<Entry, EntryOrder> queue_{EntryOrder{&symbols_}};
};

}  // namespace

BpeModel train_bpe(const WordCounts& words, std::size_t target_size) {
  BpeTrainer trainer(words);
  if (trainer.alphabet_size() == 0) throw std::invalid_argument("BPE training needs at least one word");
  if (target_size < trainer.alphabet_size())
    throw std::invalid_argument("target size " + std::to_string(target_size) +
                                " is below the alphabet size " +
                                std::to_string(trainer.alphabet_size()));
  return trainer.run(target_size);
}

}  // namespace morphvec
