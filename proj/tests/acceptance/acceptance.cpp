// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "morphvec/compose.hpp"
#include "morphvec/eval.hpp"
#include "morphvec/store.hpp"
#include "morphvec/subword.hpp"
#include "morphvec/trainer.hpp"
#include "oracles.hpp"

using namespace morphvec;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::vector<std::string> store_text(const VectorStore& s) {
  std::ostringstream out;
  save_text(s, out);
  return {out.str()};
}

Vocabulary vocab_of(const std::vector<std::vector<std::string>>& sentences, std::uint64_t min_count) {
  TokenCounter counter;
  for (const auto& s : sentences) counter.add_all(s);
  return Vocabulary::from_counts(counter, min_count);
}

// The planted-topic training recipe shared by the clustering and
// classification checks.
TrainConfig planted_recipe() {
  TrainConfig cfg;
  cfg.model = ModelKind::Cbow;
  cfg.dim = 50;
  cfg.epochs = 5;
  cfg.threads = 1;
  cfg.seed = 1;
  return cfg;
}

Outcome ngram_bag() {
  const std::vector<std::string> want{"<wh", "whe", "her", "ere", "re>", "<whe", "wher", "here", "ere>", "<where>"};
  const auto got = extract_ngrams("where", 3, 4);
  std::string joined;
  for (const auto& g : got) joined += g + " ";
  return {got == want, std::to_string(got.size()) + " entries: " + joined};
}

Outcome gradients() {
  std::mt19937_64 rng(2024);
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t v = 7 + rng() % 14, dim = 1 + rng() % 8, k = 1 + rng() % 5;
    worst = std::max(worst, oracle::gradient_check(rng, v, dim, k, 2 + rng() % 4).relative_error);
    worst = std::max(worst, oracle::gradient_check(rng, v, dim, k, 1).relative_error);
  }
  return {worst < 1e-4, "max relative error " + fmt("%.3g", worst) + " over 50 CBOW + 50 Skip-Gram instances"};
}

Outcome determinism() {
  const auto sentences = oracle::planted_topic_corpus(11, 4, 50, 10'000);
  const InMemorySource corpus(sentences);
  const auto vocab = vocab_of(sentences, 1);
  TrainConfig cfg;
  cfg.dim = 32;
  cfg.min_count = 1;
  const auto a = store_text(word_store(train(corpus, vocab, cfg)));
  const auto b = store_text(word_store(train(corpus, vocab, cfg)));
  return {a == b, "two runs on 10000 tokens, " + std::to_string(a[0].size()) + " bytes each"};
}

Outcome analogy_oracle() {
  std::mt19937_64 rng(99);
  std::size_t mismatches = 0, checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t size = 3 + rng() % 498;
    const auto store = oracle::random_store(rng, size, 1 + rng() % 10, trial % 4 == 0 ? 3 : 0);
    const NeighborIndex index(store);
    const auto resolve = store_resolver(store);
    for (int q = 0; q < 5; ++q) {
      const std::string a = store.token(rng() % size), b = store.token(rng() % size), c = store.token(rng() % size);
      const bool exclude = rng() % 2;
      const std::size_t top = 1 + rng() % 40;
      const auto got = analogy_predict(a, b, c, index, resolve, top, exclude);
      std::vector<Real> query(store.dim());
      const auto va = *store.lookup(a), vb = *store.lookup(b), vc = *store.lookup(c);
      for (std::size_t k = 0; k < query.size(); ++k) query[k] = vb[k] - va[k] + vc[k];
      std::vector<std::string> ex;
      if (exclude) ex = {a, b, c};
      const auto want = oracle::brute_force_rank(store, query, ex, top);
      ++checked;
      std::vector<std::pair<std::string, double>> have;
      if (got)
        for (const auto& r : *got) have.emplace_back(r.token, r.similarity);
      mismatches += have != want;
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches in " + std::to_string(checked) + " rankings"};
}

Outcome analogy_ceiling() {
  std::mt19937_64 rng(5);
  const std::size_t n = 100, dim = 2 * n + 1;
  VectorStore store(dim);
  std::vector<AnalogyQuestion> qs;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Real> a(dim, 0), b(dim, 0);
    a[2 * i] = 1;
    b[2 * i + 1] = 1;
    auto c = a, d = b;
    c[dim - 1] = d[dim - 1] = oracle::uniform(rng, 0.5, 1.5);
    const auto t = std::to_string(i);
    store.set("a" + t, a);
    store.set("b" + t, b);
    store.set("c" + t, c);
    store.set("d" + t, d);
    qs.push_back({"a" + t, "b" + t, "c" + t, "d" + t});
  }
  const auto r = analogy_accuracy(qs, store);
  bool monotone = true;
  for (std::size_t k = 1; k < r.accuracy.size(); ++k) monotone &= r.accuracy[k] >= r.accuracy[k - 1];
  std::string row;
  for (double a : r.accuracy) row += fmt("%.2f ", a);
  return {r.accuracy[0] == 1.0 && monotone, "accuracy at 1/3/5/10/20/40: " + row};
}

Outcome derived_suffix() {
  std::mt19937_64 rng(8);
  VectorStore store(4);
  std::vector<AnnotatedType> single, pairs;
  bool exact = true;
  std::vector<std::vector<Real>> diffs;
  for (std::uint32_t s = 1; s <= 20; ++s) {
    std::vector<Real> w(4), l(4);
    for (Real& x : w) x = oracle::uniform(rng, -1, 1);
    for (Real& x : l) x = oracle::uniform(rng, -1, 1);
    const auto id = std::to_string(s);
    store.set("w" + id, w);
    store.set("l" + id, l);
    single.push_back({"w" + id, "l" + id, s, 1});
    std::vector<Real> d(4);
    for (int k = 0; k < 4; ++k) d[k] = w[k] - l[k];
    diffs.push_back(d);
  }
  const auto one = derive_suffix_offsets(single, store);
  for (std::uint32_t s = 1; s <= 20; ++s) exact &= one.find(s) && *one.find(s) == diffs[s - 1];

  VectorStore small(2);
  small.set("evde", std::vector<Real>{1, 2});
  small.set("ev", std::vector<Real>{1, 0});
  small.set("okulda", std::vector<Real>{3, 5});
  small.set("okul", std::vector<Real>{3, 1});
  pairs = {{"evde", "ev", 3, 1}, {"okulda", "okul", 3, 1}};
  const auto two = derive_suffix_offsets(pairs, small);
  const bool mean_ok = *two.find(3) == std::vector<Real>{0, 3};
  return {exact && mean_ok, std::string("single-pair offsets ") + (exact ? "bit-exact" : "differ") +
                                ", two-pair mean " + (mean_ok ? "(0,3)" : "wrong")};
}

Outcome planted_clusters(VectorStore* keep) {
  const auto sentences = oracle::planted_topic_corpus(7, 2, 100, 500'000);
  const InMemorySource corpus(sentences);
  const auto vocab = vocab_of(sentences, 5);
  const auto store = word_store(train(corpus, vocab, planted_recipe()));
  const auto [intra, inter] = oracle::intra_inter_cosine(store);
  if (keep) *keep = store;
  return {vocab.size() == 200 && intra - inter >= 0.2,
          "vocab " + std::to_string(vocab.size()) + ", intra " + fmt("%.3f", intra) + ", inter " +
              fmt("%.3f", inter) + ", gap " + fmt("%.3f", intra - inter)};
}

Outcome classification() {
  const std::size_t topics = 3, words = 67;
  const auto sentences = oracle::planted_topic_corpus(13, topics, words, 500'000);
  const InMemorySource corpus(sentences);
  const auto vocab = vocab_of(sentences, 5);
  const auto surface = word_store(train(corpus, vocab, planted_recipe()));
  StoreBundle bundle;
  bundle.surface = &surface;
  const Composer composer(Scheme::Surface, bundle);
  auto docs = [&](std::uint64_t seed, std::size_t n) {
    std::vector<Document> out;
    for (auto& d : oracle::planted_topic_docs(seed, topics, words, n, 12)) out.push_back({d.label, d.tokens});
    return out;
  };
  const auto train_docs = docs(21, 600), test_docs = docs(22, 600);
  const auto r = classify_docs(train_docs, test_docs, composer);
  return {r.accuracy >= 0.9, "test accuracy " + fmt("%.3f", r.accuracy) + " on " + std::to_string(r.test_docs) +
                                 " documents, " + std::to_string(r.labels.size()) + " classes"};
}

Outcome store_round_trip() {
  std::mt19937_64 rng(123);
  std::size_t failures = 0;
  for (int i = 0; i < 100; ++i) {
    auto store = oracle::random_store(rng, 1 + rng() % 80, 1 + rng() % 20, 0, "w");
    const std::size_t suffixes = 1 + rng() % 10;
    for (std::size_t s = 0; s < suffixes; ++s) {
      std::vector<Real> v(store.dim());
      for (Real& x : v) x = oracle::uniform(rng, -1e3, 1e3) * std::pow(10.0, static_cast<double>(rng() % 20) - 10);
      store.set(">>" + std::to_string(rng() % 1000), v);
    }
    std::stringstream buf;
    save_text(store, buf);
    failures += !(load_text(buf, "roundtrip") == store);
  }
  return {failures == 0, std::to_string(100 - failures) + "/100 stores identical after save and load"};
}

Outcome noise_distribution() {
  const auto vocab = Vocabulary::from_ordered({"a", "b"}, {16, 1});
  const auto table = build_noise_table(vocab, 0.75, 10'000'000);
  std::mt19937_64 rng(77);
  std::size_t a = 0;
  for (int i = 0; i < 1'000'000; ++i) a += table.sample(rng) == 0;
  const double freq = static_cast<double>(a) / 1e6;
  return {std::abs(freq - 8.0 / 9.0) <= 0.02, "a-frequency " + fmt("%.4f", freq) + " vs 0.8889"};
}

Outcome bpe() {
  std::mt19937_64 rng(31);
  const auto letters = utf8_chars("abcdeçğıöşüklmnr");
  auto word = [&] {
    std::string w;
    const std::size_t len = 1 + rng() % 12;
    for (std::size_t i = 0; i < len; ++i) w += letters[rng() % 3 ? rng() % 6 : rng() % letters.size()];
    return w;
  };
  WordCounts stream;
  for (int i = 0; i < 3000; ++i) stream.emplace_back(word(), 1 + rng() % 50);
  const auto first = train_bpe(stream, 300);
  const auto second = train_bpe(stream, 300);
  std::size_t lossy = 0;
  for (int i = 0; i < 10'000; ++i) {
    const auto w = word();
    std::string joined;
    for (const auto& p : bpe_encode(first, w)) joined += p;
    lossy += joined != w;
  }
  const bool same = first.merges() == second.merges();
  return {lossy == 0 && same, std::to_string(lossy) + " lossy encodings in 10000 words, " +
                                  std::to_string(first.merges().size()) + " merges, retrain " +
                                  (same ? "identical" : "differs")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"subword bag of 'where' (n=3..4)", ngram_bag},
      {"negative-sampling gradients vs finite differences", gradients},
      {"single-threaded training determinism", determinism},
      {"analogy ranking equals brute force", analogy_oracle},
      {"synthetic analogy ceiling and monotonicity", analogy_ceiling},
      {"derived suffix offsets", derived_suffix},
      {"planted two-topic clustering", [] { return planted_clusters(nullptr); }},
      {"three-class classification", classification},
      {"vector store round trip", store_round_trip},
      {"noise table distribution", noise_distribution},
      {"BPE losslessness and determinism", bpe},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2zu %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    failed += !o.pass;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed ? 1 : 0;
}
