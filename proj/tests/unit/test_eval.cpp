#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "morphvec/errors.hpp"
#include "morphvec/eval.hpp"
#include "oracles.hpp"

using namespace morphvec;

namespace {

using Vec = std::vector<Real>;

std::vector<std::string> tokens_of(const std::vector<Ranked>& r) {
  std::vector<std::string> out;
  for (const auto& x : r) out.push_back(x.token);
  return out;
}

std::vector<Document> to_documents(const std::vector<oracle::LabelledDoc>& docs) {
  std::vector<Document> out;
  for (const auto& d : docs) out.push_back({d.label, d.tokens});
  return out;
}

// Store with an exact offset structure: v(b_i) - v(a_i) + v(c_i) == v(d_i).
VectorStore exact_offset_store(std::mt19937_64& rng, std::size_t questions,
                               std::vector<AnalogyQuestion>& out) {
  const std::size_t dim = 2 * questions + 2;
  VectorStore store(dim);
  for (std::size_t i = 0; i < questions; ++i) {
    // a, b on private axes; c = a + e_i and d = b + e_i share a third axis.
    Vec a(dim, 0), b(dim, 0), c(dim, 0), d(dim, 0);
    a[2 * i] = 1;
    b[2 * i + 1] = 1;
    c = a;
    d = b;
    const double shift = oracle::uniform(rng, 0.5, 1.5);
    c[dim - 1] = shift;
    d[dim - 1] = shift;
    const std::string tag = std::to_string(i);
    store.set("a" + tag, a);
    store.set("b" + tag, b);
    store.set("c" + tag, c);
    store.set("d" + tag, d);
    out.push_back({"a" + tag, "b" + tag, "c" + tag, "d" + tag});
  }
  return store;
}

}  // namespace

TEST_CASE("cosine examples") {
  CHECK(cosine(Vec{1, 0}, Vec{1, 0}) == doctest::Approx(1.0));
  CHECK(cosine(Vec{1, 0}, Vec{0, 1}) == doctest::Approx(0.0));
  CHECK(cosine(Vec{1, 1}, Vec{1, 0}) == doctest::Approx(std::sqrt(2.0) / 2));
  CHECK_THROWS_AS(cosine(Vec{0, 0}, Vec{1, 0}), std::invalid_argument);
}

TEST_CASE("exact offsets rank the answer first") {
  std::mt19937_64 rng(1);
  std::vector<AnalogyQuestion> qs;
  const auto store = exact_offset_store(rng, 100, qs);
  const auto r = analogy_predict(qs[3].a, qs[3].b, qs[3].c, store, 1);
  REQUIRE(r);
  CHECK(r->front().token == "d3");
  const auto acc = analogy_accuracy(qs, store);
  for (double a : acc.accuracy) CHECK(a == 1.0);
  CHECK(acc.evaluated == 100);
}

TEST_CASE("rankings match brute force on random stores") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t size = 5 + rng() % 200;
    const auto store = oracle::random_store(rng, size, 1 + rng() % 6, trial % 3 == 0 ? 4 : 0);
    const std::string a = store.token(rng() % size), b = store.token(rng() % size), c = store.token(rng() % size);
    const bool exclude = trial % 2 == 1;
    const std::size_t top = 1 + rng() % 40;
    const auto got = analogy_predict(a, b, c, store, top, exclude);

    Vec q(store.dim());
    const auto va = *store.lookup(a), vb = *store.lookup(b), vc = *store.lookup(c);
    for (std::size_t k = 0; k < q.size(); ++k) q[k] = vb[k] - va[k] + vc[k];
    std::vector<std::string> ex;
    if (exclude) ex = {a, b, c};
    const auto want = oracle::brute_force_rank(store, q, ex, top);
    if (want.empty()) {
      CHECK((!got || got->empty()));
      continue;
    }
    REQUIRE(got);
    REQUIRE(got->size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      CHECK((*got)[i].token == want[i].first);
      CHECK((*got)[i].similarity == want[i].second);
    }
  }
}

TEST_CASE("query words can outrank the answer unless excluded") {
  const VectorStore store = [] {
    VectorStore s(2);
    s.set("anne", Vec{1, 0.1});
    s.set("baba", Vec{1, 0});
    s.set("kadin", Vec{0.9, 0.2});
    s.set("erkek", Vec{0, 1});
    return s;
  }();
  // b - a + c = kadin - baba + anne, closest to one of the inputs.
  const auto with = analogy_predict("baba", "kadin", "anne", store, 4, false);
  REQUIRE(with);
  const auto first = with->front().token;
  CHECK((first == "anne" || first == "kadin" || first == "baba"));
  const auto without = analogy_predict("baba", "kadin", "anne", store, 4, true);
  CHECK(tokens_of(*without) == std::vector<std::string>{"erkek"});
}

TEST_CASE("rankings are scale invariant") {
  std::mt19937_64 rng(5);
  const auto store = oracle::random_store(rng, 60, 5);
  VectorStore big(5);
  for (std::size_t i = 0; i < store.size(); ++i) {
    Vec v(store.vector(i).begin(), store.vector(i).end());
    for (Real& x : v) x *= 3.7;
    big.set(store.token(i), v);
  }
  for (int t = 0; t < 20; ++t) {
    const auto a = store.token(rng() % 60), b = store.token(rng() % 60), c = store.token(rng() % 60);
    CHECK(tokens_of(*analogy_predict(a, b, c, store, 10)) == tokens_of(*analogy_predict(a, b, c, big, 10)));
  }
}

TEST_CASE("OOV questions are skipped and counted") {
  std::mt19937_64 rng(2);
  std::vector<AnalogyQuestion> qs;
  const auto store = exact_offset_store(rng, 5, qs);
  qs.push_back({"zz", "b0", "c0", "d0"});
  const auto r = analogy_accuracy(qs, store);
  CHECK(r.total == 6);
  CHECK(r.skipped == 1);
  CHECK(r.evaluated + r.skipped == r.total);
  CHECK(r.accuracy[0] == 1.0);
  CHECK(r.accuracy_all[0] == doctest::Approx(5.0 / 6.0));
  CHECK(r.oov_rate() == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("accuracy is non-decreasing in n and matches recomputation") {
  std::mt19937_64 rng(31);
  const auto store = oracle::random_store(rng, 80, 3);
  std::vector<AnalogyQuestion> qs;
  for (int i = 0; i < 10; ++i)
    qs.push_back({store.token(rng() % 80), store.token(rng() % 80), store.token(rng() % 80), store.token(rng() % 80)});
  const auto r = analogy_accuracy(qs, store);
  for (std::size_t k = 1; k < r.accuracy.size(); ++k) CHECK(r.accuracy[k] >= r.accuracy[k - 1]);
  for (std::size_t k = 0; k < r.ns.size(); ++k) {
    std::size_t correct = 0;
    for (const auto& q : qs) {
      Vec v(3);
      const auto va = *store.lookup(q.a), vb = *store.lookup(q.b), vc = *store.lookup(q.c);
      for (std::size_t j = 0; j < 3; ++j) v[j] = vb[j] - va[j] + vc[j];
      for (const auto& [tok, sim] : oracle::brute_force_rank(store, v, {}, r.ns[k])) correct += tok == q.d;
    }
    CHECK(r.correct[k] == correct);
    CHECK(r.accuracy[k] >= 0.0);
    CHECK(r.accuracy[k] <= 1.0);
  }
}

TEST_CASE("nearest neighbours skip zero vectors and honour exclusions") {
  VectorStore s(2);
  s.set("zero", Vec{0, 0});
  s.set("x", Vec{1, 0});
  s.set("y", Vec{0, 1});
  s.set("x2", Vec{2, 0});
  const NeighborIndex index(s);
  const Vec q{1, 0};
  CHECK(tokens_of(index.nearest(q, 10)) == std::vector<std::string>{"x", "x2", "y"});
  const std::vector<std::string> ex{"x"};
  CHECK(tokens_of(index.nearest(q, 1, ex)) == std::vector<std::string>{"x2"});
  CHECK(index.nearest(Vec{0, 0}, 3).empty());
}

TEST_CASE("odd one out") {
  VectorStore s(2);
  s.set("a", Vec{1, 0});
  s.set("a2", Vec{1, 0});
  s.set("a3", Vec{1, 0});
  s.set("o", Vec{0, 1});
  s.set("e1", Vec{1, 0.05});
  s.set("e2", Vec{1, -0.05});
  s.set("e3", Vec{1, 0.02});
  const auto r = store_resolver(s);

  CHECK(odd_one_out(std::vector<std::string>{"a", "a2", "o", "a3"}, r) == 2u);
  CHECK(odd_one_out(std::vector<std::string>{"e1", "o", "e2", "e3"}, r) == 1u);
  CHECK(odd_one_out(std::vector<std::string>{"a", "a2", "a3"}, r) == 0u);
  CHECK_FALSE(odd_one_out(std::vector<std::string>{"a", "zz", "o"}, r));

  // Permuting members moves the answer with the intruder.
  std::vector<std::string> m{"e1", "e2", "o", "e3"};
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(m.begin(), m.end(), rng);
    const auto idx = odd_one_out(m, r);
    REQUIRE(idx);
    CHECK(m[*idx] == "o");
  }

  std::vector<GroupQuestion> qs{{{"a", "a2", "o", "a3"}, 2}, {{"o", "a", "a2"}, 1}, {{"zz", "a", "o"}, 0}};
  const auto g = group_accuracy(qs, r);
  CHECK(g.total == 3);
  CHECK(g.evaluated == 2);
  CHECK(g.correct == 1);
}

TEST_CASE("group question files keep track of the odd member") {
  std::istringstream in(": section\nkedi kopek masa kus\n\nelma armut muz kiraz\n");
  const auto qs = parse_group_questions(in, "groups", 9);
  REQUIRE(qs.size() == 2);
  CHECK(qs[0].members[qs[0].odd_index] == "kedi");
  CHECK(qs[1].members[qs[1].odd_index] == "elma");
  std::istringstream bad("a b\n");
  CHECK_THROWS_AS(parse_group_questions(bad, "groups", 1), ParseError);
}

TEST_CASE("analogy and document files") {
  std::istringstream in(": capital\nankara turkiye paris fransa\n\n");
  const auto qs = parse_analogy_questions(in, "q");
  REQUIRE(qs.size() == 1);
  CHECK(qs[0].d == "fransa");
  std::istringstream bad("a b c\n");
  CHECK_THROWS_AS(parse_analogy_questions(bad, "q"), ParseError);

  std::istringstream docs("spor\tmac gol\r\n\nekonomi\tfaiz\n");
  const auto d = parse_documents(docs, "d");
  REQUIRE(d.size() == 2);
  CHECK(d[0].tokens == std::vector<std::string>{"mac", "gol"});
  std::istringstream nolabel("\tfoo\n");
  CHECK_THROWS_AS(parse_documents(nolabel, "d"), ParseError);
}

TEST_CASE("classifier separates separable documents") {
  VectorStore s(2);
  s.set("pos", Vec{1, 0});
  s.set("neg", Vec{0, 1});
  std::vector<Document> train, test;
  for (int i = 0; i < 20; ++i) {
    train.push_back({"p", {"pos", "pos", "neg"}});
    train.push_back({"n", {"neg", "neg", "pos"}});
  }
  test.push_back({"p", {"pos"}});
  test.push_back({"n", {"neg"}});
  test.push_back({"p", {"pos", "zz"}});
  const auto r = classify_docs(train, test, store_resolver(s), oov_vector(2));
  CHECK(r.accuracy == 1.0);
  CHECK(r.oov_tokens == 1);
  CHECK(r.tokens == 4);
}

TEST_CASE("shuffled labels give chance accuracy") {
  std::mt19937_64 rng(8);
  const auto store = oracle::random_store(rng, 300, 10);
  auto make = [&](std::size_t n) {
    std::vector<Document> docs;
    for (std::size_t i = 0; i < n; ++i) {
      Document d{"c" + std::to_string(rng() % 3), {}};
      for (int k = 0; k < 8; ++k) d.tokens.push_back(store.token(rng() % 300));
      docs.push_back(std::move(d));
    }
    return docs;
  };
  const auto train = make(600), test = make(500);
  const auto r = classify_docs(train, test, store_resolver(store), oov_vector(10));
  CHECK(std::abs(r.accuracy - 1.0 / 3.0) <= 0.1);
}

TEST_CASE("planted topic vectors classify planted documents") {
  // Topic-aligned vectors stand in for a trained store here.
  VectorStore s(3);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 3; ++t)
    for (int k = 0; k < 20; ++k) {
      Vec v(3);
      for (Real& x : v) x = oracle::uniform(rng, -0.3, 0.3);
      v[t] += 1;
      s.set("t" + std::to_string(t) + "_" + std::to_string(k), v);
    }
  const auto train = to_documents(oracle::planted_topic_docs(1, 3, 20, 300, 10));
  const auto test = to_documents(oracle::planted_topic_docs(2, 3, 20, 300, 10));
  CHECK(classify_docs(train, test, store_resolver(s), oov_vector(3)).accuracy >= 0.9);
}

TEST_CASE("classifier input errors") {
  VectorStore s(1);
  s.set("a", Vec{1});
  const std::vector<Document> one_label{{"x", {"a"}}};
  CHECK_THROWS_AS(classify_docs(one_label, one_label, store_resolver(s), oov_vector(1)), std::invalid_argument);
  CHECK_THROWS_AS(classify_docs({}, one_label, store_resolver(s), oov_vector(1)), std::invalid_argument);
}

TEST_CASE("reports") {
  std::mt19937_64 rng(1);
  std::vector<AnalogyQuestion> qs;
  const auto store = exact_offset_store(rng, 4, qs);
  EvalReport report;
  report.model_name = "Surface";
  report.analogy = analogy_accuracy(qs, store);
  const auto table = format_table(report);
  CHECK(table.find("Occurrence in the first n prediction") != std::string::npos);
  CHECK(table.find("Surface (oov=wrong)") != std::string::npos);
  const auto metrics = format_metrics(report);
  CHECK(metrics.find("analogy@1\t1") != std::string::npos);
  CHECK(metrics.find("analogy_oov_wrong@40\t") != std::string::npos);
}
