#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>

#include "morphvec/compose.hpp"
#include "morphvec/errors.hpp"
#include "oracles.hpp"

using namespace morphvec;

namespace {

using Vec = std::vector<Real>;

VectorStore store_of(std::size_t dim, std::initializer_list<std::pair<std::string, Vec>> rows) {
  VectorStore s(dim);
  for (const auto& [t, v] : rows) s.set(t, v);
  return s;
}

VectorStore scaled(const VectorStore& s, Real alpha) {
  VectorStore out(s.dim());
  for (std::size_t i = 0; i < s.size(); ++i) {
    Vec v(s.vector(i).begin(), s.vector(i).end());
    for (Real& x : v) x *= alpha;
    out.set(s.token(i), v);
  }
  return out;
}

}  // namespace

TEST_CASE("scheme names") {
  CHECK(parse_scheme("derived-suffix") == Scheme::DerivedSuffix);
  CHECK(parse_scheme("fasttext") == Scheme::FastText);
  CHECK_FALSE(parse_scheme("bert"));
  for (auto s : {Scheme::Surface, Scheme::Lemma, Scheme::LemmaSuffixLemmaOnly, Scheme::LemmaSuffixAverage,
                 Scheme::DerivedSuffix, Scheme::PieceAverage, Scheme::FastText})
    CHECK(parse_scheme(to_string(s)) == s);
}

TEST_CASE("derived offsets with one pair are the raw difference") {
  const auto store = store_of(2, {{"evde", {1, 2}}, {"ev", {1, 0}}});
  const std::vector<AnnotatedType> types{{"evde", "ev", 3, 5}};
  const auto table = derive_suffix_offsets(types, store);
  REQUIRE(table.find(3));
  CHECK(*table.find(3) == Vec{0, 2});
  CHECK(table.support.at(3) == 1);
}

TEST_CASE("derived offsets average several pairs") {
  const auto store = store_of(2, {{"evde", {1, 2}}, {"ev", {1, 0}}, {"okulda", {3, 5}}, {"okul", {3, 1}}});
  const std::vector<AnnotatedType> types{{"evde", "ev", 3, 5}, {"okulda", "okul", 3, 1}};
  const auto table = derive_suffix_offsets(types, store);
  CHECK(*table.find(3) == Vec{0, 3});
  CHECK(table.support.at(3) == 2);
}

TEST_CASE("pairs with a missing side are skipped and counted") {
  const auto store = store_of(2, {{"evde", {1, 2}}, {"ev", {1, 0}}, {"okulda", {3, 5}}});
  const std::vector<AnnotatedType> types{
      {"evde", "ev", 3, 1}, {"okulda", "okul", 3, 1}, {"kitapta", "kitap", 9, 1}};
  const auto table = derive_suffix_offsets(types, store);
  CHECK(table.support.at(3) == 1);
  CHECK(table.skipped.at(3) == 1);
  CHECK(table.skipped.at(9) == 1);
  CHECK_FALSE(table.find(9));

  const std::vector<AnnotatedType> hopeless{{"kitapta", "kitap", 9, 1}};
  CHECK_THROWS_AS(derive_suffix_offsets(hopeless, store), std::invalid_argument);
}

TEST_CASE("derived offsets from separate surface and lemma stores") {
  const auto surface = store_of(2, {{"evde", {1, 2}}, {"ev", {9, 9}}});
  const auto lemma = store_of(2, {{"ev", {0, 1}}});
  const std::vector<AnnotatedType> types{{"evde", "ev", 3, 1}};
  CHECK(*derive_suffix_offsets(types, surface, lemma).find(3) == Vec{1, 1});
}

TEST_CASE("identical surface and lemma vectors give zero offsets") {
  std::mt19937_64 rng(4);
  VectorStore store(5);
  std::vector<AnnotatedType> types;
  for (int i = 0; i < 30; ++i) {
    Vec v(5);
    for (Real& x : v) x = oracle::uniform(rng, -1, 1);
    store.set("lemma" + std::to_string(i), v);
    store.set("surface" + std::to_string(i), v);
    types.push_back({"surface" + std::to_string(i), "lemma" + std::to_string(i),
                     static_cast<std::uint32_t>(i % 4), 1});
  }
  const auto table = derive_suffix_offsets(types, store);
  CHECK(table.offsets.size() == 4);
  for (const auto& [id, off] : table.offsets)
    for (Real x : off) CHECK(x == 0.0);
}

TEST_CASE("offset table round trip through files") {
  const auto store = store_of(2, {{"evde", {1, 2}}, {"ev", {1, 0}}, {"evler", {0.25, 1}}});
  const std::vector<AnnotatedType> types{{"evde", "ev", 3, 1}, {"evler", "ev", 7, 1}, {"x", "y", 7, 1}};
  const auto table = derive_suffix_offsets(types, store);
  const auto path = std::filesystem::temp_directory_path() / "morphvec_offsets.vec";
  table.save(path);
  const auto back = SuffixOffsetTable::load(path);
  CHECK(back.offsets == table.offsets);
  CHECK(back.support == table.support);
  CHECK(back.skipped == table.skipped);
  CHECK(table.to_store().token(0) == ">>3");
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".support");
}

TEST_CASE("compose follows each scheme's rule") {
  const auto surface = store_of(2, {{"evde", {4, 4}}});
  const auto lemma = store_of(2, {{"ev", {1, 1}}});
  const auto ls = store_of(2, {{"ev", {2, 0}}, {">>3", {0, 2}}});
  const auto pieces = store_of(2, {{"ev", {1, 0}}, {"de", {0, 1}}});
  SuffixOffsetTable offsets;
  offsets.dim = 2;
  offsets.offsets[3] = {0, 2};
  offsets.support[3] = 1;
  const BpeModel bpe({{"e", "v"}, {"d", "e"}}, Vocabulary{}, 10);
  StoreBundle b{&surface, &lemma, &ls, &pieces, &offsets, &bpe, nullptr};
  const AnnotatedToken evde{"evde", "ev", 3};

  CHECK(compose(evde, Scheme::Surface, b) == Vec{4, 4});
  CHECK(compose(evde, Scheme::Lemma, b) == Vec{1, 1});
  CHECK(compose(evde, Scheme::LemmaSuffixLemmaOnly, b) == Vec{2, 0});
  CHECK(compose(evde, Scheme::LemmaSuffixAverage, b) == Vec{1, 1});
  CHECK(compose(evde, Scheme::DerivedSuffix, b) == Vec{1, 3});
  CHECK(compose(evde, Scheme::PieceAverage, b) == Vec{0.5, 0.5});

  const AnnotatedToken unknown{"okulda", "okul", 5};
  for (auto s : {Scheme::Surface, Scheme::Lemma, Scheme::LemmaSuffixLemmaOnly, Scheme::LemmaSuffixAverage,
                 Scheme::DerivedSuffix})
    CHECK_FALSE(compose(unknown, s, b));
  // Known lemma, unknown suffix.
  CHECK_FALSE(compose(AnnotatedToken{"evden", "ev", 8}, Scheme::DerivedSuffix, b));
  CHECK_FALSE(compose(AnnotatedToken{"evden", "ev", 8}, Scheme::LemmaSuffixAverage, b));
  // Unknown pieces are skipped; all unknown is OOV.
  CHECK(compose(AnnotatedToken{"evxx", "ev", 0}, Scheme::PieceAverage, b) == Vec{1, 0});
  CHECK_FALSE(compose(AnnotatedToken{"xyz", "xyz", 0}, Scheme::PieceAverage, b));
}

TEST_CASE("fasttext scheme never reports OOV") {
  const auto words = Vocabulary::from_ordered({"ev"}, {1});
  SubwordModel sub{SubwordIndex(words, 3, 3, 20), Matrix(1, 2, 1.0), Matrix(20, 2, 0.5)};
  StoreBundle b;
  b.subword = &sub;
  const auto v = compose(AnnotatedToken{"ev", "ev", 0}, Scheme::FastText, b);
  REQUIRE(v);
  CHECK(*v == Vec{2.5, 2.5});  // word row + <ev, ev>, <ev>
  CHECK(compose(AnnotatedToken{"qqqqqq", "q", 0}, Scheme::FastText, b));
}

TEST_CASE("missing stores are configuration errors") {
  StoreBundle empty;
  const AnnotatedToken w{"evde", "ev", 3};
  CHECK_THROWS_AS(compose(w, Scheme::Surface, empty), ConfigError);
  CHECK_THROWS_AS(compose(w, Scheme::DerivedSuffix, empty), ConfigError);
  CHECK(missing_requirements(Scheme::DerivedSuffix, empty).size() == 2);
  CHECK(missing_requirements(Scheme::PieceAverage, empty).size() == 2);
  CHECK_THROWS_AS(Composer(Scheme::FastText, empty), ConfigError);
}

TEST_CASE("oov_vector") {
  CHECK(oov_vector(3) == Vec{0, 0, 0});
  CHECK(oov_vector(2, 0.5) == Vec{0.5, 0.5});
}

TEST_CASE("composition is linear in the stores") {
  std::mt19937_64 rng(12);
  const auto surface = oracle::random_store(rng, 20, 4, 0, "s");
  const auto lemma = oracle::random_store(rng, 20, 4, 0, "l");
  auto ls = oracle::random_store(rng, 20, 4, 0, "l");
  for (int i = 0; i < 5; ++i) {
    Vec v(4);
    for (Real& x : v) x = oracle::uniform(rng, -1, 1);
    ls.set(">>" + std::to_string(i), v);
  }
  const auto pieces = oracle::random_store(rng, 20, 4, 0, "s");
  std::vector<AnnotatedType> types;
  for (int i = 0; i < 20; ++i)
    types.push_back({"s" + std::to_string(i), "l" + std::to_string(i), static_cast<std::uint32_t>(i % 5), 1});
  // Offsets are derived between the surface and lemma stores so both scale.
  const auto offsets = derive_suffix_offsets(types, surface, lemma);
  const BpeModel bpe({{"s", "1"}}, Vocabulary{}, 10);

  const Real alpha = 2.5;
  const auto surface2 = scaled(surface, alpha), lemma2 = scaled(lemma, alpha), ls2 = scaled(ls, alpha),
             pieces2 = scaled(pieces, alpha);
  const auto offsets2 = derive_suffix_offsets(types, surface2, lemma2);
  StoreBundle b1{&surface, &lemma, &ls, &pieces, &offsets, &bpe, nullptr};
  StoreBundle b2{&surface2, &lemma2, &ls2, &pieces2, &offsets2, &bpe, nullptr};

  for (auto scheme : {Scheme::Surface, Scheme::Lemma, Scheme::LemmaSuffixLemmaOnly, Scheme::LemmaSuffixAverage,
                      Scheme::DerivedSuffix, Scheme::PieceAverage}) {
    for (const auto& t : types) {
      const AnnotatedToken w{t.surface, t.lemma, t.suffix_id};
      const auto v1 = compose(w, scheme, b1);
      const auto v2 = compose(w, scheme, b2);
      REQUIRE(v1.has_value() == v2.has_value());
      if (!v1) continue;
      for (std::size_t k = 0; k < 4; ++k) CHECK((*v2)[k] == doctest::Approx(alpha * (*v1)[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("Composer resolves words through the lexicon") {
  const auto lemma = store_of(2, {{"ev", {1, 1}}, {"okul", {2, 2}}});
  const std::vector<AnnotatedType> types{{"evde", "ev", 3, 1}, {"evde", "evd", 4, 5}, {"evler", "ev", 7, 2}};
  const Lexicon lex(types);
  CHECK(lex.analyze("evde")->lemma == "evd");
  CHECK(lex.surfaces() == std::vector<std::string>{"evde", "evler"});

  StoreBundle b;
  b.lemma = &lemma;
  const Composer c(Scheme::Lemma, b, &lex, 0.25);
  CHECK(c.dim() == 2);
  CHECK(c.resolve("evler") == Vec{1, 1});
  CHECK_FALSE(c.resolve("evde"));
  CHECK(c.resolve("okul") == Vec{2, 2});  // unknown to the lexicon: its own lemma
  CHECK(c.resolve_or_oov("evde") == Vec{0.25, 0.25});
  const std::vector<std::string> words{"evde", "evler", "okul"};
  CHECK(c.materialize(words).tokens() == std::vector<std::string>{"evler", "okul"});
}
