#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "morphvec/cli.hpp"
#include "morphvec/compose.hpp"
#include "morphvec/corpus.hpp"
#include "morphvec/errors.hpp"
#include "morphvec/eval.hpp"
#include "morphvec/store.hpp"
#include "morphvec/subword.hpp"
#include "morphvec/trainer.hpp"

namespace py = pybind11;
using namespace morphvec;

namespace {

using Vec = std::vector<Real>;

std::vector<Real> as_vec(std::span<const Real> s) { return {s.begin(), s.end()}; }

Sentence to_sentence(const std::vector<std::tuple<std::string, std::string, std::uint32_t>>& rows) {
  Sentence s;
  for (const auto& [surface, lemma, id] : rows) s.push_back({surface, lemma, id});
  return s;
}

TrainConfig make_config(const std::string& model, std::size_t dim, std::size_t window, std::size_t negatives,
                        std::size_t epochs, std::optional<double> lr_start, std::optional<double> lr_min,
                        double subsample, std::uint64_t min_count, std::uint64_t seed, std::size_t threads) {
  TrainConfig cfg;
  auto kind = parse_model_kind(model);
  if (!kind) throw std::invalid_argument("unknown model: " + model);
  cfg.model = *kind;
  cfg.dim = dim;
  cfg.window = window;
  cfg.negatives = negatives;
  cfg.epochs = epochs;
  cfg.lr_start = lr_start;
  cfg.lr_min = lr_min;
  cfg.subsample_t = subsample > 0 ? std::optional<double>(subsample) : std::nullopt;
  cfg.min_count = min_count;
  cfg.seed = seed;
  cfg.threads = threads;
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_morphvec, m) {
  m.doc() = "Morphology-aware word embeddings";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("extract_ngrams", &extract_ngrams, py::arg("word"), py::arg("n_min") = 3, py::arg("n_max") = 6);
  m.def("hash_ngram", &hash_ngram, py::arg("ngram"), py::arg("buckets") = SubwordIndex::kDefaultBuckets);
  m.def("fnv1a", &fnv1a);

  m.def("subsample_keep_prob", &subsample_keep_prob, py::arg("count"), py::arg("total"), py::arg("t"));
  m.def(
      "build_vocab",
      [](const std::vector<std::string>& tokens, std::uint64_t min_count) {
        const auto v = build_vocab(tokens, min_count);
        return std::make_pair(v.tokens(), v.counts());
      },
      py::arg("tokens"), py::arg("min_count") = 1, "Returns (tokens, counts) by descending count.");

  m.def(
      "read_annotated",
      [](const std::string& text) {
        std::istringstream in(text);
        std::vector<std::vector<std::tuple<std::string, std::string, std::uint32_t>>> out;
        for (const auto& s : read_annotated(in, "<string>")) {
          auto& row = out.emplace_back();
          for (const auto& t : s) row.emplace_back(t.surface, t.lemma, t.suffix_id);
        }
        return out;
      },
      py::arg("text"), "Parses surface<TAB>lemma<TAB>suffix_id text into sentences of tuples.");
  m.def(
      "render_form",
      [](const std::vector<std::tuple<std::string, std::string, std::uint32_t>>& sentence, const std::string& form,
         const BpeModel* bpe) {
        auto f = parse_morph_form(form);
        if (!f) throw std::invalid_argument("unknown form: " + form);
        return render_form(to_sentence(sentence), *f, bpe);
      },
      py::arg("sentence"), py::arg("form"), py::arg("bpe") = nullptr);

  py::class_<BpeModel>(m, "BpeModel")
      .def("encode", &BpeModel::encode)
      .def_property_readonly("merges", &BpeModel::merges)
      .def_property_readonly("target_size", &BpeModel::target_size)
      .def("save", py::overload_cast<const std::filesystem::path&>(&BpeModel::save, py::const_))
      .def_static("load", py::overload_cast<const std::filesystem::path&>(&BpeModel::load));
  m.def("train_bpe", &train_bpe, py::arg("word_counts"), py::arg("target_size"));

  py::class_<VectorStore>(m, "VectorStore")
      .def(py::init<std::size_t>(), py::arg("dim"))
      .def_property_readonly("dim", &VectorStore::dim)
      .def("__len__", &VectorStore::size)
      .def("__contains__", [](const VectorStore& s, const std::string& t) { return s.lookup(t).has_value(); })
      .def("set", [](VectorStore& s, const std::string& t, const Vec& v) { return s.set(t, v); })
      .def("lookup",
           [](const VectorStore& s, const std::string& t) -> std::optional<Vec> {
             if (auto v = s.lookup(t)) return as_vec(*v);
             return std::nullopt;
           })
      .def("tokens", &VectorStore::tokens)
      .def("save", [](const VectorStore& s, const std::filesystem::path& p) { save_text(s, p); })
      .def_static("load", [](const std::filesystem::path& p) { return load_text(p); })
      .def("__eq__", [](const VectorStore& a, const VectorStore& b) { return a == b; });

  m.def(
      "train",
      [](const std::vector<std::vector<std::string>>& sentences, const std::string& model, std::size_t dim,
         std::size_t window, std::size_t negatives, std::size_t epochs, std::optional<double> lr_start,
         std::optional<double> lr_min, double subsample, std::uint64_t min_count, std::uint64_t seed,
         std::size_t threads) {
        const auto cfg = make_config(model, dim, window, negatives, epochs, lr_start, lr_min, subsample,
                                     min_count, seed, threads);
        const InMemorySource corpus(sentences);
        const auto vocab = Vocabulary::from_counts(count_tokens(corpus), cfg.min_count);
        if (vocab.empty()) throw std::invalid_argument("no token reaches min_count");
        py::gil_scoped_release release;
        return word_store(train(corpus, vocab, cfg));
      },
      py::arg("sentences"), py::arg("model") = "cbow", py::arg("dim") = 100, py::arg("window") = 2,
      py::arg("negatives") = 5, py::arg("epochs") = 5, py::arg("lr_start") = py::none(),
      py::arg("lr_min") = py::none(), py::arg("subsample") = 1e-3, py::arg("min_count") = 5,
      py::arg("seed") = 1, py::arg("threads") = 1, "Trains word vectors on tokenized sentences.");

  m.def(
      "derive_suffix_offsets",
      [](const std::vector<std::tuple<std::string, std::string, std::uint32_t>>& pairs, const VectorStore& store) {
        std::vector<AnnotatedType> types;
        for (const auto& [s, l, id] : pairs) types.push_back({s, l, id, 1});
        return derive_suffix_offsets(types, store).to_store();
      },
      py::arg("pairs"), py::arg("store"), "Per-suffix mean of surface minus lemma, keyed by '>>id'.");

  m.def("cosine", [](const Vec& a, const Vec& b) { return cosine(a, b); });
  m.def(
      "analogy",
      [](const VectorStore& store, const std::string& a, const std::string& b, const std::string& c,
         std::size_t top_n, bool exclude_inputs) -> std::optional<std::vector<std::pair<std::string, double>>> {
        auto r = analogy_predict(a, b, c, store, top_n, exclude_inputs);
        if (!r) return std::nullopt;
        std::vector<std::pair<std::string, double>> out;
        for (auto& x : *r) out.emplace_back(x.token, x.similarity);
        return out;
      },
      py::arg("store"), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("top_n") = 10,
      py::arg("exclude_inputs") = false);
  m.def(
      "nearest",
      [](const VectorStore& store, const Vec& query, std::size_t top_n) {
        std::vector<std::pair<std::string, double>> out;
        for (auto& x : NeighborIndex(store).nearest(query, top_n)) out.emplace_back(x.token, x.similarity);
        return out;
      },
      py::arg("store"), py::arg("query"), py::arg("top_n") = 10);
  m.def(
      "odd_one_out",
      [](const VectorStore& store, const std::vector<std::string>& members) {
        return odd_one_out(members, store_resolver(store));
      },
      py::arg("store"), py::arg("members"));
  m.def(
      "classify",
      [](const VectorStore& store, const std::vector<std::pair<std::string, std::vector<std::string>>>& train_docs,
         const std::vector<std::pair<std::string, std::vector<std::string>>>& test_docs, std::size_t epochs,
         double lr) {
        auto docs = [](const auto& in) {
          std::vector<Document> out;
          for (const auto& [label, tokens] : in) out.push_back({label, tokens});
          return out;
        };
        return classify_docs(docs(train_docs), docs(test_docs), store_resolver(store), oov_vector(store.dim()),
                             ClassifyOptions{epochs, lr})
            .accuracy;
      },
      py::arg("store"), py::arg("train_docs"), py::arg("test_docs"), py::arg("epochs") = 200, py::arg("lr") = 0.1);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full{"morphvec"};
        full.insert(full.end(), args.begin(), args.end());
        std::ostringstream out, err;
        const int code = cli::run(full, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a command-line invocation; returns (exit_code, stdout, stderr).");
}
