#include "morphvec/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <algorithm>
#include <sstream>

#include "morphvec/compose.hpp"
#include "morphvec/corpus.hpp"
#include "morphvec/errors.hpp"
#include "morphvec/eval.hpp"
#include "morphvec/store.hpp"
#include "morphvec/subword.hpp"
#include "morphvec/trainer.hpp"

namespace morphvec::cli {

namespace fs = std::filesystem;

namespace {

// Thrown for bad flag combinations discovered after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Missing input files and similar problems with the data itself.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

void require_input(const std::string& path, const char* what) {
  if (path.empty()) return;
  if (!fs::is_regular_file(path)) throw DataError(std::string(what) + " not found: " + path);
}

void require_output(const std::string& path, bool overwrite) {
  if (path.empty()) return;
  if (fs::exists(path) && !overwrite)
    throw UsageError("refusing to overwrite " + path + " (pass --overwrite)");
}

struct Common {
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  bool overwrite = false;
  std::string config;
};

void add_common(CLI::App* sub, Common& common) {
  sub->add_option("--seed", common.seed, "Random seed");
  sub->add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_flag("--overwrite", common.overwrite, "Replace existing output files");
  sub->add_option("--config", common.config, "key = value file; command-line flags win");
}

// Corpus input shared by training-style subcommands.
struct CorpusOpts {
  std::string corpus;
  std::string annotated;
  std::string form = "surface";
  std::string bpe;
};

void add_corpus(CLI::App* sub, CorpusOpts& c, bool with_form) {
  auto* raw = sub->add_option("--corpus", c.corpus, "Raw text, one whitespace-tokenized sentence per line");
  auto* ann = sub->add_option("--annotated", c.annotated, "Annotated corpus (surface<TAB>lemma<TAB>suffix_id)");
  raw->excludes(ann);
  if (with_form) {
    sub->add_option("--form", c.form, "Rendering of the annotated corpus")
        ->check(CLI::IsMember({"surface", "lemma", "lemma-suffix", "pieces"}));
    sub->add_option("--bpe", c.bpe, "BPE model for the pieces form");
  }
}

struct LoadedCorpus {
  std::unique_ptr<BpeModel> bpe;
  std::unique_ptr<SentenceSource> source;
};

LoadedCorpus open_corpus(const CorpusOpts& c) {
  if (c.corpus.empty() == c.annotated.empty())
    throw UsageError("give exactly one of --corpus or --annotated");
  require_input(c.corpus, "corpus");
  require_input(c.annotated, "annotated corpus");
  require_input(c.bpe, "BPE model");

  LoadedCorpus out;
  const MorphForm form = *parse_morph_form(c.form);
  if (form == MorphForm::Pieces) {
    if (c.bpe.empty()) throw UsageError("--form pieces needs --bpe");
    out.bpe = std::make_unique<BpeModel>(BpeModel::load(fs::path(c.bpe)));
  }
  if (!c.corpus.empty()) {
    if (form != MorphForm::Surface)
      throw UsageError("raw --corpus input is already rendered; --form applies to --annotated only");
    out.source = std::make_unique<RawFileSource>(c.corpus);
  } else {
    out.source = std::make_unique<AnnotatedFileSource>(c.annotated, form, out.bpe.get());
  }
  return out;
}

struct TrainOpts {
  std::string model = "cbow";
  TrainConfig config;
  double lr_start = 0;
  double lr_min = 0;
  double subsample = 1e-3;
  CLI::Option* lr_start_opt = nullptr;
  CLI::Option* lr_min_opt = nullptr;
};

void add_train(CLI::App* sub, TrainOpts& t) {
  sub->add_option("--model", t.model, "cbow or skipgram")->check(CLI::IsMember({"cbow", "skipgram"}));
  sub->add_option("--dim", t.config.dim, "Vector size")->check(CLI::PositiveNumber);
  sub->add_option("--window", t.config.window, "Context words per side")->check(CLI::PositiveNumber);
  sub->add_option("--negatives", t.config.negatives, "Negative samples per target")->check(CLI::PositiveNumber);
  sub->add_option("--epochs", t.config.epochs, "Passes over the corpus");
  t.lr_start_opt = sub->add_option("--lr-start", t.lr_start, "Initial learning rate (default 0.05 cbow, 0.025 skipgram)");
  t.lr_min_opt = sub->add_option("--lr-min", t.lr_min, "Final learning rate (default lr-start * 1e-4)");
  sub->add_option("--subsample", t.subsample, "Subsampling threshold t; 0 disables");
  sub->add_option("--min-count", t.config.min_count, "Drop tokens rarer than this")->check(CLI::PositiveNumber);
  sub->add_option("--noise-power", t.config.noise_power, "Exponent on counts for negative sampling");
  sub->add_option("--noise-table-size", t.config.noise_table_size, "Slots in the negative-sampling table");
}

TrainConfig resolve_train(const TrainOpts& t, const Common& common) {
  TrainConfig config = t.config;
  config.model = *parse_model_kind(t.model);
  if (t.lr_start_opt->count()) config.lr_start = t.lr_start;
  if (t.lr_min_opt->count()) config.lr_min = t.lr_min;
  config.subsample_t = t.subsample > 0 ? std::optional<double>(t.subsample) : std::nullopt;
  config.seed = common.seed;
  config.threads = common.threads;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return config;
}

// Stores and models that a composition scheme may read.
struct SchemeOpts {
  std::string scheme = "surface";
  std::string surface;
  std::string lemma;
  std::string lemma_suffix;
  std::string pieces;
  std::string offsets;
  std::string bpe;
  std::string subword;
  std::string lexicon;
  double oov_value = 0;
};

void add_scheme(CLI::App* sub, SchemeOpts& s) {
  sub->add_option("--scheme", s.scheme, "Word representation scheme")
      ->check(CLI::IsMember({"surface", "lemma", "lemma-suffix-lemma", "lemma-suffix-average",
                             "derived-suffix", "piece-average", "fasttext"}));
  sub->add_option("--store,--surface-store", s.surface, "Surface-form vector store");
  sub->add_option("--lemma-store", s.lemma, "Lemma vector store");
  sub->add_option("--lemma-suffix-store", s.lemma_suffix, "Lemma+suffix vector store");
  sub->add_option("--pieces-store", s.pieces, "BPE piece vector store");
  sub->add_option("--offsets", s.offsets, "Derived suffix offset table");
  sub->add_option("--bpe", s.bpe, "BPE model for piece-average");
  sub->add_option("--subword-model", s.subword, "Subword model prefix for fasttext");
  sub->add_option("--lexicon", s.lexicon, "Annotated corpus giving each surface form its analysis");
  sub->add_option("--oov-value", s.oov_value, "Constant filling the out-of-vocabulary vector");
}

void validate_scheme_inputs(const SchemeOpts& s) {
  require_input(s.surface, "surface store");
  require_input(s.lemma, "lemma store");
  require_input(s.lemma_suffix, "lemma-suffix store");
  require_input(s.pieces, "piece store");
  require_input(s.offsets, "offset table");
  require_input(s.bpe, "BPE model");
  require_input(s.lexicon, "lexicon");
  if (!s.subword.empty()) require_input(s.subword + ".subword", "subword model");
}

// Owns everything a Composer borrows.
struct SchemeContext {
  Scheme scheme = Scheme::Surface;
  std::optional<VectorStore> surface, lemma, lemma_suffix, pieces;
  std::optional<SuffixOffsetTable> offsets;
  std::optional<BpeModel> bpe;
  std::optional<SubwordModel> subword;
  std::optional<Lexicon> lexicon;
  std::unique_ptr<Composer> composer;
  // Ranking candidates: composed vectors of every known word.
  std::optional<VectorStore> candidates;
  std::size_t duplicates = 0;

  Resolver resolver() const { return composer_resolver(*composer); }
};

std::unique_ptr<SchemeContext> load_scheme(const SchemeOpts& s, std::ostream& err) {
  validate_scheme_inputs(s);
  auto ctx = std::make_unique<SchemeContext>();
  ctx->scheme = *parse_scheme(s.scheme);

  auto load_store = [&](const std::string& path, std::optional<VectorStore>& slot) {
    if (path.empty()) return;
    LoadStats stats;
    slot = load_text(fs::path(path), &stats);
    if (stats.duplicates)
      err << "warning: " << path << ": " << stats.duplicates << " duplicate tokens, last occurrence kept\n";
    ctx->duplicates += stats.duplicates;
  };
  load_store(s.surface, ctx->surface);
  load_store(s.lemma, ctx->lemma);
  load_store(s.lemma_suffix, ctx->lemma_suffix);
  load_store(s.pieces, ctx->pieces);
  if (!s.offsets.empty()) ctx->offsets = SuffixOffsetTable::load(fs::path(s.offsets));
  if (!s.bpe.empty()) ctx->bpe = BpeModel::load(fs::path(s.bpe));
  if (!s.subword.empty()) ctx->subword = SubwordModel::load(fs::path(s.subword));
  if (!s.lexicon.empty()) {
    const auto sentences = read_annotated(fs::path(s.lexicon));
    ctx->lexicon.emplace(collect_annotated_types(sentences));
  }

  StoreBundle bundle;
  auto ptr = [](auto& opt) { return opt ? &*opt : nullptr; };
  bundle.surface = ptr(ctx->surface);
  bundle.lemma = ptr(ctx->lemma);
  bundle.lemma_suffix = ptr(ctx->lemma_suffix);
  bundle.pieces = ptr(ctx->pieces);
  bundle.offsets = ptr(ctx->offsets);
  bundle.bpe = ptr(ctx->bpe);
  bundle.subword = ptr(ctx->subword);
  ctx->composer = std::make_unique<Composer>(ctx->scheme, bundle, ptr(ctx->lexicon), s.oov_value);

  std::vector<std::string> words;
  if (ctx->lexicon) {
    words = ctx->lexicon->surfaces();
  } else {
    switch (ctx->scheme) {
      case Scheme::Surface:
        ctx->candidates = *ctx->surface;
        return ctx;
      case Scheme::Lemma: words = ctx->lemma->tokens(); break;
      case Scheme::LemmaSuffixLemmaOnly:
        for (const auto& t : ctx->lemma_suffix->tokens())
          if (!t.starts_with(kSuffixPrefix)) words.push_back(t);
        break;
      case Scheme::FastText: words = ctx->subword->index.word_vocab().tokens(); break;
      default:
        throw ConfigError("scheme '" + s.scheme + "' needs --lexicon to know which words to rank");
    }
  }
  ctx->candidates = ctx->composer->materialize(words);
  return ctx;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

void log_config(const CLI::App* sub, std::ostream& err) {
  err << "# " << sub->get_name() << " resolved configuration\n" << sub->config_to_str(true, false);
}

}  // namespace

std::vector<std::string> config_file_args(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::vector<std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#' || text[0] == ';' || text[0] == '[') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(path, lineno, "expected 'key = value'");
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (key.empty()) throw ParseError(path, lineno, "empty key");
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    for (char& c : key)
      if (c == '_') c = '-';
    if (key == "config") continue;
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string config;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    else if (args[i].starts_with("--config=")) config = args[i].substr(9);
  }
  if (config.empty()) return args;
  std::size_t sub = 1;
  while (sub < args.size() && args[sub].starts_with("-")) ++sub;
  if (sub == args.size()) return args;
  auto extra = config_file_args(config);
  std::vector<std::string> out(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(sub + 1));
  out.insert(out.end(), extra.begin(), extra.end());
  out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(sub + 1), args.end());
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Morphology-aware word embedding toolkit", "morphvec"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();

  Common common;
  CorpusOpts corpus;
  TrainOpts train_opts;
  SchemeOpts scheme;
  std::string output;
  std::string input;

  // preprocess
  auto* preprocess = app.add_subcommand("preprocess", "Render a corpus into one training form");
  add_common(preprocess, common);
  add_corpus(preprocess, corpus, true);
  preprocess->add_option("--output", output, "Rendered corpus, one sentence per line")->required();

  // train
  std::string context_output;
  auto* train_cmd = app.add_subcommand("train", "Train CBOW/Skip-Gram vectors");
  add_common(train_cmd, common);
  add_corpus(train_cmd, corpus, true);
  add_train(train_cmd, train_opts);
  train_cmd->add_option("--output", output, "Word vector store")->required();
  train_cmd->add_option("--context-output", context_output, "Also save context vectors");

  // train-subword
  int minn = SubwordIndex::kDefaultMinN;
  int maxn = SubwordIndex::kDefaultMaxN;
  std::size_t buckets = SubwordIndex::kDefaultBuckets;
  auto* train_sub = app.add_subcommand("train-subword", "Train fastText-style subword vectors");
  add_common(train_sub, common);
  add_corpus(train_sub, corpus, false);
  add_train(train_sub, train_opts);
  train_sub->add_option("--minn", minn, "Shortest character n-gram")->check(CLI::PositiveNumber);
  train_sub->add_option("--maxn", maxn, "Longest character n-gram")->check(CLI::PositiveNumber);
  train_sub->add_option("--buckets", buckets, "Hash buckets for n-grams")->check(CLI::PositiveNumber);
  train_sub->add_option("--output", output, "Output prefix")->required();

  // bpe-train
  std::size_t target_size = 32000;
  auto* bpe_train = app.add_subcommand("bpe-train", "Learn a BPE piece model from surface forms");
  add_common(bpe_train, common);
  add_corpus(bpe_train, corpus, false);
  bpe_train->add_option("--target-size", target_size, "Piece vocabulary size")->check(CLI::PositiveNumber);
  bpe_train->add_option("--output", output, "BPE model file")->required();

  // derive-suffix
  std::string surface_store;
  std::string lemma_store;
  auto* derive = app.add_subcommand("derive-suffix", "Average surface-minus-lemma offsets per suffix");
  add_common(derive, common);
  derive->add_option("--annotated", input, "Annotated corpus")->required();
  derive->add_option("--store", surface_store, "Store holding surface and lemma vectors")->required();
  derive->add_option("--lemma-store", lemma_store, "Take lemma vectors from this store instead");
  derive->add_option("--output", output, "Offset table (vector store format)")->required();

  // eval-analogy
  std::string questions;
  std::vector<std::size_t> ns(std::begin(kDefaultTopN), std::end(kDefaultTopN));
  bool exclude_inputs = false;
  std::string report_out;
  std::string metrics_out;
  std::string model_name;
  auto* eval_analogy = app.add_subcommand("eval-analogy", "3CosAdd analogy accuracy at several depths");
  add_common(eval_analogy, common);
  add_scheme(eval_analogy, scheme);
  eval_analogy->add_option("--questions", questions, "Analogy file: 'a b c d' per line")->required();
  eval_analogy->add_option("--n", ns, "Cut-off depths")->delimiter(',');
  eval_analogy->add_flag("--exclude-inputs", exclude_inputs, "Drop a, b and c from the candidates");

  // eval-group
  auto* eval_group = app.add_subcommand("eval-group", "Odd-one-out accuracy on word groups");
  add_common(eval_group, common);
  add_scheme(eval_group, scheme);
  eval_group->add_option("--questions", questions, "Group file: odd member first")->required();

  // eval-classify
  std::string train_docs;
  std::string test_docs;
  ClassifyOptions classify;
  auto* eval_classify = app.add_subcommand("eval-classify", "Averaged-embedding softmax classifier");
  add_common(eval_classify, common);
  add_scheme(eval_classify, scheme);
  eval_classify->add_option("--train-docs", train_docs, "label<TAB>tokens per line")->required();
  eval_classify->add_option("--test-docs", test_docs, "label<TAB>tokens per line")->required();
  eval_classify->add_option("--classifier-epochs", classify.epochs, "Gradient descent epochs");
  eval_classify->add_option("--classifier-lr", classify.lr, "Gradient descent step size");

  for (auto* sub : {eval_analogy, eval_group, eval_classify}) {
    sub->add_option("--report-out", report_out, "Write the table report here as well");
    sub->add_option("--metrics-out", metrics_out, "Write metric<TAB>value lines here");
    sub->add_option("--name", model_name, "Row label in the report");
  }

  // nn
  std::string token;
  std::size_t top = 10;
  bool include_query = false;
  auto* nn = app.add_subcommand("nn", "Nearest neighbors of a word by cosine");
  add_common(nn, common);
  add_scheme(nn, scheme);
  nn->add_option("--token", token, "Query word")->required();
  nn->add_option("--top", top, "Number of neighbors");
  nn->add_flag("--include-query", include_query, "Allow the query word itself in the list");

  // info
  std::string info_store, info_bpe, info_subword, info_annotated;
  auto* info = app.add_subcommand("info", "Summarize a store, BPE model, subword model or corpus");
  add_common(info, common);
  info->add_option("--store", info_store, "Vector store");
  info->add_option("--bpe", info_bpe, "BPE model");
  info->add_option("--subword-model", info_subword, "Subword model prefix");
  info->add_option("--annotated", info_annotated, "Annotated corpus");

  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (raw_args.size() <= 1) {
      err << app.help();
    } else {
      err << "error: " << e.what() << '\n';
      auto subs = app.get_subcommands();
      err << (subs.empty() ? app.help() : subs.front()->help());
    }
    return kUsage;
  }

  CLI::App* active = app.get_subcommands().front();

  try {
    if (active == preprocess) {
      require_output(output, common.overwrite);
      auto loaded = open_corpus(corpus);
      log_config(active, err);
      std::ofstream file(output, std::ios::binary);
      if (!file) throw IoError("cannot open for writing: " + output);
      loaded.source->for_each([&](std::span<const std::string> tokens) {
        for (std::size_t i = 0; i < tokens.size(); ++i) file << (i ? " " : "") << tokens[i];
        file << '\n';
      });
      if (!file) throw IoError("write failed: " + output);
      return kOk;
    }

    if (active == train_cmd) {
      require_output(output, common.overwrite);
      require_output(context_output, common.overwrite);
      auto loaded = open_corpus(corpus);
      const TrainConfig config = resolve_train(train_opts, common);
      log_config(active, err);
      const Vocabulary vocab = Vocabulary::from_counts(count_tokens(*loaded.source), config.min_count);
      if (vocab.empty()) throw DataError("no token reaches --min-count " + std::to_string(config.min_count));
      err << "vocabulary " << vocab.size() << " tokens, " << vocab.total_count() << " occurrences\n";
      TrainStats stats;
      const EmbeddingModel model = train(*loaded.source, vocab, config, &stats);
      for (std::size_t e = 0; e < stats.epoch_loss.size(); ++e)
        err << "epoch " << e + 1 << " tokens " << stats.epoch_tokens[e] << " mean loss "
            << (stats.epoch_tokens[e] ? stats.epoch_loss[e] / stats.epoch_tokens[e] : 0.0) << '\n';
      save_text(word_store(model), fs::path(output));
      if (!context_output.empty()) save_text(context_store(model), fs::path(context_output));
      return kOk;
    }

    if (active == train_sub) {
      if (minn > maxn) throw UsageError("--minn must not exceed --maxn");
      for (const char* suffix : {".subword", ".words.vec", ".ngrams.vec", ".vec"})
        require_output(output + suffix, common.overwrite);
      auto loaded = open_corpus(corpus);
      const TrainConfig config = resolve_train(train_opts, common);
      log_config(active, err);
      const Vocabulary vocab = Vocabulary::from_counts(count_tokens(*loaded.source), config.min_count);
      if (vocab.empty()) throw DataError("no token reaches --min-count " + std::to_string(config.min_count));
      const SubwordIndex index(vocab, minn, maxn, buckets);
      const EmbeddingModel model = train_subword(*loaded.source, index, config);
      to_subword_model(model).save(fs::path(output));
      save_text(word_store(model), fs::path(output + ".vec"));
      return kOk;
    }

    if (active == bpe_train) {
      require_output(output, common.overwrite);
      auto loaded = open_corpus(corpus);
      log_config(active, err);
      const TokenCounter counter = count_tokens(*loaded.source);
      WordCounts words(counter.counts().begin(), counter.counts().end());
      std::sort(words.begin(), words.end());
      if (words.empty()) throw DataError("corpus is empty");
      const BpeModel model = train_bpe(words, target_size);
      err << "learned " << model.merges().size() << " merges, " << model.piece_vocab().size() << " pieces\n";
      model.save(fs::path(output));
      return kOk;
    }

    if (active == derive) {
      require_input(input, "annotated corpus");
      require_input(surface_store, "store");
      require_input(lemma_store, "lemma store");
      require_output(output, common.overwrite);
      log_config(active, err);
      const auto sentences = read_annotated(fs::path(input));
      const auto types = collect_annotated_types(sentences);
      const VectorStore store = load_text(fs::path(surface_store));
      SuffixOffsetTable table;
      if (lemma_store.empty()) {
        table = derive_suffix_offsets(types, store);
      } else {
        const VectorStore lemmas = load_text(fs::path(lemma_store));
        table = derive_suffix_offsets(types, store, lemmas);
      }
      std::size_t skipped = 0;
      for (const auto& [id, n] : table.skipped) skipped += n;
      err << "derived " << table.offsets.size() << " suffix offsets, skipped " << skipped
          << " pairs with a missing vector\n";
      table.save(fs::path(output));
      return kOk;
    }

    if (active == eval_analogy || active == eval_group || active == eval_classify) {
      require_output(report_out, common.overwrite);
      require_output(metrics_out, common.overwrite);
      EvalReport report;
      report.model_name = model_name.empty() ? scheme.scheme : model_name;

      if (active == eval_analogy) {
        require_input(questions, "question file");
        if (ns.empty() || std::find(ns.begin(), ns.end(), 0u) != ns.end())
          throw UsageError("--n needs positive depths");
        auto ctx = load_scheme(scheme, err);
        log_config(active, err);
        const auto qs = load_analogy_questions(fs::path(questions));
        if (qs.empty()) throw DataError("no questions in " + questions);
        NeighborIndex index(*ctx->candidates);
        report.analogy = analogy_accuracy(qs, index, ctx->resolver(), ns, exclude_inputs);
      } else if (active == eval_group) {
        require_input(questions, "question file");
        auto ctx = load_scheme(scheme, err);
        log_config(active, err);
        const auto qs = load_group_questions(fs::path(questions), common.seed);
        if (qs.empty()) throw DataError("no questions in " + questions);
        report.group = group_accuracy(qs, ctx->resolver());
      } else {
        require_input(train_docs, "training documents");
        require_input(test_docs, "test documents");
        auto ctx = load_scheme(scheme, err);
        log_config(active, err);
        const auto train_set = load_documents(fs::path(train_docs));
        const auto test_set = load_documents(fs::path(test_docs));
        report.classification = classify_docs(train_set, test_set, *ctx->composer, classify);
      }

      const std::string table = format_table(report);
      out << table;
      if (!report_out.empty()) write_text_file(report_out, table);
      if (!metrics_out.empty()) write_text_file(metrics_out, format_metrics(report));
      return kOk;
    }

    if (active == nn) {
      auto ctx = load_scheme(scheme, err);
      log_config(active, err);
      auto query = ctx->composer->resolve(token);
      if (!query) {
        err << "error: '" << token << "' has no vector under scheme " << scheme.scheme << '\n';
        return kDataError;
      }
      NeighborIndex index(*ctx->candidates);
      std::vector<std::string> exclude;
      if (!include_query) exclude.push_back(token);
      for (const auto& r : index.nearest(*query, top, exclude))
        out << r.token << '\t' << format_real(r.similarity) << '\n';
      return kOk;
    }

    if (active == info) {
      require_input(info_store, "store");
      require_input(info_bpe, "BPE model");
      require_input(info_annotated, "annotated corpus");
      if (!info_subword.empty()) require_input(info_subword + ".subword", "subword model");
      if (info_store.empty() && info_bpe.empty() && info_subword.empty() && info_annotated.empty())
        throw UsageError("info needs --store, --bpe, --subword-model or --annotated");
      log_config(active, err);
      if (!info_store.empty()) {
        LoadStats stats;
        const VectorStore store = load_text(fs::path(info_store), &stats);
        std::size_t suffixes = 0;
        for (const auto& t : store.tokens()) suffixes += parse_suffix_token(t).has_value();
        out << "store\t" << info_store << "\ntokens\t" << store.size() << "\ndim\t" << store.dim()
            << "\nsuffix_tokens\t" << suffixes << "\nduplicates\t" << stats.duplicates << '\n';
      }
      if (!info_bpe.empty()) {
        const BpeModel model = BpeModel::load(fs::path(info_bpe));
        out << "bpe\t" << info_bpe << "\ntarget_size\t" << model.target_size() << "\nmerges\t"
            << model.merges().size() << "\npieces\t" << model.piece_vocab().size() << '\n';
      }
      if (!info_subword.empty()) {
        const SubwordModel model = SubwordModel::load(fs::path(info_subword));
        out << "subword\t" << info_subword << "\nwords\t" << model.index.word_vocab().size()
            << "\nminn\t" << model.index.n_min() << "\nmaxn\t" << model.index.n_max()
            << "\nbuckets\t" << model.index.buckets() << "\ndim\t" << model.ngram_table.cols() << '\n';
      }
      if (!info_annotated.empty()) {
        const auto sentences = read_annotated(fs::path(info_annotated));
        const auto types = collect_annotated_types(sentences);
        std::size_t tokens = 0;
        for (const auto& s : sentences) tokens += s.size();
        std::set<std::string> lemmas;
        std::set<std::uint32_t> suffixes;
        for (const auto& t : types) {
          lemmas.insert(t.lemma);
          suffixes.insert(t.suffix_id);
        }
        out << "annotated\t" << info_annotated << "\nsentences\t" << sentences.size() << "\ntokens\t"
            << tokens << "\nsurface_types\t" << Lexicon(types).size() << "\nlemmas\t" << lemmas.size()
            << "\nsuffix_ids\t" << suffixes.size() << '\n';
      }
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kRuntimeFailure;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace morphvec::cli
