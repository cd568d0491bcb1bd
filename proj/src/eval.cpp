#include "morphvec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "morphvec/corpus.hpp"
#include "morphvec/errors.hpp"

namespace morphvec {

namespace {

double norm(std::span<const Real> v) { return std::sqrt(dot(v, v)); }

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

}  // namespace

double cosine(std::span<const Real> u, std::span<const Real> v) {
  if (u.size() != v.size()) throw std::invalid_argument("cosine of vectors with different dimensions");
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu == 0 || nv == 0) throw std::invalid_argument("cosine of a zero vector");
  return dot(u, v) / (nu * nv);
}

Resolver store_resolver(const VectorStore& store) {
  return [&store](std::string_view w) -> std::optional<std::vector<Real>> {
    if (auto v = store.lookup(w)) return std::vector<Real>(v->begin(), v->end());
    return std::nullopt;
  };
}

Resolver composer_resolver(const Composer& composer) {
  return [&composer](std::string_view w) { return composer.resolve(w); };
}

NeighborIndex::NeighborIndex(const VectorStore& candidates) : store_(candidates) {
  norms_.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) norms_.push_back(norm(candidates.vector(i)));
}

std::vector<Ranked> NeighborIndex::nearest(std::span<const Real> query, std::size_t top_n,
                                           std::span<const std::string> exclude) const {
  if (query.size() != store_.dim())
    throw std::invalid_argument("query dimension differs from the candidate store");
  const double nq = norm(query);
  if (nq == 0 || top_n == 0) return {};

  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(store_.size());
  for (std::size_t i = 0; i < store_.size(); ++i) {
    if (norms_[i] == 0) continue;
    if (std::find(exclude.begin(), exclude.end(), store_.token(i)) != exclude.end()) continue;
    scored.emplace_back(dot(query, store_.vector(i)) / (nq * norms_[i]), i);
  }
  const std::size_t keep = std::min(top_n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                    [](const auto& x, const auto& y) {
                      if (x.first != y.first) return x.first > y.first;
                      return x.second < y.second;
                    });
  std::vector<Ranked> out;
  out.reserve(keep);
  for (std::size_t k = 0; k < keep; ++k)
    out.push_back({store_.token(scored[k].second), scored[k].first});
  return out;
}

std::optional<std::vector<Ranked>> analogy_predict(std::string_view a, std::string_view b,
                                                   std::string_view c, const NeighborIndex& index,
                                                   const Resolver& resolve, std::size_t top_n,
                                                   bool exclude_inputs) {
  auto va = resolve(a);
  auto vb = resolve(b);
  auto vc = resolve(c);
  if (!va || !vb || !vc) return std::nullopt;
  std::vector<Real> query(vb->size());
  for (std::size_t k = 0; k < query.size(); ++k) query[k] = (*vb)[k] - (*va)[k] + (*vc)[k];
  if (norm(query) == 0) return std::nullopt;
  std::vector<std::string> exclude;
  if (exclude_inputs) exclude = {std::string(a), std::string(b), std::string(c)};
  return index.nearest(query, top_n, exclude);
}

std::optional<std::vector<Ranked>> analogy_predict(std::string_view a, std::string_view b,
                                                   std::string_view c, const VectorStore& store,
                                                   std::size_t top_n, bool exclude_inputs) {
  NeighborIndex index(store);
  return analogy_predict(a, b, c, index, store_resolver(store), top_n, exclude_inputs);
}

AnalogyResult analogy_accuracy(std::span<const AnalogyQuestion> questions,
                               const NeighborIndex& index, const Resolver& resolve,
                               std::span<const std::size_t> ns, bool exclude_inputs) {
  if (questions.empty()) throw std::invalid_argument("analogy evaluation needs at least one question");
  if (ns.empty()) throw std::invalid_argument("analogy evaluation needs at least one cut-off n");

  AnalogyResult result;
  result.ns.assign(ns.begin(), ns.end());
  result.correct.assign(ns.size(), 0);
  result.total = questions.size();
  const std::size_t deepest = *std::max_element(ns.begin(), ns.end());

  for (const auto& q : questions) {
    auto ranked = analogy_predict(q.a, q.b, q.c, index, resolve, deepest, exclude_inputs);
    if (!ranked) {
      ++result.skipped;
      continue;
    }
    ++result.evaluated;
    auto hit = std::find_if(ranked->begin(), ranked->end(), [&](const Ranked& r) { return r.token == q.d; });
    if (hit == ranked->end()) continue;
    const auto rank = static_cast<std::size_t>(hit - ranked->begin());
    for (std::size_t k = 0; k < ns.size(); ++k)
      if (rank < ns[k]) ++result.correct[k];
  }
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const double c = static_cast<double>(result.correct[k]);
    result.accuracy.push_back(result.evaluated ? c / result.evaluated : 0.0);
    result.accuracy_all.push_back(c / result.total);
  }
  return result;
}

AnalogyResult analogy_accuracy(std::span<const AnalogyQuestion> questions, const VectorStore& store,
                               std::span<const std::size_t> ns, bool exclude_inputs) {
  NeighborIndex index(store);
  return analogy_accuracy(questions, index, store_resolver(store), ns, exclude_inputs);
}

std::optional<std::size_t> odd_one_out(std::span<const std::string> members,
                                       const Resolver& resolve) {
  std::vector<std::pair<std::size_t, std::vector<Real>>> found;
  for (std::size_t i = 0; i < members.size(); ++i) {
    auto v = resolve(members[i]);
    if (v && norm(*v) > 0) found.emplace_back(i, std::move(*v));
  }
  if (found.size() < 3) return std::nullopt;

  std::vector<Real> mean(found.front().second.size(), 0);
  for (const auto& [i, v] : found) axpy(1, v, mean);
  for (Real& x : mean) x /= static_cast<double>(found.size());
  if (norm(mean) == 0) return std::nullopt;

  std::size_t best = found.front().first;
  double lowest = INFINITY;
  for (const auto& [i, v] : found) {
    const double sim = cosine(v, mean);
    if (sim < lowest) {
      lowest = sim;
      best = i;
    }
  }
  return best;
}

GroupResult group_accuracy(std::span<const GroupQuestion> questions, const Resolver& resolve) {
  if (questions.empty()) throw std::invalid_argument("group evaluation needs at least one question");
  GroupResult result;
  result.total = questions.size();
  for (const auto& q : questions) {
    auto predicted = odd_one_out(q.members, resolve);
    if (!predicted) {
      ++result.skipped;
      continue;
    }
    ++result.evaluated;
    if (*predicted == q.odd_index) ++result.correct;
  }
  return result;
}

ClassifyResult classify_docs(std::span<const Document> train, std::span<const Document> test,
                             const Resolver& resolve, std::span<const Real> oov,
                             const ClassifyOptions& options) {
  if (train.empty() || test.empty()) throw std::invalid_argument("classification needs non-empty splits");
  std::vector<std::string> labels;
  for (const auto& d : train) labels.push_back(d.label);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  if (labels.size() < 2) throw std::invalid_argument("classification needs at least two training labels");

  const std::size_t dim = oov.size();
  const std::size_t classes = labels.size();
  ClassifyResult result;
  result.labels = labels;

  auto features = [&](const Document& d, bool count_oov) {
    std::vector<Real> x(dim, 0);
    for (const auto& tok : d.tokens) {
      auto v = resolve(tok);
      if (count_oov) {
        ++result.tokens;
        if (!v) ++result.oov_tokens;
      }
      if (v && v->size() != dim) throw std::invalid_argument("resolved vector has the wrong dimension");
      axpy(1, v ? std::span<const Real>(*v) : oov, x);
    }
    if (!d.tokens.empty())
      for (Real& v : x) v /= static_cast<double>(d.tokens.size());
    return x;
  };
  auto label_of = [&](const std::string& l) -> std::ptrdiff_t {
    auto it = std::lower_bound(labels.begin(), labels.end(), l);
    return (it != labels.end() && *it == l) ? it - labels.begin() : -1;
  };

  std::vector<std::vector<Real>> xs;
  std::vector<std::size_t> ys;
  for (const auto& d : train) {
    xs.push_back(features(d, false));
    ys.push_back(static_cast<std::size_t>(label_of(d.label)));
  }

  Matrix weights(classes, dim);
  std::vector<double> bias(classes, 0);
  Matrix grad_w(classes, dim);
  std::vector<double> grad_b(classes);
  std::vector<double> p(classes);

  auto predict = [&](std::span<const Real> x, std::vector<double>& probs) {
    double best = -INFINITY;
    for (std::size_t c = 0; c < classes; ++c) {
      probs[c] = dot(weights.row(c), x) + bias[c];
      best = std::max(best, probs[c]);
    }
    double z = 0;
    for (double& v : probs) {
      v = std::exp(v - best);
      z += v;
    }
    for (double& v : probs) v /= z;
  };

  const double scale = 1.0 / static_cast<double>(xs.size());
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::fill(grad_w.data().begin(), grad_w.data().end(), 0);
    std::fill(grad_b.begin(), grad_b.end(), 0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      predict(xs[i], p);
      for (std::size_t c = 0; c < classes; ++c) {
        const double err = p[c] - (c == ys[i] ? 1.0 : 0.0);
        axpy(err, xs[i], grad_w.row(c));
        grad_b[c] += err;
      }
    }
    for (std::size_t c = 0; c < classes; ++c) {
      axpy(-options.lr * scale, grad_w.row(c), weights.row(c));
      bias[c] -= options.lr * scale * grad_b[c];
    }
  }

  std::size_t correct = 0;
  for (const auto& d : test) {
    const auto x = features(d, true);
    predict(x, p);
    const auto guess = static_cast<std::ptrdiff_t>(std::max_element(p.begin(), p.end()) - p.begin());
    if (guess == label_of(d.label)) ++correct;
  }
  result.test_docs = test.size();
  result.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
  return result;
}

ClassifyResult classify_docs(std::span<const Document> train, std::span<const Document> test,
                             const Composer& composer, const ClassifyOptions& options) {
  return classify_docs(train, test, composer_resolver(composer), composer.oov(), options);
}

std::vector<AnalogyQuestion> parse_analogy_questions(std::istream& in, const std::string& source) {
  std::vector<AnalogyQuestion> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto words = split_whitespace(line);
    if (words.empty() || words.front().starts_with(':')) continue;
    if (words.size() != 4)
      throw ParseError(source, lineno, "expected 4 words, found " + std::to_string(words.size()));
    out.push_back({words[0], words[1], words[2], words[3]});
  }
  return out;
}

std::vector<AnalogyQuestion> load_analogy_questions(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_analogy_questions(in, path.string());
}

std::vector<GroupQuestion> parse_group_questions(std::istream& in, const std::string& source,
                                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<GroupQuestion> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto words = split_whitespace(line);
    if (words.empty() || words.front().starts_with(':')) continue;
    if (words.size() < 3)
      throw ParseError(source, lineno, "a group needs at least 3 members");
    GroupQuestion q{std::move(words), 0};
    // Fisher-Yates with an explicit modulo draw so the order is platform independent.
    for (std::size_t i = q.members.size() - 1; i > 0; --i) {
      const std::size_t j = rng() % (i + 1);
      std::swap(q.members[i], q.members[j]);
      if (q.odd_index == i) q.odd_index = j;
      else if (q.odd_index == j) q.odd_index = i;
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<GroupQuestion> load_group_questions(const std::filesystem::path& path,
                                                std::uint64_t seed) {
  auto in = open_input(path);
  return parse_group_questions(in, path.string(), seed);
}

std::vector<Document> parse_documents(std::istream& in, const std::string& source) {
  std::vector<Document> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (split_whitespace(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw ParseError(source, lineno, "expected 'label<TAB>tokens'");
    out.push_back({line.substr(0, tab), split_whitespace(std::string_view(line).substr(tab + 1))});
  }
  return out;
}

std::vector<Document> load_documents(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_documents(in, path.string());
}

std::string format_table(const EvalReport& report) {
  std::ostringstream out;
  const std::string name = report.model_name.empty() ? "model" : report.model_name;
  const std::size_t width = std::max<std::size_t>(16, name.size() + 14);
  if (report.analogy) {
    const auto& a = *report.analogy;
    out << std::left << std::setw(static_cast<int>(width)) << "Embedding Model"
        << "Occurrence in the first n prediction\n";
    out << std::setw(static_cast<int>(width)) << "";
    for (std::size_t n : a.ns) out << std::setw(8) << n;
    out << '\n' << std::setw(static_cast<int>(width)) << name;
    for (double v : a.accuracy) out << std::setw(8) << fixed(v, 2);
    out << '\n' << std::setw(static_cast<int>(width)) << (name + " (oov=wrong)");
    for (double v : a.accuracy_all) out << std::setw(8) << fixed(v, 2);
    out << "\n\nquestions " << a.total << ", evaluated " << a.evaluated << ", skipped (oov) "
        << a.skipped << ", oov rate " << fixed(a.oov_rate()) << '\n';
  }
  if (report.group) {
    const auto& g = *report.group;
    out << "group accuracy " << fixed(g.accuracy()) << " (oov=wrong " << fixed(g.accuracy_all())
        << "), questions " << g.total << ", evaluated " << g.evaluated << ", skipped (oov) "
        << g.skipped << '\n';
  }
  if (report.classification) {
    const auto& c = *report.classification;
    out << "classification accuracy " << fixed(c.accuracy) << " over " << c.test_docs
        << " documents, " << c.labels.size() << " labels, token oov rate " << fixed(c.oov_rate())
        << '\n';
  }
  return out.str();
}

std::string format_metrics(const EvalReport& report) {
  std::ostringstream out;
  if (!report.model_name.empty()) out << "model\t" << report.model_name << '\n';
  if (report.analogy) {
    const auto& a = *report.analogy;
    for (std::size_t k = 0; k < a.ns.size(); ++k)
      out << "analogy@" << a.ns[k] << '\t' << format_real(a.accuracy[k]) << '\n';
    for (std::size_t k = 0; k < a.ns.size(); ++k)
      out << "analogy_oov_wrong@" << a.ns[k] << '\t' << format_real(a.accuracy_all[k]) << '\n';
    out << "analogy_questions\t" << a.total << '\n'
        << "analogy_evaluated\t" << a.evaluated << '\n'
        << "analogy_skipped\t" << a.skipped << '\n'
        << "analogy_oov_rate\t" << format_real(a.oov_rate()) << '\n';
  }
  if (report.group) {
    const auto& g = *report.group;
    out << "group_accuracy\t" << format_real(g.accuracy()) << '\n'
        << "group_accuracy_oov_wrong\t" << format_real(g.accuracy_all()) << '\n'
        << "group_questions\t" << g.total << '\n'
        << "group_evaluated\t" << g.evaluated << '\n'
        << "group_skipped\t" << g.skipped << '\n'
        << "group_oov_rate\t" << format_real(g.oov_rate()) << '\n';
  }
  if (report.classification) {
    const auto& c = *report.classification;
    out << "classification_accuracy\t" << format_real(c.accuracy) << '\n'
        << "classification_test_docs\t" << c.test_docs << '\n'
        << "classification_oov_rate\t" << format_real(c.oov_rate()) << '\n';
  }
  return out.str();
}

}  // namespace morphvec
