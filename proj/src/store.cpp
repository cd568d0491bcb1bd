#include "morphvec/store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "morphvec/errors.hpp"

namespace morphvec {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& value) {
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc{} && end == s.data() + s.size();
}

}  // namespace

VectorStore::VectorStore(std::size_t dim) : dim_(dim), data_(0, dim) {
  if (dim == 0) throw std::invalid_argument("vector dimension must be positive");
}

void VectorStore::grow() {
  const std::size_t rows = std::max<std::size_t>(16, data_.rows() * 2);
  Matrix bigger(rows, dim_);
  for (std::size_t r = 0; r < tokens_.size(); ++r) {
    auto src = data_.row(r);
    std::copy(src.begin(), src.end(), bigger.row(r).begin());
  }
  data_ = std::move(bigger);
}

bool VectorStore::set(std::string_view token, std::span<const Real> vec) {
  if (vec.size() != dim_)
    throw std::invalid_argument("vector for '" + std::string(token) + "' has dimension " +
                                std::to_string(vec.size()) + ", store has " + std::to_string(dim_));
  if (token.empty() || std::any_of(token.begin(), token.end(), [](char c) { return is_space(c) || c == '\n'; }))
    throw std::invalid_argument("store tokens must be non-empty and whitespace-free");

  if (auto it = index_.find(token); it != index_.end()) {
    std::copy(vec.begin(), vec.end(), data_.row(it->second).begin());
    return false;
  }
  if (tokens_.size() == data_.rows()) grow();
  const std::size_t row = tokens_.size();
  tokens_.emplace_back(token);
  index_.emplace(tokens_.back(), row);
  std::copy(vec.begin(), vec.end(), data_.row(row).begin());
  return true;
}

std::optional<std::span<const Real>> VectorStore::lookup(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return data_.row(it->second);
}

std::optional<std::size_t> VectorStore::index_of(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Matrix VectorStore::to_matrix() const {
  Matrix m(tokens_.size(), dim_);
  for (std::size_t r = 0; r < tokens_.size(); ++r) {
    auto src = data_.row(r);
    std::copy(src.begin(), src.end(), m.row(r).begin());
  }
  return m;
}

std::string format_real(Real value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("cannot format number");
  return std::string(buf, end);
}

void save_text(const VectorStore& store, std::ostream& out) {
  out << store.size() << ' ' << store.dim() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < store.size(); ++i) {
    out << store.token(i);
    for (Real v : store.vector(i)) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out << ' ';
      out.write(buf, end - buf);
    }
    out << '\n';
  }
}

void save_text(const VectorStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  save_text(store, out);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

VectorStore load_text(std::istream& in, const std::string& source, LoadStats* stats) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing 'V D' header");
  const auto header = fields(line);
  std::size_t rows = 0;
  std::size_t dim = 0;
  if (header.size() != 2 || !parse_number(header[0], rows) || !parse_number(header[1], dim) ||
      dim == 0)
    throw ParseError(source, 1, "malformed header, expected 'V D'");

  VectorStore store(dim);
  std::vector<Real> vec(dim);
  std::size_t duplicates = 0;
  std::size_t lineno = 1;
  std::size_t read = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto parts = fields(line);
    if (parts.empty()) continue;
    if (read == rows) throw ParseError(source, lineno, "more rows than the header declares");
    if (parts.size() != dim + 1)
      throw ParseError(source, lineno, "expected " + std::to_string(dim + 1) + " fields, found " +
                                           std::to_string(parts.size()));
    for (std::size_t k = 0; k < dim; ++k) {
      if (!parse_number(parts[k + 1], vec[k]) || !std::isfinite(vec[k]))
        throw ParseError(source, lineno, "not a finite number: '" + std::string(parts[k + 1]) + "'");
    }
    if (!store.set(parts[0], vec)) ++duplicates;
    ++read;
  }
  if (read != rows)
    throw ParseError(source, lineno, "header declares " + std::to_string(rows) + " rows, found " +
                                    std::to_string(read));
  if (stats) stats->duplicates = duplicates;
  return store;
}

VectorStore load_text(const std::filesystem::path& path, LoadStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return load_text(in, path.string(), stats);
}

}  // namespace morphvec
