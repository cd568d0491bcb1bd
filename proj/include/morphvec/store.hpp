#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "morphvec/matrix.hpp"

namespace morphvec {

// Finished token -> vector map in insertion order. Immutable once handed to
// evaluation; concurrent reads are safe.
class VectorStore {
 public:
  VectorStore() = default;
  explicit VectorStore(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }

  // Inserts or overwrites. Returns false when the token already existed (its
  // position is kept, the vector replaced).
  bool set(std::string_view token, std::span<const Real> vec);

  std::optional<std::span<const Real>> lookup(std::string_view token) const;
  std::optional<std::size_t> index_of(std::string_view token) const;

  const std::string& token(std::size_t i) const { return tokens_.at(i); }
  std::span<const Real> vector(std::size_t i) const { return data_.row(i); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  // Rows of the store as a matrix, in insertion order.
  Matrix to_matrix() const;

  friend bool operator==(const VectorStore& a, const VectorStore& b) {
    return a.dim_ == b.dim_ && a.tokens_ == b.tokens_ && a.data_ == b.data_;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  void grow();

  std::size_t dim_ = 0;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
  Matrix data_;
};

inline std::optional<std::span<const Real>> lookup(const VectorStore& store, std::string_view token) {
  return store.lookup(token);
}

// Shortest representation that parses back to the same double.
std::string format_real(Real value);

// word2vec text format: "V D" header, then "token v1 ... vD" per line.
void save_text(const VectorStore& store, std::ostream& out);
void save_text(const VectorStore& store, const std::filesystem::path& path);

struct LoadStats {
  std::size_t duplicates = 0;
};

VectorStore load_text(std::istream& in, const std::string& source = "store",
                      LoadStats* stats = nullptr);
VectorStore load_text(const std::filesystem::path& path, LoadStats* stats = nullptr);

}  // namespace morphvec
