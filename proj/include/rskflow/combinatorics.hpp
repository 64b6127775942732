#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rskflow {

// Thrown by rsk_inverse when P and Q cannot form an RSK pair.
class InvalidPairError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<int> parts);

  const std::vector<int>& parts() const { return parts_; }
  int length() const { return static_cast<int>(parts_.size()); }
  int size() const;
  // Zero past the last part.
  int operator[](std::size_t i) const { return i < parts_.size() ? parts_[i] : 0; }

  bool contains(const Partition& mu) const;
  Partition conjugate() const;
  std::string to_string() const;

  auto operator<=>(const Partition&) const = default;

 private:
  std::vector<int> parts_;
};

struct Box {
  int row = 0;
  int col = 0;
  auto operator<=>(const Box&) const = default;
};

// Semistandard tableau, rows stored top to bottom, entries in 1..alphabet_bound.
class Tableau {
 public:
  Tableau() = default;
  explicit Tableau(int alphabet_bound) : bound_(alphabet_bound) {}
  Tableau(std::vector<std::vector<int>> rows, int alphabet_bound);

  const std::vector<std::vector<int>>& rows() const { return rows_; }
  int alphabet_bound() const { return bound_; }
  Partition shape() const;
  int size() const;
  bool empty() const { return rows_.empty(); }
  int at(int row, int col) const { return rows_[row][col]; }

  std::vector<int> content() const;
  bool is_standard() const;
  Tableau with_bound(int alphabet_bound) const;
  std::string to_string() const;

  auto operator<=>(const Tableau&) const = default;

 private:
  std::vector<std::vector<int>> rows_;
  int bound_ = 0;
};

class NatMatrix {
 public:
  NatMatrix() = default;
  NatMatrix(int rows, int cols);
  static NatMatrix from_rows(const std::vector<std::vector<int>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  // 0-based access.
  int operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  int& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  std::vector<int> row_sums() const;
  std::vector<int> col_sums() const;
  int total() const;
  NatMatrix transpose() const;
  NatMatrix first_columns(int count) const;
  std::vector<std::vector<int>> to_rows() const;
  const std::vector<int>& data() const { return data_; }
  std::string to_string() const;

  auto operator<=>(const NatMatrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> data_;
};

using Biword = std::vector<std::pair<int, int>>;

class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> one_line);
  static Permutation identity(int n);
  static Permutation longest(int n);
  static std::vector<Permutation> all(int n);

  int size() const { return static_cast<int>(w_.size()); }
  // 1-based: w(i).
  int operator()(int i) const { return w_[i - 1]; }
  const std::vector<int>& one_line() const { return w_; }
  Permutation inverse() const;
  // (v * w)(i) = v(w(i)).
  Permutation operator*(const Permutation& w) const;
  // A_{ia} = 1 iff i = w(a), so column a carries e_{w(a)}.
  NatMatrix matrix() const;
  std::string to_string() const;

  auto operator<=>(const Permutation&) const = default;

 private:
  std::vector<int> w_;
};

struct InsertResult {
  Tableau tableau;
  Box box;
};

struct RskPair {
  Tableau P;
  Tableau Q;
  bool operator==(const RskPair&) const = default;
};

Biword matrix_to_biword(const NatMatrix& a);
InsertResult row_insert(const Tableau& t, int value);
RskPair rsk(const NatMatrix& a);
NatMatrix rsk_inverse(const Tableau& p, const Tableau& q);
RskPair rs_permutation(const Permutation& w);
bool transpose_check(const NatMatrix& a);
Tableau restrict(const Tableau& t, int i);
Tableau transpose_standard(const Tableau& t);
Tableau evacuation(const Tableau& t);

// Shapes obtained by adding a horizontal strip of `count` boxes, at most max_parts rows.
std::vector<Partition> add_horizontal_strip(const Partition& lambda, int count, int max_parts);

std::vector<Partition> partitions_of(int k, int max_parts = -1);
std::vector<Tableau> semistandard_tableaux(const Partition& shape, int bound);
std::vector<Tableau> semistandard_tableaux(const Partition& shape, std::span<const int> content);
std::vector<Tableau> standard_tableaux(const Partition& shape);
std::int64_t count_standard(const Partition& shape);
std::int64_t kostka(const Partition& shape, std::span<const int> content);

std::vector<NatMatrix> matrices_with_entry_bound(int rows, int cols, int max_entry);
std::vector<NatMatrix> matrices_with_margins(std::span<const int> row_sums, std::span<const int> col_sums);
std::vector<NatMatrix> matrices_with_col_sums(int rows, std::span<const int> col_sums);

}  // namespace rskflow
