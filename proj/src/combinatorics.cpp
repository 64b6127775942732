#include "rskflow/combinatorics.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace rskflow {

using Rows = std::vector<std::vector<int>>;

// ---------------------------------------------------------------- Partition

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i] <= 0) throw std::invalid_argument("partition parts must be positive");
    if (i > 0 && parts_[i] > parts_[i - 1])
      throw std::invalid_argument("partition parts must be weakly decreasing");
  }
}

int Partition::size() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }

bool Partition::contains(const Partition& mu) const {
  if (mu.length() > length()) return false;
  for (int i = 0; i < mu.length(); ++i)
    if (mu.parts_[i] > parts_[i]) return false;
  return true;
}

Partition Partition::conjugate() const {
  std::vector<int> c(parts_.empty() ? 0 : parts_.front(), 0);
  for (int p : parts_)
    for (int j = 0; j < p; ++j) ++c[j];
  return Partition(std::move(c));
}

std::string Partition::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < parts_.size(); ++i) os << (i ? "," : "") << parts_[i];
  os << ')';
  return os.str();
}

// ---------------------------------------------------------------- Tableau

Tableau::Tableau(Rows rows, int alphabet_bound) : rows_(std::move(rows)), bound_(alphabet_bound) {
  while (!rows_.empty() && rows_.back().empty()) rows_.pop_back();
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const auto& row = rows_[r];
    if (row.empty()) throw std::invalid_argument("tableau has an empty inner row");
    if (r > 0 && row.size() > rows_[r - 1].size())
      throw std::invalid_argument("tableau row lengths must weakly decrease");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] < 1 || row[c] > bound_) throw std::invalid_argument("tableau entry outside alphabet");
      if (c > 0 && row[c] < row[c - 1]) throw std::invalid_argument("tableau rows must weakly increase");
      if (r > 0 && row[c] <= rows_[r - 1][c])
        throw std::invalid_argument("tableau columns must strictly increase");
    }
  }
}

Partition Tableau::shape() const {
  std::vector<int> parts;
  parts.reserve(rows_.size());
  for (const auto& row : rows_) parts.push_back(static_cast<int>(row.size()));
  return Partition(std::move(parts));
}

int Tableau::size() const {
  int s = 0;
  for (const auto& row : rows_) s += static_cast<int>(row.size());
  return s;
}

std::vector<int> Tableau::content() const {
  std::vector<int> c(bound_, 0);
  for (const auto& row : rows_)
    for (int v : row) ++c[v - 1];
  return c;
}

bool Tableau::is_standard() const {
  const int n = size();
  std::vector<bool> seen(n + 1, false);
  for (const auto& row : rows_)
    for (int v : row) {
      if (v > n || seen[v]) return false;
      seen[v] = true;
    }
  return true;
}

Tableau Tableau::with_bound(int alphabet_bound) const { return Tableau(rows_, alphabet_bound); }

std::string Tableau::to_string() const {
  std::ostringstream os;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (r) os << '/';
    os << '(';
    for (std::size_t c = 0; c < rows_[r].size(); ++c) os << (c ? "," : "") << rows_[r][c];
    os << ')';
  }
  if (rows_.empty()) os << "()";
  return os.str();
}

// ---------------------------------------------------------------- NatMatrix

NatMatrix::NatMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("matrix dimensions must be non-negative");
  data_.assign(static_cast<std::size_t>(rows) * cols, 0);
}

NatMatrix NatMatrix::from_rows(const Rows& rows) {
  const int r = static_cast<int>(rows.size());
  const int n = r ? static_cast<int>(rows.front().size()) : 0;
  NatMatrix a(r, n);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != n) throw std::invalid_argument("matrix rows differ in length");
    for (int j = 0; j < n; ++j) {
      if (rows[i][j] < 0) throw std::invalid_argument("matrix entries must be non-negative");
      a(i, j) = rows[i][j];
    }
  }
  return a;
}

std::vector<int> NatMatrix::row_sums() const {
  std::vector<int> s(rows_, 0);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) s[i] += (*this)(i, j);
  return s;
}

std::vector<int> NatMatrix::col_sums() const {
  std::vector<int> s(cols_, 0);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) s[j] += (*this)(i, j);
  return s;
}

int NatMatrix::total() const { return std::accumulate(data_.begin(), data_.end(), 0); }

NatMatrix NatMatrix::transpose() const {
  NatMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

NatMatrix NatMatrix::first_columns(int count) const {
  NatMatrix t(rows_, count);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < count; ++j) t(i, j) = (*this)(i, j);
  return t;
}

Rows NatMatrix::to_rows() const {
  Rows out(rows_, std::vector<int>(cols_));
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out[i][j] = (*this)(i, j);
  return out;
}

std::string NatMatrix::to_string() const {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < rows_; ++i) {
    os << (i ? ",[" : "[");
    for (int j = 0; j < cols_; ++j) os << (j ? "," : "") << (*this)(i, j);
    os << ']';
  }
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------- Permutation

Permutation::Permutation(std::vector<int> one_line) : w_(std::move(one_line)) {
  std::vector<bool> seen(w_.size() + 1, false);
  for (int v : w_) {
    if (v < 1 || v > static_cast<int>(w_.size()) || seen[v])
      throw std::invalid_argument("not a permutation in one-line notation");
    seen[v] = true;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> w(n);
  std::iota(w.begin(), w.end(), 1);
  return Permutation(std::move(w));
}

Permutation Permutation::longest(int n) {
  std::vector<int> w(n);
  for (int i = 0; i < n; ++i) w[i] = n - i;
  return Permutation(std::move(w));
}

std::vector<Permutation> Permutation::all(int n) {
  std::vector<int> w(n);
  std::iota(w.begin(), w.end(), 1);
  std::vector<Permutation> out;
  do {
    out.emplace_back(w);
  } while (std::next_permutation(w.begin(), w.end()));
  return out;
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(w_.size());
  for (std::size_t i = 0; i < w_.size(); ++i) inv[w_[i] - 1] = static_cast<int>(i) + 1;
  return Permutation(std::move(inv));
}

Permutation Permutation::operator*(const Permutation& w) const {
  if (w.size() != size()) throw std::invalid_argument("permutation sizes differ");
  std::vector<int> out(w_.size());
  for (int i = 1; i <= size(); ++i) out[i - 1] = (*this)(w(i));
  return Permutation(std::move(out));
}

NatMatrix Permutation::matrix() const {
  NatMatrix a(size(), size());
  for (int col = 0; col < size(); ++col) a(w_[col] - 1, col) = 1;
  return a;
}

std::string Permutation::to_string() const {
  std::ostringstream os;
  const bool wide = size() > 9;
  for (std::size_t i = 0; i < w_.size(); ++i) os << (wide && i ? "," : "") << w_[i];
  return os.str();
}

// ---------------------------------------------------------------- RSK

namespace {

// Schensted row insertion on raw rows; returns the new box.
Box insert_raw(Rows& rows, int value) {
  for (int r = 0;; ++r) {
    if (r == static_cast<int>(rows.size())) {
      rows.push_back({value});
      return {r, 0};
    }
    auto& row = rows[r];
    auto it = std::upper_bound(row.begin(), row.end(), value);
    if (it == row.end()) {
      row.push_back(value);
      return {r, static_cast<int>(row.size()) - 1};
    }
    std::swap(*it, value);
  }
}

void place(Rows& rows, Box b, int value) {
  if (b.row == static_cast<int>(rows.size())) rows.emplace_back();
  rows[b.row].push_back(value);
}

int max_entry(const Tableau& t) {
  int m = 0;
  for (const auto& row : t.rows())
    for (int v : row) m = std::max(m, v);
  return m;
}

}  // namespace

Biword matrix_to_biword(const NatMatrix& a) {
  Biword out;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int m = 0; m < a(i, j); ++m) out.emplace_back(i + 1, j + 1);
  return out;
}

InsertResult row_insert(const Tableau& t, int value) {
  Rows rows = t.rows();
  Box b = insert_raw(rows, value);
  return {Tableau(std::move(rows), std::max(t.alphabet_bound(), value)), b};
}

RskPair rsk(const NatMatrix& a) {
  Rows p, q;
  for (auto [i, j] : matrix_to_biword(a)) place(q, insert_raw(p, j), i);
  return {Tableau(std::move(p), a.cols()), Tableau(std::move(q), a.rows())};
}

NatMatrix rsk_inverse(const Tableau& p, const Tableau& q) {
  if (p.shape() != q.shape()) throw InvalidPairError("P and Q have different shapes");
  if (max_entry(p) > p.alphabet_bound() || max_entry(q) > q.alphabet_bound())
    throw InvalidPairError("tableau entry exceeds its alphabet bound");
  NatMatrix a(q.alphabet_bound(), p.alphabet_bound());
  Rows pr = p.rows(), qr = q.rows();
  while (!qr.empty()) {
    // The last recorded box holds the largest Q entry; among equal entries it is the rightmost.
    int best_row = -1;
    for (int r = 0; r < static_cast<int>(qr.size()); ++r) {
      if (best_row < 0 || qr[r].back() > qr[best_row].back() ||
          (qr[r].back() == qr[best_row].back() && qr[r].size() > qr[best_row].size()))
        best_row = r;
    }
    const int i = qr[best_row].back();
    qr[best_row].pop_back();
    int x = pr[best_row].back();
    pr[best_row].pop_back();
    for (int r = best_row - 1; r >= 0; --r) {
      auto& row = pr[r];
      auto it = std::lower_bound(row.begin(), row.end(), x);
      --it;
      std::swap(*it, x);
    }
    if (qr[best_row].empty()) {
      qr.pop_back();
      pr.pop_back();
    }
    a(i - 1, x - 1) += 1;
  }
  return a;
}

RskPair rs_permutation(const Permutation& w) { return rsk(w.matrix().transpose()); }

bool transpose_check(const NatMatrix& a) {
  RskPair direct = rsk(a);
  RskPair flipped = rsk(a.transpose());
  return flipped.P == direct.Q && flipped.Q == direct.P;
}

Tableau restrict(const Tableau& t, int i) {
  if (i < 0) throw std::invalid_argument("restriction bound must be non-negative");
  Rows rows;
  for (const auto& row : t.rows()) {
    std::vector<int> kept;
    for (int v : row)
      if (v <= i) kept.push_back(v);
    if (kept.empty()) break;
    rows.push_back(std::move(kept));
  }
  return Tableau(std::move(rows), i);
}

Tableau transpose_standard(const Tableau& t) {
  if (!t.is_standard()) throw std::invalid_argument("transpose requires a standard tableau");
  Rows out;
  for (std::size_t r = 0; r < t.rows().size(); ++r)
    for (std::size_t c = 0; c < t.rows()[r].size(); ++c) {
      if (out.size() <= c) out.emplace_back();
      out[c].push_back(t.rows()[r][c]);
    }
  return Tableau(std::move(out), t.alphabet_bound());
}

Tableau evacuation(const Tableau& t) {
  if (!t.is_standard()) throw std::invalid_argument("evacuation requires a standard tableau");
  Rows work = t.rows();
  Rows out;
  for (const auto& row : work) out.emplace_back(row.size(), 0);
  for (int k = t.size(); k >= 1; --k) {
    // Delete the corner entry and slide the hole outward.
    int r = 0, c = 0;
    for (;;) {
      const bool has_right = c + 1 < static_cast<int>(work[r].size());
      const bool has_down = r + 1 < static_cast<int>(work.size()) && c < static_cast<int>(work[r + 1].size());
      if (!has_right && !has_down) break;
      if (has_right && (!has_down || work[r][c + 1] < work[r + 1][c])) {
        work[r][c] = work[r][c + 1];
        ++c;
      } else {
        work[r][c] = work[r + 1][c];
        ++r;
      }
    }
    work[r].pop_back();
    if (work[r].empty()) work.pop_back();
    out[r][c] = k;
  }
  return Tableau(std::move(out), t.alphabet_bound());
}

// ---------------------------------------------------------------- enumeration

std::vector<Partition> add_horizontal_strip(const Partition& lambda, int count, int max_parts) {
  if (count < 0) throw std::invalid_argument("strip size must be non-negative");
  const int len = lambda.length();
  const int rows = std::min(len + 1, max_parts < 0 ? len + 1 : max_parts);
  std::vector<Partition> out;
  if (rows < len) return out;
  std::vector<int> mu(rows, 0);
  // Row r may grow up to lambda[r-1] (no two added boxes in one column).
  auto rec = [&](auto&& self, int r, int left) -> void {
    if (r == rows) {
      if (left == 0) out.emplace_back(mu);
      return;
    }
    const int base = lambda[r];
    const int cap = r == 0 ? base + left : std::min(lambda[r - 1], base + left);
    for (int v = cap; v >= base; --v) {
      mu[r] = v;
      self(self, r + 1, left - (v - base));
    }
  };
  if (rows == 0) {
    if (count == 0) out.emplace_back();
    return out;
  }
  rec(rec, 0, count);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::vector<Partition> partitions_of(int k, int max_parts) {
  std::vector<Partition> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int left, int cap) -> void {
    if (left == 0) {
      out.emplace_back(cur);
      return;
    }
    if (max_parts >= 0 && static_cast<int>(cur.size()) == max_parts) return;
    for (int p = std::min(left, cap); p >= 1; --p) {
      cur.push_back(p);
      self(self, left - p, p);
      cur.pop_back();
    }
  };
  rec(rec, k, k);
  return out;
}

namespace {

// Builds tableaux as chains of horizontal strips, one strip per letter.
void strip_chain(const Partition& target, int bound, const std::vector<int>* content, int letter, Rows& rows,
                 std::vector<Tableau>& out) {
  std::vector<int> parts;
  for (const auto& row : rows) parts.push_back(static_cast<int>(row.size()));
  Partition cur(parts);
  if (letter > bound) {
    if (cur == target) out.emplace_back(rows, bound);
    return;
  }
  const int remaining = target.size() - cur.size();
  int lo = 0, hi = remaining;
  if (content) lo = hi = (*content)[letter - 1];
  if (letter == bound) lo = hi = remaining;
  for (int l = lo; l <= hi; ++l) {
    for (const Partition& mu : add_horizontal_strip(cur, l, letter)) {
      if (!target.contains(mu)) continue;
      Rows next = rows;
      next.resize(mu.length());
      for (int r = 0; r < mu.length(); ++r) next[r].resize(mu[r], letter);
      strip_chain(target, bound, content, letter + 1, next, out);
    }
  }
}

}  // namespace

std::vector<Tableau> semistandard_tableaux(const Partition& shape, int bound) {
  std::vector<Tableau> out;
  Rows rows;
  if (bound == 0) {
    if (shape.size() == 0) out.emplace_back(0);
    return out;
  }
  strip_chain(shape, bound, nullptr, 1, rows, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Tableau> semistandard_tableaux(const Partition& shape, std::span<const int> content) {
  std::vector<Tableau> out;
  const int bound = static_cast<int>(content.size());
  if (std::accumulate(content.begin(), content.end(), 0) != shape.size()) return out;
  if (bound == 0) {
    if (shape.size() == 0) out.emplace_back(0);
    return out;
  }
  std::vector<int> c(content.begin(), content.end());
  Rows rows;
  strip_chain(shape, bound, &c, 1, rows, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Tableau> standard_tableaux(const Partition& shape) {
  std::vector<int> ones(shape.size(), 1);
  return semistandard_tableaux(shape, ones);
}

std::int64_t count_standard(const Partition& shape) {
  const Partition conj = shape.conjugate();
  std::int64_t num = 1;
  std::vector<std::int64_t> hooks;
  for (int r = 0; r < shape.length(); ++r)
    for (int c = 0; c < shape[r]; ++c) hooks.push_back((shape[r] - c - 1) + (conj[c] - r - 1) + 1);
  // n! / prod(hooks), dividing as we go keeps values small for desk-scale n.
  std::int64_t den = 1;
  for (int k = 2; k <= shape.size(); ++k) num *= k;
  for (auto h : hooks) den *= h;
  return num / den;
}

std::int64_t kostka(const Partition& shape, std::span<const int> content) {
  return static_cast<std::int64_t>(semistandard_tableaux(shape, content).size());
}

std::vector<NatMatrix> matrices_with_entry_bound(int rows, int cols, int max_entry) {
  std::vector<NatMatrix> out;
  NatMatrix a(rows, cols);
  const int cells = rows * cols;
  auto rec = [&](auto&& self, int k) -> void {
    if (k == cells) {
      out.push_back(a);
      return;
    }
    for (int v = 0; v <= max_entry; ++v) {
      a(k / cols, k % cols) = v;
      self(self, k + 1);
    }
  };
  rec(rec, 0);
  return out;
}

std::vector<NatMatrix> matrices_with_margins(std::span<const int> row_sums, std::span<const int> col_sums) {
  const int r = static_cast<int>(row_sums.size());
  const int n = static_cast<int>(col_sums.size());
  std::vector<NatMatrix> out;
  if (std::accumulate(row_sums.begin(), row_sums.end(), 0) != std::accumulate(col_sums.begin(), col_sums.end(), 0))
    return out;
  NatMatrix a(r, n);
  std::vector<int> row_left(row_sums.begin(), row_sums.end());
  std::vector<int> col_left(col_sums.begin(), col_sums.end());
  auto rec = [&](auto&& self, int k) -> void {
    if (k == r * n) {
      out.push_back(a);
      return;
    }
    const int i = k / n, j = k % n;
    int lo = 0, hi = std::min(row_left[i], col_left[j]);
    if (j == n - 1) lo = row_left[i];
    if (i == r - 1) lo = std::max(lo, col_left[j]);
    for (int v = lo; v <= hi; ++v) {
      a(i, j) = v;
      row_left[i] -= v;
      col_left[j] -= v;
      self(self, k + 1);
      row_left[i] += v;
      col_left[j] += v;
    }
    a(i, j) = 0;
  };
  if (r == 0 || n == 0) {
    out.push_back(a);
    return out;
  }
  rec(rec, 0);
  return out;
}

std::vector<NatMatrix> matrices_with_col_sums(int rows, std::span<const int> col_sums) {
  const int n = static_cast<int>(col_sums.size());
  std::vector<NatMatrix> out;
  NatMatrix a(rows, n);
  // Column-major recursion; each column is a composition of its sum into `rows` parts.
  auto rec = [&](auto&& self, int i, int j, int left) -> void {
    if (j == n) {
      out.push_back(a);
      return;
    }
    if (i == rows - 1) {
      a(i, j) = left;
      self(self, 0, j + 1, j + 1 < n ? col_sums[j + 1] : 0);
      a(i, j) = 0;
      return;
    }
    for (int v = left; v >= 0; --v) {
      a(i, j) = v;
      self(self, i + 1, j, left - v);
    }
    a(i, j) = 0;
  };
  if (rows == 0) {
    out.push_back(a);
    return out;
  }
  rec(rec, 0, 0, n ? col_sums[0] : 0);
  std::sort(out.begin(), out.end(), [](const NatMatrix& x, const NatMatrix& y) {
    return x.data() < y.data();
  });
  return out;
}

}  // namespace rskflow
