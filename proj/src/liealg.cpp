#include "rskflow/liealg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rskflow::lie {

namespace {

double to_double(double x) { return x; }
double to_double(const Rational& x) { return x.get_d(); }

Rational factorial(int m) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(m));
  return Rational(f);
}

void check_range(int v, int hi, const char* what) {
  if (v < 1 || v > hi) throw std::out_of_range(std::string(what) + " index out of range");
}

template <class S>
S inverse_difference(const S& a, const S& b, const char* what) {
  if (a == b) throw PoleError(std::string("coinciding parameters in ") + what);
  return S(S(1) / S(a - b));
}

Generator left(int i, int j, int a) { return {Side::GlR, i, j, a}; }
Generator right(int i, int j, int b) { return {Side::GlN, i, j, b}; }

}  // namespace

// ---------------------------------------------------------------- basis

WeightSpaceBasis::WeightSpaceBasis(int r, int n, std::vector<int> k, std::optional<std::vector<int>> weight)
    : r_(r), n_(n), k_(std::move(k)), weight_(std::move(weight)) {
  if (r < 1 || n < 1) throw std::invalid_argument("basis needs r >= 1 and n >= 1");
  if (static_cast<int>(k_.size()) != n) throw std::invalid_argument("need one degree per column");
  for (int d : k_)
    if (d < 0) throw std::invalid_argument("column degrees must be non-negative");
  if (weight_) {
    if (static_cast<int>(weight_->size()) != r) throw std::invalid_argument("weight must have length r");
    monomials_ = matrices_with_margins(*weight_, k_);
    std::sort(monomials_.begin(), monomials_.end(),
              [](const NatMatrix& x, const NatMatrix& y) { return x.data() < y.data(); });
  } else {
    monomials_ = matrices_with_col_sums(r, k_);
  }
  norms_.reserve(monomials_.size());
  for (std::size_t idx = 0; idx < monomials_.size(); ++idx) {
    Rational nrm = 1;
    for (int v : monomials_[idx].data()) nrm *= factorial(v);
    norms_.push_back(nrm);
    index_.emplace(monomials_[idx].data(), idx);
  }
}

std::optional<std::size_t> WeightSpaceBasis::index_of(const NatMatrix& a) const {
  if (a.rows() != r_ || a.cols() != n_) return std::nullopt;
  auto it = index_.find(a.data());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

WeightSpaceBasis WeightSpaceBasis::enclosing_degree_block() const { return WeightSpaceBasis(r_, n_, k_); }

BasisPtr basis_for(int r, int n, std::vector<int> k, std::optional<std::vector<int>> weight) {
  return std::make_shared<const WeightSpaceBasis>(r, n, std::move(k), std::move(weight));
}

std::optional<std::pair<NatMatrix, long>> apply_word(std::span<const Generator> word, NatMatrix a) {
  long coeff = 1;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    const Generator& g = *it;
    int row_from, col_from, row_to, col_to;
    if (g.side == Side::GlR) {
      row_from = g.j - 1, col_from = g.factor - 1, row_to = g.i - 1, col_to = g.factor - 1;
    } else {
      row_from = g.factor - 1, col_from = g.j - 1, row_to = g.factor - 1, col_to = g.i - 1;
    }
    const int e = a(row_from, col_from);
    if (e == 0) return std::nullopt;
    coeff *= e;
    a(row_from, col_from) -= 1;
    a(row_to, col_to) += 1;
  }
  return std::make_pair(std::move(a), coeff);
}

// ---------------------------------------------------------------- LinearOperator

template <class S>
S LinearOperator<S>::coeff(std::size_t row, std::size_t col) const {
  const auto& c = cols_.at(col);
  auto it = c.find(row);
  return it == c.end() ? S(0) : it->second;
}

template <class S>
void LinearOperator<S>::add(std::size_t row, std::size_t col, const S& value) {
  if (row >= dim() || col >= dim()) throw std::out_of_range("operator entry outside basis");
  if (value == 0) return;
  auto& c = cols_[col];
  auto [it, inserted] = c.emplace(row, value);
  if (!inserted) {
    it->second += value;
    if (it->second == 0) c.erase(it);
  }
}

template <class S>
bool LinearOperator<S>::is_zero() const {
  return std::all_of(cols_.begin(), cols_.end(), [](const Column& c) { return c.empty(); });
}

template <class S>
void LinearOperator<S>::check_same_basis(const LinearOperator& o) const {
  if (!(basis_ == o.basis_ || *basis_ == *o.basis_)) throw std::invalid_argument("operators live on different bases");
}

template <class S>
LinearOperator<S>& LinearOperator<S>::operator+=(const LinearOperator& o) {
  check_same_basis(o);
  for (std::size_t c = 0; c < dim(); ++c)
    for (const auto& [row, v] : o.cols_[c]) add(row, c, v);
  return *this;
}

template <class S>
LinearOperator<S>& LinearOperator<S>::operator-=(const LinearOperator& o) {
  check_same_basis(o);
  for (std::size_t c = 0; c < dim(); ++c)
    for (const auto& [row, v] : o.cols_[c]) add(row, c, S(-v));
  return *this;
}

template <class S>
LinearOperator<S>& LinearOperator<S>::operator*=(const S& s) {
  if (s == 0) {
    for (auto& c : cols_) c.clear();
    return *this;
  }
  for (auto& c : cols_)
    for (auto& entry : c) entry.second *= s;
  return *this;
}

template <class S>
bool LinearOperator<S>::operator==(const LinearOperator& o) const {
  return *basis_ == *o.basis_ && cols_ == o.cols_;
}

template <class S>
LinearOperator<S> LinearOperator<S>::compose(const LinearOperator& b) const {
  check_same_basis(b);
  LinearOperator out(basis_);
  for (std::size_t c = 0; c < dim(); ++c)
    for (const auto& [k, bv] : b.cols_[c])
      for (const auto& [row, av] : cols_[k]) out.add(row, c, S(av * bv));
  return out;
}

template <class S>
Eigen::MatrixXd LinearOperator<S>::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim(), dim());
  for (std::size_t c = 0; c < dim(); ++c)
    for (const auto& [row, v] : cols_[c]) m(row, c) = to_double(v);
  return m;
}

template <class S>
LinearOperator<S> materialize(const BasisPtr& basis, const Expression<S>& expr) {
  LinearOperator<S> out(basis);
  for (std::size_t c = 0; c < basis->size(); ++c) {
    for (const Term<S>& term : expr) {
      if (term.coeff == 0) continue;
      auto image = apply_word(term.word, (*basis)[c]);
      if (!image) continue;
      auto row = basis->index_of(image->first);
      if (!row) throw std::domain_error("operator image leaves the basis; build it on the enclosing degree block");
      out.add(*row, c, S(term.coeff * S(image->second)));
    }
  }
  return out;
}

// ---------------------------------------------------------------- operators

template <class S>
LinearOperator<S> op_E(int i, int j, int a, const BasisPtr& basis) {
  check_range(i, basis->r(), "row");
  check_range(j, basis->r(), "row");
  check_range(a, basis->n(), "factor");
  return materialize<S>(basis, {{S(1), {left(i, j, a)}}});
}

template <class S>
LinearOperator<S> dual_op_E(int i, int j, int b, const BasisPtr& basis) {
  check_range(i, basis->n(), "column");
  check_range(j, basis->n(), "column");
  check_range(b, basis->r(), "factor");
  return materialize<S>(basis, {{S(1), {right(i, j, b)}}});
}

template <class S>
LinearOperator<S> total_E(int i, int j, const BasisPtr& basis) {
  check_range(i, basis->r(), "row");
  check_range(j, basis->r(), "row");
  Expression<S> e;
  for (int a = 1; a <= basis->n(); ++a) e.push_back({S(1), {left(i, j, a)}});
  return materialize<S>(basis, e);
}

template <class S>
LinearOperator<S> omega(int a, int b, const BasisPtr& basis) {
  check_range(a, basis->n(), "factor");
  check_range(b, basis->n(), "factor");
  if (a == b) throw std::invalid_argument("omega needs two distinct factors");
  Expression<S> e;
  for (int i = 1; i <= basis->r(); ++i)
    for (int j = 1; j <= basis->r(); ++j) e.push_back({S(1), {left(i, j, a), left(j, i, b)}});
  return materialize<S>(basis, e);
}

namespace {

template <class S>
void append_kappa(Expression<S>& e, int i, int j, const S& scale, int n) {
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b) {
      e.push_back({S(2 * scale), {left(i, j, a), left(j, i, b)}});
      e.push_back({S(2 * scale), {left(j, i, a), left(i, j, b)}});
    }
}

}  // namespace

template <class S>
LinearOperator<S> kappa(int i, int j, const BasisPtr& basis) {
  check_range(i, basis->r(), "row");
  check_range(j, basis->r(), "row");
  Expression<S> e;
  append_kappa<S>(e, i, j, S(1), basis->n());
  return materialize<S>(basis, e);
}

template <class S>
Expression<S> nabla_expression(int i, std::span<const S> z, std::span<const S> q, int n) {
  const int r = static_cast<int>(q.size());
  check_range(i, r, "row");
  if (static_cast<int>(z.size()) != n) throw std::invalid_argument("z must have one entry per factor");
  Expression<S> e;
  for (int k = 1; k <= n; ++k) e.push_back({z[k - 1], {left(i, i, k)}});
  for (int j = 1; j <= r; ++j) {
    if (j == i) continue;
    append_kappa<S>(e, i, j, inverse_difference(q[i - 1], q[j - 1], "nabla"), n);
  }
  return e;
}

template <class S>
Expression<S> gaudin_expression(int a, std::span<const S> z, std::span<const S> q, int r) {
  const int n = static_cast<int>(z.size());
  check_range(a, n, "factor");
  if (static_cast<int>(q.size()) != r) throw std::invalid_argument("q must have one entry per row");
  Expression<S> e;
  for (int b = 1; b <= n; ++b) {
    if (b == a) continue;
    const S c = inverse_difference(z[a - 1], z[b - 1], "gaudin");
    for (int i = 1; i <= r; ++i)
      for (int j = 1; j <= r; ++j) e.push_back({c, {left(i, j, a), left(j, i, b)}});
  }
  for (int i = 1; i <= r; ++i) e.push_back({S(q[i - 1] / S(4)), {left(i, i, a)}});
  return e;
}

template <class S>
LinearOperator<S> nabla(int i, std::span<const S> z, std::span<const S> q, const BasisPtr& basis) {
  if (static_cast<int>(q.size()) != basis->r()) throw std::invalid_argument("q must have one entry per row");
  return materialize<S>(basis, nabla_expression<S>(i, z, q, basis->n()));
}

template <class S>
LinearOperator<S> gaudin(int a, std::span<const S> z, std::span<const S> q, const BasisPtr& basis) {
  if (static_cast<int>(z.size()) != basis->n()) throw std::invalid_argument("z must have one entry per factor");
  return materialize<S>(basis, gaudin_expression<S>(a, z, q, basis->r()));
}

template <class S>
LinearOperator<S> g_h(std::span<const S> h, std::span<const S> q, const BasisPtr& basis) {
  if (basis->n() != 1) throw std::invalid_argument("g_h acts on a single factor");
  const int r = basis->r();
  if (static_cast<int>(h.size()) != r || static_cast<int>(q.size()) != r)
    throw std::invalid_argument("h and q must have length r");
  Expression<S> e;
  for (int i = 1; i <= r; ++i)
    for (int j = i + 1; j <= r; ++j) {
      const S c = S(S(h[i - 1] - h[j - 1]) * inverse_difference(q[i - 1], q[j - 1], "g_h"));
      e.push_back({c, {left(i, j, 1), left(j, i, 1)}});
    }
  return materialize<S>(basis, e);
}

template <class S>
LinearOperator<S> jm(int a, const BasisPtr& basis) {
  check_range(a, basis->n(), "factor");
  LinearOperator<S> out(basis);
  for (int b = 1; b < a; ++b) out += omega<S>(b, a, basis);
  return out;
}

template <class S>
LinearOperator<S> nested_casimir(int i, int degree, const BasisPtr& basis, Side side, bool diagonal) {
  const int rank = side == Side::GlR ? basis->r() : basis->n();
  const int factors = side == Side::GlR ? basis->n() : basis->r();
  check_range(i, rank, "casimir");
  if (degree < 1 || degree > 3) throw std::invalid_argument("casimir degree must be 1, 2 or 3");
  const int last = diagonal ? factors : 1;
  // Sum of E_{a1 a2} E_{a2 a3} ... E_{ad a1} over indices <= i and factor tuples.
  std::vector<int> idx(static_cast<std::size_t>(degree), 1), fac(static_cast<std::size_t>(degree), 1);
  auto bump = [](std::vector<int>& v, int top) {
    for (auto& x : v) {
      if (++x <= top) return true;
      x = 1;
    }
    return false;
  };
  Expression<S> e;
  do {
    do {
      std::vector<Generator> word;
      for (int p = 0; p < degree; ++p) word.push_back({side, idx[p], idx[(p + 1) % degree], fac[p]});
      e.push_back({S(1), std::move(word)});
    } while (bump(fac, last));
  } while (bump(idx, i));
  return materialize<S>(basis, e);
}

bool is_adjoint_pair(const LinearOperator<Rational>& x, const LinearOperator<Rational>& y) {
  if (!(x.basis() == y.basis())) throw std::invalid_argument("operators live on different bases");
  const auto& basis = x.basis();
  for (std::size_t a = 0; a < x.dim(); ++a)
    for (std::size_t b = 0; b < x.dim(); ++b) {
      // <X x^A, x^B> = X_{BA} N_B and <x^A, Y x^B> = Y_{AB} N_A.
      if (x.coeff(b, a) * basis.norm_squared(b) != y.coeff(a, b) * basis.norm_squared(a)) return false;
    }
  return true;
}

Eigen::MatrixXd to_orthonormal(const LinearOperator<double>& op) {
  const auto& basis = op.basis();
  Eigen::VectorXd s(op.dim());
  for (std::size_t k = 0; k < op.dim(); ++k) s(k) = std::sqrt(basis.norm_squared(k).get_d());
  Eigen::MatrixXd m = op.to_dense();
  return s.asDiagonal() * m * s.cwiseInverse().asDiagonal();
}

void write_coo(std::ostream& os, const LinearOperator<Rational>& op) {
  for (std::size_t c = 0; c < op.dim(); ++c)
    for (const auto& [row, v] : op.column(c))
      os << row << ' ' << c << ' ' << v.get_num() << ' ' << v.get_den() << '\n';
}

long casimir2_eigenvalue(const Partition& lambda, int i) {
  long total = 0;
  for (int j = 1; j <= lambda.length(); ++j) total += static_cast<long>(lambda[j - 1]) * (lambda[j - 1] + i + 1 - 2 * j);
  return total;
}

Rational casimir_eigenvalue(const Partition& lambda, int i, int degree) {
  if (lambda.length() > i) throw std::invalid_argument("partition has more parts than the rank");
  // Perelomov-Popov: sum_k l_k^d prod_{j != k} (1 - 1/(l_k - l_j)), l_k = lambda_k + i - k.
  std::vector<Rational> l;
  for (int k = 1; k <= i; ++k) l.emplace_back(lambda[k - 1] + i - k);
  Rational total = 0;
  for (int k = 0; k < i; ++k) {
    Rational term = 1;
    for (int p = 0; p < degree; ++p) term *= l[k];
    for (int j = 0; j < i; ++j)
      if (j != k) term *= Rational(1) - Rational(1) / (l[k] - l[j]);
    total += term;
  }
  total.canonicalize();
  return total;
}

#define RSKFLOW_INSTANTIATE(S)                                                                      \
  template class LinearOperator<S>;                                                                 \
  template LinearOperator<S> materialize<S>(const BasisPtr&, const Expression<S>&);                 \
  template LinearOperator<S> op_E<S>(int, int, int, const BasisPtr&);                               \
  template LinearOperator<S> dual_op_E<S>(int, int, int, const BasisPtr&);                          \
  template LinearOperator<S> total_E<S>(int, int, const BasisPtr&);                                 \
  template LinearOperator<S> omega<S>(int, int, const BasisPtr&);                                   \
  template LinearOperator<S> kappa<S>(int, int, const BasisPtr&);                                   \
  template LinearOperator<S> nabla<S>(int, std::span<const S>, std::span<const S>, const BasisPtr&); \
  template LinearOperator<S> gaudin<S>(int, std::span<const S>, std::span<const S>, const BasisPtr&); \
  template LinearOperator<S> g_h<S>(std::span<const S>, std::span<const S>, const BasisPtr&);        \
  template LinearOperator<S> jm<S>(int, const BasisPtr&);                                            \
  template LinearOperator<S> nested_casimir<S>(int, int, const BasisPtr&, Side, bool);               \
  template Expression<S> nabla_expression<S>(int, std::span<const S>, std::span<const S>, int);      \
  template Expression<S> gaudin_expression<S>(int, std::span<const S>, std::span<const S>, int);

RSKFLOW_INSTANTIATE(double)
RSKFLOW_INSTANTIATE(Rational)

#undef RSKFLOW_INSTANTIATE

// ---------------------------------------------------------------- exact linear algebra

namespace exact {

Matrix dense(const LinearOperator<Rational>& op) {
  Matrix m(op.dim(), op.dim());
  for (std::size_t c = 0; c < op.dim(); ++c)
    for (const auto& [row, v] : op.column(c)) m(row, c) = v;
  return m;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(Matrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols && row < m.rows; ++col) {
    std::size_t p = row;
    while (p < m.rows && m(p, col) == 0) ++p;
    if (p == m.rows) continue;
    for (std::size_t c = 0; c < m.cols; ++c) std::swap(m(p, c), m(row, c));
    const Rational inv = 1 / m(row, col);
    for (std::size_t c = 0; c < m.cols; ++c) m(row, c) *= inv;
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (r == row || m(r, col) == 0) continue;
      const Rational f = m(r, col);
      for (std::size_t c = 0; c < m.cols; ++c) m(r, c) -= f * m(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

// Closest p/q with q <= max_den, if within tol.
std::optional<Rational> rational_guess(double x, long max_den, double tol) {
  double frac = x;
  mpz_class h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  for (int iter = 0; iter < 40; ++iter) {
    const double a = std::floor(frac);
    const mpz_class ai(static_cast<long>(a));
    mpz_class h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1, h1 = h2, k0 = k1, k1 = k2;
    if (std::abs(x - mpq_class(h1, k1).get_d()) < tol) {
      Rational out(h1, k1);
      out.canonicalize();
      return out;
    }
    const double rem = frac - a;
    if (rem < 1e-15) break;
    frac = 1 / rem;
  }
  return std::nullopt;
}

Matrix stack(const Matrix& top, const Matrix& bottom) {
  if (top.rows == 0) return bottom;
  Matrix out(top.rows + bottom.rows, top.cols);
  std::copy(top.data.begin(), top.data.end(), out.data.begin());
  std::copy(bottom.data.begin(), bottom.data.end(), out.data.begin() + static_cast<long>(top.data.size()));
  return out;
}

}  // namespace

std::size_t rank(Matrix m) { return rref(m).size(); }

Matrix nullspace(const Matrix& m) {
  Matrix red = m;
  const auto pivots = rref(red);
  std::vector<bool> is_pivot(m.cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < m.cols; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  Matrix out(m.cols, free_cols.size());
  for (std::size_t f = 0; f < free_cols.size(); ++f) {
    out(free_cols[f], f) = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) out(pivots[r], f) = -red(r, free_cols[f]);
  }
  return out;
}

bool same_column_span(const Matrix& u, const Matrix& v) {
  if (u.rows != v.rows) return false;
  Matrix both(u.rows, u.cols + v.cols);
  for (std::size_t i = 0; i < u.rows; ++i) {
    for (std::size_t c = 0; c < u.cols; ++c) both(i, c) = u(i, c);
    for (std::size_t c = 0; c < v.cols; ++c) both(i, u.cols + c) = v(i, c);
  }
  const std::size_t ru = rank(u);
  return ru == rank(v) && ru == rank(both);
}

std::vector<Eigenspace> joint_eigenspaces(std::span<const LinearOperator<Rational>> ops) {
  if (ops.empty()) throw std::invalid_argument("need at least one operator");
  const std::size_t d = ops.front().dim();
  struct Piece {
    std::vector<Rational> values;
    Matrix equations;
  };
  std::vector<Piece> pieces{{{}, Matrix(0, d)}};
  for (const auto& op : ops) {
    const Matrix m = dense(op);
    Eigen::EigenSolver<Eigen::MatrixXd> es(op.to_dense(), false);
    std::vector<Rational> candidates;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      auto guess = rational_guess(es.eigenvalues()(k).real(), 10000, 1e-7);
      if (guess && std::find(candidates.begin(), candidates.end(), *guess) == candidates.end())
        candidates.push_back(*guess);
    }
    std::vector<Piece> next;
    for (const Piece& piece : pieces) {
      for (const Rational& c : candidates) {
        Matrix shifted = m;
        for (std::size_t k = 0; k < d; ++k) shifted(k, k) -= c;
        Matrix eq = stack(piece.equations, shifted);
        if (nullspace(eq).cols == 0) continue;
        auto values = piece.values;
        values.push_back(c);
        next.push_back({std::move(values), std::move(eq)});
      }
    }
    pieces = std::move(next);
  }
  std::vector<Eigenspace> out;
  std::size_t total = 0;
  for (const Piece& piece : pieces) {
    Eigenspace es{piece.values, nullspace(piece.equations)};
    total += es.basis.cols;
    out.push_back(std::move(es));
  }
  if (total != d) throw std::runtime_error("joint eigenspaces do not span the space");
  return out;
}

bool same_decomposition(const std::vector<Eigenspace>& a, const std::vector<Eigenspace>& b) {
  if (a.size() != b.size()) return false;
  for (const auto& x : a) {
    bool found = false;
    for (const auto& y : b)
      if (x.basis.cols == y.basis.cols && same_column_span(x.basis, y.basis)) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

}  // namespace exact

}  // namespace rskflow::lie
