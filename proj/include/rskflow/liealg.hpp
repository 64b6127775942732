#pragma once

#include <gmpxx.h>

#include <Eigen/Dense>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "rskflow/combinatorics.hpp"

namespace rskflow::lie {

using Rational = mpq_class;

class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Monomials x^A of C[Mat_{r x n}] with column sums k, optionally with fixed row sums.
class WeightSpaceBasis {
 public:
  WeightSpaceBasis(int r, int n, std::vector<int> k, std::optional<std::vector<int>> weight = std::nullopt);

  int r() const { return r_; }
  int n() const { return n_; }
  const std::vector<int>& degrees() const { return k_; }
  const std::optional<std::vector<int>>& weight() const { return weight_; }

  std::size_t size() const { return monomials_.size(); }
  const NatMatrix& operator[](std::size_t idx) const { return monomials_[idx]; }
  const std::vector<NatMatrix>& monomials() const { return monomials_; }
  std::optional<std::size_t> index_of(const NatMatrix& a) const;

  // prod_{ia} A_{ia}!, the squared norm of x^A.
  const Rational& norm_squared(std::size_t idx) const { return norms_[idx]; }
  WeightSpaceBasis enclosing_degree_block() const;

  bool operator==(const WeightSpaceBasis& o) const {
    return r_ == o.r_ && n_ == o.n_ && k_ == o.k_ && weight_ == o.weight_;
  }

 private:
  int r_, n_;
  std::vector<int> k_;
  std::optional<std::vector<int>> weight_;
  std::vector<NatMatrix> monomials_;
  std::vector<Rational> norms_;
  std::map<std::vector<int>, std::size_t> index_;
};

using BasisPtr = std::shared_ptr<const WeightSpaceBasis>;

BasisPtr basis_for(int r, int n, std::vector<int> k, std::optional<std::vector<int>> weight = std::nullopt);

// GlR: E_ij acts on column `factor` (x_{i,f} d/dx_{j,f}). GlN: acts on row `factor` (x_{f,i} d/dx_{f,j}).
enum class Side { GlR, GlN };

struct Generator {
  Side side;
  int i, j, factor;  // 1-based
};

template <class S>
struct Term {
  S coeff;
  std::vector<Generator> word;  // rightmost letter acts first
};

template <class S>
using Expression = std::vector<Term<S>>;

// Word applied to one monomial: a single monomial times an integer, or zero.
std::optional<std::pair<NatMatrix, long>> apply_word(std::span<const Generator> word, NatMatrix a);

template <class S>
class LinearOperator {
 public:
  using Column = std::map<std::size_t, S>;

  explicit LinearOperator(BasisPtr basis) : basis_(std::move(basis)), cols_(basis_->size()) {}

  const WeightSpaceBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  std::size_t dim() const { return cols_.size(); }

  S coeff(std::size_t row, std::size_t col) const;
  void add(std::size_t row, std::size_t col, const S& value);
  const Column& column(std::size_t col) const { return cols_[col]; }

  bool is_zero() const;
  LinearOperator& operator+=(const LinearOperator& o);
  LinearOperator& operator-=(const LinearOperator& o);
  LinearOperator& operator*=(const S& s);
  friend LinearOperator operator+(LinearOperator a, const LinearOperator& b) { return a += b; }
  friend LinearOperator operator-(LinearOperator a, const LinearOperator& b) { return a -= b; }
  friend LinearOperator operator*(const S& s, LinearOperator a) { return a *= s; }
  // Composition: (a * b) x = a(b(x)).
  friend LinearOperator operator*(const LinearOperator& a, const LinearOperator& b) { return a.compose(b); }
  bool operator==(const LinearOperator& o) const;

  Eigen::MatrixXd to_dense() const;

 private:
  LinearOperator compose(const LinearOperator& b) const;
  void check_same_basis(const LinearOperator& o) const;

  BasisPtr basis_;
  std::vector<Column> cols_;
};

template <class S>
LinearOperator<S> materialize(const BasisPtr& basis, const Expression<S>& expr);

// Generators and the operators built from them. All indices are 1-based.
template <class S>
LinearOperator<S> op_E(int i, int j, int a, const BasisPtr& basis);
template <class S>
LinearOperator<S> dual_op_E(int i, int j, int b, const BasisPtr& basis);
// Delta^n E_ij, summed over all columns.
template <class S>
LinearOperator<S> total_E(int i, int j, const BasisPtr& basis);
template <class S>
LinearOperator<S> omega(int a, int b, const BasisPtr& basis);
// kappa_ij = 2 (E_ij E_ji + E_ji E_ij) through Delta^n.
template <class S>
LinearOperator<S> kappa(int i, int j, const BasisPtr& basis);
template <class S>
LinearOperator<S> nabla(int i, std::span<const S> z, std::span<const S> q, const BasisPtr& basis);
// sum_{b != a} Omega^{ab}/(z_a - z_b) + (1/4) sum_i q_i E_ii^{(a)}.
template <class S>
LinearOperator<S> gaudin(int a, std::span<const S> z, std::span<const S> q, const BasisPtr& basis);
template <class S>
LinearOperator<S> g_h(std::span<const S> h, std::span<const S> q, const BasisPtr& basis);
template <class S>
LinearOperator<S> jm(int a, const BasisPtr& basis);
// C_i^{(d)}, d <= 3, over the top-left gl_i of gl_r (GlR) or gl_n (GlN); diagonal sums over all factors.
template <class S>
LinearOperator<S> nested_casimir(int i, int degree, const BasisPtr& basis, Side side = Side::GlR,
                                 bool diagonal = true);

template <class S>
Expression<S> nabla_expression(int i, std::span<const S> z, std::span<const S> q, int n);
template <class S>
Expression<S> gaudin_expression(int a, std::span<const S> z, std::span<const S> q, int r);

template <class S>
LinearOperator<S> commutator(const LinearOperator<S>& x, const LinearOperator<S>& y) {
  return x * y - y * x;
}

// <X u, v> = <u, Y v> for all monomials u, v under <x^A, x^B> = delta_AB prod A!.
bool is_adjoint_pair(const LinearOperator<Rational>& x, const LinearOperator<Rational>& y);

// Matrix in the orthonormal basis x^A / sqrt(prod A!); symmetric for self-adjoint operators.
Eigen::MatrixXd to_orthonormal(const LinearOperator<double>& op);

// Coordinate list, one "row col numerator denominator" line per nonzero (0-based indices).
void write_coo(std::ostream& os, const LinearOperator<Rational>& op);

// Eigenvalue of C_i^{(2)} on the gl_i module V_lambda.
long casimir2_eigenvalue(const Partition& lambda, int i);
// Eigenvalue of C_i^{(d)} = sum E_{a1 a2} ... E_{ad a1} on V_lambda.
Rational casimir_eigenvalue(const Partition& lambda, int i, int degree);

namespace exact {

// Dense rational matrix, row-major.
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<Rational> data;
  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}
  Rational& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

Matrix dense(const LinearOperator<Rational>& op);
std::size_t rank(Matrix m);
// Columns form a basis of the kernel.
Matrix nullspace(const Matrix& m);
bool same_column_span(const Matrix& u, const Matrix& v);

struct Eigenspace {
  std::vector<Rational> values;  // one per operator
  Matrix basis;                  // columns
};

// Joint eigenspaces of commuting operators with rational spectra; throws if they do not fill the space.
std::vector<Eigenspace> joint_eigenspaces(std::span<const LinearOperator<Rational>> ops);
bool same_decomposition(const std::vector<Eigenspace>& a, const std::vector<Eigenspace>& b);

}  // namespace exact

}  // namespace rskflow::lie
