#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "rskflow/combinatorics.hpp"
#include "rskflow/spectralflow.hpp"

namespace rskflow::cm {

using Complex = std::complex<double>;

struct CMPoint {
  Eigen::MatrixXcd Z;
  Eigen::MatrixXcd Y;
};

// Z = diag(z), Y_ii = p_i, Y_ij = 1/(z_i - z_j). Throws lie::PoleError on repeated z.
CMPoint cm_point(std::span<const double> z, std::span<const double> p);

// Ratio of the second to the first singular value of [Z, Y] + Id.
double rank_one_defect(const CMPoint& pt);

struct Upsilon {
  std::vector<Complex> z;  // sorted by (real, imag)
  std::vector<Complex> y;
};
Upsilon upsilon(const CMPoint& pt);

// Weight vector e_{w(1)} x ... x e_{w(n)} attached to w, i.e. w.matrix(). The transposed convention
// A_ij = delta_{j, w(i)} labels the same vector by w^{-1}.
NatMatrix weight_vector(const Permutation& w);
Permutation label_of(const NatMatrix& a);
// diag(q_{w(1)}, ..., q_{w(n)}): the s -> infinity limit of Y on the sheet labelled w.
std::vector<double> limit_diagonal(const Permutation& w, std::span<const double> q);

// The fibre point of Upsilon over ([s z], [q]) on the sheet labelled w, by Newton from limit_diagonal.
std::vector<double> fibre_point(std::span<const double> z, std::span<const double> q, const Permutation& w,
                                double s);

// CM triples (t, (1-t) z, q) and (t, z, (1-t) q) from t_begin = 1/(1+1e6) to t_end = 1/(1+1e-6).
flow::PathSpec gamma_path(std::vector<double> z, std::vector<double> q);
flow::PathSpec lambda_path(std::vector<double> z, std::vector<double> q);

struct CmTriple {
  double t;
  std::vector<double> z;
  std::vector<double> q;
};
// The point (t, (1-t) z, q) of gamma or (t, z, (1-t) q) of lambda.
CmTriple cm_triple(const flow::PathSpec& path, double t);

enum class CellKind { Right, Left, TwoSided };
std::string to_string(CellKind k);
CellKind parse_cell_kind(const std::string& s);

struct CellPartition {
  int n = 0;
  CellKind kind = CellKind::Right;
  std::vector<std::vector<Permutation>> blocks;  // each sorted; blocks sorted by first element

  std::vector<std::size_t> sizes() const;  // in block order
  bool operator==(const CellPartition& o) const { return n == o.n && blocks == o.blocks; }
};

CellPartition make_partition(int n, CellKind kind, std::vector<std::vector<Permutation>> blocks);

struct CellOptions {
  std::vector<double> z;  // empty: defaults
  std::vector<double> q;
  std::uint64_t seed = 1;
  int steps_per_decade = 16;
  // Ray follows gamma; the collision variants send z to 0 along the collision path instead.
  flow::ZPath z_path = flow::ZPath::Ray;
  flow::TrackOptions track;
  flow::ClusterOptions cluster;
};

struct CellResult {
  CellPartition partition;
  std::vector<Permutation> labels;  // label of each branch
  std::vector<std::vector<double>> endpoint;
  std::size_t expected_classes = 0;  // standard tableaux of size n; partitions of n when two-sided
  flow::Diagnostics diagnostics;
};

CellResult right_cells(int n, const CellOptions& opts);
CellResult left_cells(int n, const CellOptions& opts);
// Join of the left and right partitions.
CellResult two_sided_cells(int n, const CellOptions& opts);
CellResult compute_cells(int n, CellKind kind, const CellOptions& opts);

// Partition of S_n by P-symbol (right), Q-symbol (left) or shape (two-sided), n <= 7.
CellPartition kl_reference_cells(int n, CellKind kind);

}  // namespace rskflow::cm
