#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rskflow/combinatorics.hpp"
#include "rskflow/liealg.hpp"

namespace rskflow::flow {

class ContinuationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateSpectrum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DecoderAmbiguity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InconclusiveClustering : public std::runtime_error {
 public:
  InconclusiveClustering(const std::string& what, double suggested_tol)
      : std::runtime_error(what), suggested_tol_(suggested_tol) {}
  double suggested_tol() const { return suggested_tol_; }

 private:
  double suggested_tol_;
};

// Parameter schedules. Full-family kinds evaluate the operators at (z(t), q(t));
// the Gelfand-Tsetlin kinds use the z -> 0 (resp. q -> 0) limit families.
enum class PathKind {
  StraightToZero,   // z(t) = t z
  Collision,        // z_i(t) = c_i t^{n-i+1} (1+t^2)^{i-1}
  QRescale,         // q(t) = t q
  CmGamma,          // CM triple (t, (1-t) z, q): Gaudin side (s z, q), s = (1-t)/t
  CmLambda,         // CM triple (t, z, (1-t) q): Gaudin side (z, s q)
  GelfandTsetlinQ,  // z = 0, q(t) = (q_1 t^{r-1}, ..., q_r); base_z fixes the multiplicity operators
  GelfandTsetlinZ,  // q = 0, z(t) = (z_1 t^{n-1}, ..., z_n)
};

std::string to_string(PathKind kind);

struct PathSpec {
  PathKind kind = PathKind::StraightToZero;
  std::vector<double> base_z;
  std::vector<double> base_q;
  double t_begin = 1e6;
  double t_end = 1e-6;
  int steps_per_decade = 16;
  bool unit_variant = false;  // collision path through (1, 2, 4, ...) instead of base_z

  // Log-uniform grid from t_begin to t_end (uniform in log s for the CM kinds).
  std::vector<double> grid() const;
  double midpoint(double a, double b) const;
  std::vector<double> z_at(double t) const;
  std::vector<double> q_at(double t) const;
  bool full_family() const;
  bool is_cm() const { return kind == PathKind::CmGamma || kind == PathKind::CmLambda; }
};

PathSpec straight_to_zero(std::vector<double> z, std::vector<double> q);
PathSpec collision_path(int n, std::vector<double> base_z, std::vector<double> q, bool unit_variant = false);
PathSpec q_rescale(std::vector<double> z, std::vector<double> q);
PathSpec gt_q_path(std::vector<double> z, std::vector<double> q);
PathSpec gt_z_path(std::vector<double> z, std::vector<double> q);

struct CollisionCheck {
  bool ordered = false;
  bool monotone = false;
  bool limiting = false;
  bool asymptotic = false;
  bool all() const { return ordered && monotone && limiting && asymptotic; }
};

// The four collision-path properties, checked numerically on an extended grid.
CollisionCheck check_collision_properties(const PathSpec& path);

// Dense parameter-independent pieces of the commuting family on one block, in the orthonormal monomial basis.
class BlockOperators {
 public:
  explicit BlockOperators(lie::BasisPtr basis);

  const lie::WeightSpaceBasis& basis() const { return *basis_; }
  const lie::BasisPtr& basis_ptr() const { return basis_; }
  int r() const { return basis_->r(); }
  int n() const { return basis_->n(); }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(basis_->size()); }

  // 1-based indices.
  Eigen::MatrixXd nabla(int i, std::span<const double> z, std::span<const double> q) const;
  Eigen::MatrixXd gaudin(int a, std::span<const double> z, std::span<const double> q) const;
  Eigen::MatrixXd nabla_limit(int i, std::span<const double> q) const;   // nabla_i(0, q)
  Eigen::MatrixXd gaudin_limit(int a, std::span<const double> z) const;  // H_a(z, 0)
  const Eigen::MatrixXd& cartan(int i, int a) const { return cartan_[(i - 1) * n() + (a - 1)]; }
  const Eigen::MatrixXd& casimir(lie::Side side, int i, int degree) const;

  // n Gaudin-type operators followed by r nabla-type operators.
  std::vector<Eigen::MatrixXd> family(const PathSpec& path, double t) const;

 private:
  const Eigen::MatrixXd& kappa(int i, int j) const;
  const Eigen::MatrixXd& omega(int a, int b) const;

  lie::BasisPtr basis_;
  std::vector<Eigen::MatrixXd> cartan_;
  std::map<std::pair<int, int>, Eigen::MatrixXd> kappa_;
  std::map<std::pair<int, int>, Eigen::MatrixXd> omega_;
  std::map<std::tuple<int, int, int>, Eigen::MatrixXd> casimirs_;
};

struct TrackOptions {
  double match_threshold = 0.9;
  double hard_floor = 0.5;
  int max_depth = 30;
  double cluster_tol = 1e-7;  // relative eigenvalue gap treated as a cluster
};

struct Diagnostics {
  std::size_t steps = 0;
  std::size_t refinements = 0;
  std::size_t low_overlap_accepts = 0;
  double min_overlap = 1.0;
  double min_gap = std::numeric_limits<double>::infinity();
  double endpoint_deviation = 0.0;
  void merge(const Diagnostics& o);
};

struct TraceRow {
  std::string stage;
  double t;
  std::size_t branch;
  std::vector<double> values;  // Rayleigh quotients of the family operators
};
using TraceSink = std::function<void(const TraceRow&)>;

struct Combination {
  Eigen::VectorXd primary;
  Eigen::VectorXd secondary;
};

// Dyadic rationals k/1024, nonzero, from a seeded generator.
Combination draw_combination(std::size_t size, std::uint64_t seed);

struct Transport {
  Eigen::MatrixXd vectors;  // column b is branch b
  Diagnostics diagnostics;
};

Transport continue_branches(const BlockOperators& ops, const PathSpec& path, const Eigen::MatrixXd& start,
                            const Combination& comb, const TrackOptions& opts, const TraceSink* sink = nullptr,
                            std::string_view stage = {});

struct InfinityLabels {
  double t_max;
  std::vector<NatMatrix> labels;  // label of branch b; branch b starts as monomial b
};

// Raises path.t_begin until the joint eigenvectors are monomials to within 1e-8 and reads labels off the
// per-factor Cartan eigenvalues.
InfinityLabels labels_at_infinity(const BlockOperators& ops, PathSpec& path, const Combination& comb);

std::vector<double> rayleigh_quotients(const Eigen::MatrixXd& op, const Eigen::MatrixXd& vectors);

struct ClusterOptions {
  double radius = 1e-6;
  double gap_ratio = 1e3;
};

// Groups branches whose endpoint vectors agree within radius (max norm); validates the gap ratio.
std::vector<std::vector<std::size_t>> coalescence_classes(const std::vector<std::vector<double>>& values,
                                                          const ClusterOptions& opts);

// Reads the chain lambda^(1) c ... c lambda^(bound) from nested Casimir values of degrees 1, 2, 3.
Tableau decode_gt_chain(std::span<const double> c1, std::span<const double> c2, std::span<const double> c3,
                        int bound);

enum class ZPath { Ray, CollisionThrough, CollisionUnit };
std::string to_string(ZPath p);

struct FlowConfig {
  std::vector<double> z;  // length n, positive increasing
  std::vector<double> q;  // length r, positive increasing
  std::uint64_t seed = 1;
  int steps_per_decade = 16;
  double t_infinity = 1e6;
  double t_zero = 1e-6;
  double t_gt = 1e-6;
  ZPath z_path = ZPath::Ray;
  int max_attempts = 3;
  TrackOptions track;
  ClusterOptions cluster;
};

std::vector<double> default_z(int n);
std::vector<double> default_q(int r);

// Transport from z = 0 along the q Gelfand-Tsetlin path, then decode on the gl_r side.
std::vector<Tableau> extract_S(const BlockOperators& ops, const Eigen::MatrixXd& at_z_zero,
                               std::span<const double> z_end, std::span<const double> q, const Combination& comb,
                               const FlowConfig& cfg, Diagnostics& diag, const TraceSink* sink = nullptr);
// Transport from q = 0 along the z Gelfand-Tsetlin path, then decode on the gl_n side.
std::vector<Tableau> extract_T(const BlockOperators& ops, const Eigen::MatrixXd& at_q_zero,
                               std::span<const double> z, std::span<const double> q, const Combination& comb,
                               const FlowConfig& cfg, Diagnostics& diag, const TraceSink* sink = nullptr);

struct Branch {
  NatMatrix label;
  std::vector<double> endpoint_eigenvalues;  // nabla_i(0, q) on the transported vector
  Tableau S;
  Tableau T;
};

struct FlowResult {
  std::vector<Branch> branches;
  std::vector<std::vector<std::size_t>> classes;
  Diagnostics diagnostics;
  std::vector<double> q_used;
  int attempts = 1;
};

FlowResult run_block(const lie::BasisPtr& basis, const FlowConfig& cfg, const TraceSink* sink = nullptr);

struct Corpus {
  enum class Kind { EntryBound, ColumnDegrees, Weight };
  Kind kind = Kind::EntryBound;
  int max_entry = 1;
  std::vector<int> k;       // ColumnDegrees, Weight
  std::vector<int> weight;  // Weight
};

struct Mismatch {
  NatMatrix a;
  Tableau S, T, P, Q;
};

struct BlockReport {
  std::vector<int> row_sums, col_sums;
  FlowResult result;
};

struct MainTheoremReport {
  std::size_t cases = 0;
  std::size_t agreements = 0;
  std::vector<Mismatch> mismatches;
  std::vector<std::string> failures;
  std::vector<BlockReport> blocks;
  std::size_t max_dim = 0;
  bool passed() const { return failures.empty() && mismatches.empty() && agreements == cases; }
};

// Blocks (row sums, column sums) covering the corpus, each with the members it must check.
std::vector<std::pair<lie::BasisPtr, std::vector<NatMatrix>>> corpus_blocks(int r, int n, const Corpus& corpus);

// Checks (S, T) = (Q(A), P(A)): the gl_r-side tableau is the recording tableau, content = row sums.
MainTheoremReport verify_main_theorem(int r, int n, const Corpus& corpus, const FlowConfig& cfg,
                                      const TraceSink* sink = nullptr, std::size_t max_dim = 300);

}  // namespace rskflow::flow
