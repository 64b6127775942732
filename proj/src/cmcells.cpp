#include "rskflow/cmcells.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "rskflow/liealg.hpp"

namespace rskflow::cm {

namespace {

bool complex_less(const Complex& a, const Complex& b) {
  return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
}

std::vector<Complex> sorted_eigenvalues(const Eigen::MatrixXcd& m) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  std::vector<Complex> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(v.begin(), v.end(), complex_less);
  return v;
}

Eigen::MatrixXd real_y(std::span<const double> z, std::span<const double> p, double s) {
  const auto n = static_cast<Eigen::Index>(z.size());
  Eigen::MatrixXd y(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) y(i, j) = i == j ? p[i] : 1.0 / (s * (z[i] - z[j]));
  return y;
}

// Power sums tr(Y^k) - sum q^k, k = 1..n, and their gradients k (Y^{k-1})_{ii}.
std::vector<double> newton_solve(std::span<const double> z, std::span<const double> q, std::vector<double> p,
                                 double s) {
  const auto n = static_cast<Eigen::Index>(z.size());
  for (int it = 0; it < 60; ++it) {
    const Eigen::MatrixXd y = real_y(z, p, s);
    Eigen::VectorXd f(n);
    Eigen::MatrixXd jac(n, n);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
      for (Eigen::Index i = 0; i < n; ++i) jac(k - 1, i) = static_cast<double>(k) * power(i, i);
      power = power * y;
      double target = 0.0;
      for (double x : q) target += std::pow(x, static_cast<double>(k));
      f(k - 1) = power.trace() - target;
    }
    const Eigen::VectorXd step = jac.fullPivLu().solve(f);
    for (Eigen::Index i = 0; i < n; ++i) p[i] -= step(i);
    if (step.lpNorm<Eigen::Infinity>() < 1e-15 * std::max(1.0, Eigen::Map<const Eigen::VectorXd>(p.data(), n).lpNorm<Eigen::Infinity>()))
      break;
  }
  return p;
}

std::vector<double> defaults_or(const std::vector<double>& v, std::vector<double> fallback) {
  return v.empty() ? fallback : v;
}

CellPartition from_classes(int n, CellKind kind, const std::vector<std::vector<std::size_t>>& classes,
                           const std::vector<Permutation>& labels) {
  std::vector<std::vector<Permutation>> blocks;
  for (const auto& cls : classes) {
    std::vector<Permutation> b;
    for (auto idx : cls) b.push_back(labels[idx]);
    blocks.push_back(std::move(b));
  }
  return make_partition(n, kind, std::move(blocks));
}

std::size_t count_syt(int n) {
  std::size_t total = 0;
  for (const auto& lam : partitions_of(n)) total += static_cast<std::size_t>(count_standard(lam));
  return total;
}

enum class Endpoint { Nabla, Gaudin };

CellResult run_cells(int n, CellKind kind, flow::PathSpec path, Endpoint endpoint, const CellOptions& opts) {
  if (n < 1) throw std::invalid_argument("cells: n must be positive");
  const std::vector<int> ones(static_cast<std::size_t>(n), 1);
  const flow::BlockOperators ops(lie::basis_for(n, n, ones, ones));
  path.steps_per_decade = opts.steps_per_decade;

  CellResult res;
  res.expected_classes = count_syt(n);
  for (const auto& a : ops.basis().monomials()) res.labels.push_back(label_of(a));

  flow::Transport tr;
  for (std::uint64_t attempt = 0;; ++attempt) {
    try {
      const auto comb = flow::draw_combination(static_cast<std::size_t>(2 * n), opts.seed + attempt);
      flow::PathSpec p = path;
      flow::labels_at_infinity(ops, p, comb);
      tr = flow::continue_branches(ops, p, Eigen::MatrixXd::Identity(ops.dim(), ops.dim()), comb, opts.track);
      break;
    } catch (const flow::DegenerateSpectrum&) {
      if (attempt >= 2) throw;
    }
  }
  res.diagnostics = tr.diagnostics;

  res.endpoint.assign(static_cast<std::size_t>(ops.dim()), std::vector<double>(static_cast<std::size_t>(n)));
  for (int i = 1; i <= n; ++i) {
    const Eigen::MatrixXd op = endpoint == Endpoint::Nabla ? ops.nabla_limit(i, path.base_q)
                                                           : ops.gaudin_limit(i, path.base_z);
    const auto rq = flow::rayleigh_quotients(op, tr.vectors);
    const Eigen::VectorXd spec = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(op, Eigen::EigenvaluesOnly).eigenvalues();
    for (std::size_t b = 0; b < rq.size(); ++b) {
      res.endpoint[b][i - 1] = rq[b];
      res.diagnostics.endpoint_deviation =
          std::max(res.diagnostics.endpoint_deviation, (spec.array() - rq[b]).abs().minCoeff());
    }
  }
  res.partition = from_classes(n, kind, flow::coalescence_classes(res.endpoint, opts.cluster), res.labels);
  return res;
}

}  // namespace

CMPoint cm_point(std::span<const double> z, std::span<const double> p) {
  if (z.size() != p.size()) throw std::invalid_argument("cm_point: z and p differ in length");
  const auto n = static_cast<Eigen::Index>(z.size());
  CMPoint pt{Eigen::MatrixXcd::Zero(n, n), Eigen::MatrixXcd::Zero(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    pt.Z(i, i) = z[i];
    pt.Y(i, i) = p[i];
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      if (z[i] == z[j]) throw lie::PoleError("cm_point: repeated z entries");
      pt.Y(i, j) = 1.0 / (z[i] - z[j]);
    }
  }
  return pt;
}

double rank_one_defect(const CMPoint& pt) {
  const Eigen::Index n = pt.Z.rows();
  const Eigen::MatrixXcd m = pt.Z * pt.Y - pt.Y * pt.Z + Eigen::MatrixXcd::Identity(n, n);
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues();
  if (sv.size() < 2) return 0.0;
  return sv(1) / sv(0);
}

Upsilon upsilon(const CMPoint& pt) { return {sorted_eigenvalues(pt.Z), sorted_eigenvalues(pt.Y)}; }

NatMatrix weight_vector(const Permutation& w) { return w.matrix(); }

Permutation label_of(const NatMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("label_of: not a square matrix");
  std::vector<int> line(static_cast<std::size_t>(a.cols()), 0);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      if (a(i, j) == 0) continue;
      if (a(i, j) != 1 || line[j] != 0) throw std::invalid_argument("label_of: not a permutation matrix");
      line[j] = i + 1;
    }
  return Permutation(line);
}

std::vector<double> limit_diagonal(const Permutation& w, std::span<const double> q) {
  std::vector<double> p;
  for (int a = 1; a <= w.size(); ++a) p.push_back(q[w(a) - 1]);
  return p;
}

std::vector<double> fibre_point(std::span<const double> z, std::span<const double> q, const Permutation& w,
                                double s) {
  if (z.size() != q.size() || static_cast<int>(z.size()) != w.size())
    throw std::invalid_argument("fibre_point: size mismatch");
  std::vector<double> p = limit_diagonal(w, q);
  // Continue from the degenerate end when s is not already large.
  double cur = std::max(s, 1e6);
  while (true) {
    p = newton_solve(z, q, p, cur);
    if (cur == s) break;
    cur = std::max(s, cur / std::sqrt(10.0));
  }
  return p;
}

flow::PathSpec gamma_path(std::vector<double> z, std::vector<double> q) {
  flow::PathSpec p;
  p.kind = flow::PathKind::CmGamma;
  p.base_z = std::move(z);
  p.base_q = std::move(q);
  p.t_begin = 1.0 / (1.0 + 1e6);
  p.t_end = 1.0 / (1.0 + 1e-6);
  return p;
}

flow::PathSpec lambda_path(std::vector<double> z, std::vector<double> q) {
  flow::PathSpec p = gamma_path(std::move(z), std::move(q));
  p.kind = flow::PathKind::CmLambda;
  return p;
}

CmTriple cm_triple(const flow::PathSpec& path, double t) {
  CmTriple out{t, path.base_z, path.base_q};
  if (path.kind == flow::PathKind::CmGamma)
    for (auto& x : out.z) x *= 1.0 - t;
  else if (path.kind == flow::PathKind::CmLambda)
    for (auto& x : out.q) x *= 1.0 - t;
  else
    throw std::invalid_argument("cm_triple: not a CM path");
  return out;
}

std::string to_string(CellKind k) {
  switch (k) {
    case CellKind::Right: return "right";
    case CellKind::Left: return "left";
    case CellKind::TwoSided: return "two-sided";
  }
  return "unknown";
}

CellKind parse_cell_kind(const std::string& s) {
  if (s == "right") return CellKind::Right;
  if (s == "left") return CellKind::Left;
  if (s == "two-sided") return CellKind::TwoSided;
  throw std::invalid_argument("unknown cell kind '" + s + "'");
}

std::vector<std::size_t> CellPartition::sizes() const {
  std::vector<std::size_t> out;
  for (const auto& b : blocks) out.push_back(b.size());
  return out;
}

CellPartition make_partition(int n, CellKind kind, std::vector<std::vector<Permutation>> blocks) {
  std::size_t total = 0;
  for (auto& b : blocks) {
    std::sort(b.begin(), b.end());
    total += b.size();
  }
  std::sort(blocks.begin(), blocks.end());
  std::size_t fact = 1;
  for (int k = 2; k <= n; ++k) fact *= static_cast<std::size_t>(k);
  std::vector<Permutation> all;
  for (const auto& b : blocks) all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  if (total != fact || std::adjacent_find(all.begin(), all.end()) != all.end())
    throw std::invalid_argument("cell blocks do not partition S_n");
  return {n, kind, std::move(blocks)};
}

CellResult right_cells(int n, const CellOptions& opts) {
  const auto z = defaults_or(opts.z, flow::default_z(n)), q = defaults_or(opts.q, flow::default_q(n));
  flow::PathSpec path;
  if (opts.z_path == flow::ZPath::Ray) {
    path = gamma_path(z, q);
  } else {
    path = flow::collision_path(n, z, q, opts.z_path == flow::ZPath::CollisionUnit);
  }
  return run_cells(n, CellKind::Right, path, Endpoint::Nabla, opts);
}

CellResult left_cells(int n, const CellOptions& opts) {
  const auto z = defaults_or(opts.z, flow::default_z(n)), q = defaults_or(opts.q, flow::default_q(n));
  return run_cells(n, CellKind::Left, lambda_path(z, q), Endpoint::Gaudin, opts);
}

CellResult two_sided_cells(int n, const CellOptions& opts) {
  const CellResult right = right_cells(n, opts), left = left_cells(n, opts);
  std::map<Permutation, Permutation> parent;
  for (const auto& w : right.labels) parent[w] = w;
  auto find = [&](Permutation x) {
    while (!(parent.at(x) == x)) x = parent.at(x);
    return x;
  };
  for (const auto* part : {&right.partition, &left.partition})
    for (const auto& block : part->blocks)
      for (const auto& w : block) parent[find(w)] = find(block.front());
  std::map<Permutation, std::vector<Permutation>> groups;
  for (const auto& w : right.labels) groups[find(w)].push_back(w);
  std::vector<std::vector<Permutation>> blocks;
  for (auto& [root, members] : groups) blocks.push_back(std::move(members));

  CellResult res;
  res.partition = make_partition(n, CellKind::TwoSided, std::move(blocks));
  res.labels = right.labels;
  res.endpoint = right.endpoint;
  res.expected_classes = partitions_of(n).size();
  res.diagnostics = right.diagnostics;
  res.diagnostics.merge(left.diagnostics);
  return res;
}

CellResult compute_cells(int n, CellKind kind, const CellOptions& opts) {
  switch (kind) {
    case CellKind::Right: return right_cells(n, opts);
    case CellKind::Left: return left_cells(n, opts);
    case CellKind::TwoSided: return two_sided_cells(n, opts);
  }
  throw std::invalid_argument("unknown cell kind");
}

CellPartition kl_reference_cells(int n, CellKind kind) {
  if (n < 1 || n > 7) throw std::invalid_argument("kl_reference_cells: need 1 <= n <= 7");
  std::map<std::string, std::vector<Permutation>> groups;
  for (const auto& w : Permutation::all(n)) {
    const RskPair pq = rs_permutation(w);
    const std::string key = kind == CellKind::Right  ? pq.P.to_string()
                            : kind == CellKind::Left ? pq.Q.to_string()
                                                     : pq.P.shape().to_string();
    groups[key].push_back(w);
  }
  std::vector<std::vector<Permutation>> blocks;
  for (auto& [key, members] : groups) blocks.push_back(std::move(members));
  return make_partition(n, kind, std::move(blocks));
}

}  // namespace rskflow::cm
