#include "rskflow/spectralflow.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "rskflow/crystals.hpp"

namespace rskflow::flow {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd orthonormal(const lie::LinearOperator<double>& op) {
  MatrixXd m = lie::to_orthonormal(op);
  return 0.5 * (m + m.transpose());
}

double path_var(const PathSpec& p, double t) { return p.is_cm() ? (1.0 - t) / t : t; }
double from_var(const PathSpec& p, double s) { return p.is_cm() ? 1.0 / (1.0 + s) : s; }

std::vector<MatrixXd> normalized(const std::vector<MatrixXd>& fam) {
  std::vector<MatrixXd> out;
  out.reserve(fam.size());
  for (const auto& op : fam) {
    const Eigen::Index m = op.rows();
    MatrixXd x = op - (op.trace() / static_cast<double>(m)) * MatrixXd::Identity(m, m);
    const double nx = x.norm();
    if (nx <= 1e-13 * std::max(1.0, op.norm())) x.setZero();
    else x /= nx;
    out.push_back(std::move(x));
  }
  return out;
}

MatrixXd combine(const std::vector<MatrixXd>& ops, const VectorXd& c) {
  MatrixXd m = MatrixXd::Zero(ops.front().rows(), ops.front().cols());
  for (std::size_t k = 0; k < ops.size(); ++k) m += c(static_cast<Eigen::Index>(k)) * ops[k];
  return 0.5 * (m + m.transpose());
}

struct Decomposition {
  MatrixXd vectors;
  double min_gap = std::numeric_limits<double>::infinity();
  std::size_t refinements = 0;
};

Decomposition decompose(const std::vector<MatrixXd>& fam, const Combination& comb, double cluster_tol) {
  const auto ops = normalized(fam);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(combine(ops, comb.primary));
  Decomposition d;
  d.vectors = es.eigenvectors();
  const VectorXd& vals = es.eigenvalues();
  const Eigen::Index m = vals.size();
  const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 1; k < m; ++k) d.min_gap = std::min(d.min_gap, (vals(k) - vals(k - 1)) / scale);

  MatrixXd second;
  for (Eigen::Index lo = 0; lo < m;) {
    Eigen::Index hi = lo + 1;
    while (hi < m && vals(hi) - vals(hi - 1) < cluster_tol * scale) ++hi;
    if (hi - lo > 1) {
      if (second.size() == 0) second = combine(ops, comb.secondary);
      const MatrixXd block = d.vectors.middleCols(lo, hi - lo);
      Eigen::SelfAdjointEigenSolver<MatrixXd> sub(block.transpose() * second * block);
      const VectorXd& sv = sub.eigenvalues();
      for (Eigen::Index k = 1; k < sv.size(); ++k)
        if (sv(k) - sv(k - 1) < cluster_tol * scale)
          throw DegenerateSpectrum("joint spectrum is degenerate on a cluster of size " +
                                   std::to_string(hi - lo));
      d.vectors.middleCols(lo, hi - lo) = block * sub.eigenvectors();
      ++d.refinements;
    }
    lo = hi;
  }
  return d;
}

// Greedy maximal-overlap assignment; returns the matched vectors in branch order and the worst overlap.
std::pair<MatrixXd, double> match(const MatrixXd& prev, const MatrixXd& next) {
  const Eigen::Index m = prev.cols();
  const MatrixXd ov = prev.transpose() * next;
  std::vector<std::pair<double, Eigen::Index>> cells;
  cells.reserve(static_cast<std::size_t>(m * m));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) cells.emplace_back(-std::abs(ov(i, j)), i * m + j);
  std::sort(cells.begin(), cells.end());
  std::vector<Eigen::Index> target(static_cast<std::size_t>(m), -1);
  std::vector<char> used(static_cast<std::size_t>(m), 0);
  double worst = 1.0;
  Eigen::Index assigned = 0;
  for (const auto& [neg, idx] : cells) {
    const Eigen::Index i = idx / m, j = idx % m;
    if (target[i] >= 0 || used[j]) continue;
    target[i] = j;
    used[j] = 1;
    worst = std::min(worst, -neg);
    if (++assigned == m) break;
  }
  MatrixXd out(prev.rows(), m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.col(i) = next.col(target[i]);
    if (ov(i, target[i]) < 0) out.col(i) *= -1.0;
  }
  return {out, worst};
}

void emit_trace(const BlockOperators& ops, const PathSpec& path, double t, const MatrixXd& v,
                const TraceSink* sink, std::string_view stage) {
  if (!sink || !*sink) return;
  const auto fam = ops.family(path, t);
  for (Eigen::Index b = 0; b < v.cols(); ++b) {
    TraceRow row{std::string(stage), t, static_cast<std::size_t>(b), {}};
    for (const auto& op : fam) row.values.push_back(v.col(b).dot(op * v.col(b)));
    (*sink)(row);
  }
}

class BranchTracker {
 public:
  BranchTracker(const BlockOperators& ops, const PathSpec& path, const Combination& comb, const TrackOptions& opts)
      : ops_(ops), path_(path), comb_(comb), opts_(opts) {}

  MatrixXd advance(const MatrixXd& v, double ta, double tb, int depth) {
    const Decomposition d = decompose(ops_.family(path_, tb), comb_, opts_.cluster_tol);
    auto [next, worst] = match(v, d.vectors);
    if (worst < opts_.match_threshold && depth < opts_.max_depth) {
      const double mid = path_.midpoint(ta, tb);
      return advance(advance(v, ta, mid, depth + 1), mid, tb, depth + 1);
    }
    if (worst < opts_.hard_floor) {
      std::ostringstream os;
      os << to_string(path_.kind) << " path: overlap " << worst << " at t=" << tb << " after " << depth
         << " bisections";
      throw ContinuationFailure(os.str());
    }
    if (worst < opts_.match_threshold) ++diag.low_overlap_accepts;
    ++diag.steps;
    diag.refinements += d.refinements;
    diag.min_overlap = std::min(diag.min_overlap, worst);
    diag.min_gap = std::min(diag.min_gap, d.min_gap);
    return next;
  }

  Diagnostics diag;

 private:
  const BlockOperators& ops_;
  const PathSpec& path_;
  const Combination& comb_;
  const TrackOptions& opts_;
};

double power(double t, int e) { return std::pow(t, static_cast<double>(e)); }

}  // namespace

std::string to_string(PathKind kind) {
  switch (kind) {
    case PathKind::StraightToZero: return "straight";
    case PathKind::Collision: return "collision";
    case PathKind::QRescale: return "q_rescale";
    case PathKind::CmGamma: return "cm_gamma";
    case PathKind::CmLambda: return "cm_lambda";
    case PathKind::GelfandTsetlinQ: return "gt_q";
    case PathKind::GelfandTsetlinZ: return "gt_z";
  }
  return "unknown";
}

std::string to_string(ZPath p) {
  switch (p) {
    case ZPath::Ray: return "ray";
    case ZPath::CollisionThrough: return "collision";
    case ZPath::CollisionUnit: return "collision_unit";
  }
  return "unknown";
}

std::vector<double> PathSpec::grid() const {
  const double u0 = std::log10(path_var(*this, t_begin)), u1 = std::log10(path_var(*this, t_end));
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(u1 - u0) * steps_per_decade)));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(t_begin);
  for (int k = 1; k < steps; ++k) out.push_back(from_var(*this, std::pow(10.0, u0 + (u1 - u0) * k / steps)));
  out.push_back(t_end);
  return out;
}

double PathSpec::midpoint(double a, double b) const {
  return from_var(*this, std::sqrt(path_var(*this, a) * path_var(*this, b)));
}

std::vector<double> PathSpec::z_at(double t) const {
  std::vector<double> z = base_z;
  const int n = static_cast<int>(z.size());
  switch (kind) {
    case PathKind::StraightToZero:
      for (auto& x : z) x *= t;
      break;
    case PathKind::Collision:
      for (int i = 1; i <= n; ++i) {
        const double c = unit_variant ? 1.0 : std::ldexp(base_z[i - 1], 1 - i);
        z[i - 1] = c * power(t, n - i + 1) * power(1.0 + t * t, i - 1);
      }
      break;
    case PathKind::CmGamma:
      for (auto& x : z) x *= (1.0 - t) / t;
      break;
    case PathKind::GelfandTsetlinZ:
      for (int a = 1; a <= n; ++a) z[a - 1] *= power(t, n - a);
      break;
    default:
      break;
  }
  return z;
}

std::vector<double> PathSpec::q_at(double t) const {
  std::vector<double> q = base_q;
  const int r = static_cast<int>(q.size());
  switch (kind) {
    case PathKind::QRescale:
      for (auto& x : q) x *= t;
      break;
    case PathKind::CmLambda:
      for (auto& x : q) x *= (1.0 - t) / t;
      break;
    case PathKind::GelfandTsetlinQ:
      for (int i = 1; i <= r; ++i) q[i - 1] *= power(t, r - i);
      break;
    default:
      break;
  }
  return q;
}

bool PathSpec::full_family() const {
  return kind != PathKind::GelfandTsetlinQ && kind != PathKind::GelfandTsetlinZ;
}

PathSpec straight_to_zero(std::vector<double> z, std::vector<double> q) {
  PathSpec p;
  p.kind = PathKind::StraightToZero;
  p.base_z = std::move(z);
  p.base_q = std::move(q);
  return p;
}

PathSpec collision_path(int n, std::vector<double> base_z, std::vector<double> q, bool unit_variant) {
  if (static_cast<int>(base_z.size()) != n) throw std::invalid_argument("collision path: base point has wrong length");
  PathSpec p = straight_to_zero(std::move(base_z), std::move(q));
  p.kind = PathKind::Collision;
  p.unit_variant = unit_variant;
  return p;
}

PathSpec q_rescale(std::vector<double> z, std::vector<double> q) {
  PathSpec p = straight_to_zero(std::move(z), std::move(q));
  p.kind = PathKind::QRescale;
  p.t_begin = 1.0;
  return p;
}

PathSpec gt_q_path(std::vector<double> z, std::vector<double> q) {
  PathSpec p = q_rescale(std::move(z), std::move(q));
  p.kind = PathKind::GelfandTsetlinQ;
  return p;
}

PathSpec gt_z_path(std::vector<double> z, std::vector<double> q) {
  PathSpec p = q_rescale(std::move(z), std::move(q));
  p.kind = PathKind::GelfandTsetlinZ;
  return p;
}

CollisionCheck check_collision_properties(const PathSpec& path) {
  PathSpec p = path;
  p.t_begin = 1e8;
  p.t_end = 1e-8;
  p.steps_per_decade = 8;
  const auto ts = p.grid();
  const std::size_t n = p.base_z.size();
  CollisionCheck c{true, true, true, true};
  std::vector<double> prev;
  for (double t : ts) {
    const auto z = p.z_at(t);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(z[i] > 0)) c.ordered = false;
      if (i + 1 < n && !(z[i] < z[i + 1])) c.ordered = false;
      // t decreases along the grid, so each coordinate must decrease.
      if (!prev.empty() && !(z[i] < prev[i])) c.monotone = false;
    }
    prev = z;
  }
  const auto lo = p.z_at(1e-8), hi = p.z_at(1e8), lo2 = p.z_at(1e-7), hi2 = p.z_at(1e7);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lo[i] < 1e-7) || !(hi[i] > 1e7)) c.limiting = false;
    if (i + 1 < n) {
      // ratios blow up at 0, gaps blow up at infinity, and both keep growing.
      if (!(lo[i + 1] / lo[i] > 1e6) || !(lo[i + 1] / lo[i] > lo2[i + 1] / lo2[i])) c.asymptotic = false;
      if (!(hi[i + 1] - hi[i] > 1e6) || !(hi[i + 1] - hi[i] > hi2[i + 1] - hi2[i])) c.asymptotic = false;
    }
  }
  return c;
}

BlockOperators::BlockOperators(lie::BasisPtr basis) : basis_(std::move(basis)) {
  const int rr = r(), nn = n();
  for (int i = 1; i <= rr; ++i)
    for (int a = 1; a <= nn; ++a) cartan_.push_back(orthonormal(lie::op_E<double>(i, i, a, basis_)));
  for (int i = 1; i <= rr; ++i)
    for (int j = i + 1; j <= rr; ++j) kappa_[{i, j}] = orthonormal(lie::kappa<double>(i, j, basis_));
  for (int a = 1; a <= nn; ++a)
    for (int b = a + 1; b <= nn; ++b) omega_[{a, b}] = orthonormal(lie::omega<double>(a, b, basis_));
  for (int d = 1; d <= 3; ++d) {
    for (int i = 1; i <= rr; ++i)
      casimirs_[{0, i, d}] = orthonormal(lie::nested_casimir<double>(i, d, basis_, lie::Side::GlR));
    for (int j = 1; j <= nn; ++j)
      casimirs_[{1, j, d}] = orthonormal(lie::nested_casimir<double>(j, d, basis_, lie::Side::GlN));
  }
}

const MatrixXd& BlockOperators::kappa(int i, int j) const { return kappa_.at({std::min(i, j), std::max(i, j)}); }
const MatrixXd& BlockOperators::omega(int a, int b) const { return omega_.at({std::min(a, b), std::max(a, b)}); }

const MatrixXd& BlockOperators::casimir(lie::Side side, int i, int degree) const {
  auto it = casimirs_.find({side == lie::Side::GlR ? 0 : 1, i, degree});
  if (it == casimirs_.end()) throw std::out_of_range("casimir index out of range");
  return it->second;
}

MatrixXd BlockOperators::nabla_limit(int i, std::span<const double> q) const {
  MatrixXd m = MatrixXd::Zero(dim(), dim());
  for (int j = 1; j <= r(); ++j)
    if (j != i) m += kappa(i, j) / (q[i - 1] - q[j - 1]);
  return m;
}

MatrixXd BlockOperators::nabla(int i, std::span<const double> z, std::span<const double> q) const {
  MatrixXd m = nabla_limit(i, q);
  for (int a = 1; a <= n(); ++a) m += z[a - 1] * cartan(i, a);
  return m;
}

MatrixXd BlockOperators::gaudin_limit(int a, std::span<const double> z) const {
  MatrixXd m = MatrixXd::Zero(dim(), dim());
  for (int b = 1; b <= n(); ++b)
    if (b != a) m += omega(a, b) / (z[a - 1] - z[b - 1]);
  return m;
}

MatrixXd BlockOperators::gaudin(int a, std::span<const double> z, std::span<const double> q) const {
  MatrixXd m = gaudin_limit(a, z);
  for (int i = 1; i <= r(); ++i) m += (q[i - 1] / 4.0) * cartan(i, a);
  return m;
}

// TODO: add the cubic Gaudin-type Hamiltonians; the quadratic family alone is degenerate on the 3x3 blocks
// with margins (2,2,2) and (3,3,3) part way along the ray.
std::vector<MatrixXd> BlockOperators::family(const PathSpec& path, double t) const {
  const auto z = path.z_at(t), q = path.q_at(t);
  std::vector<MatrixXd> out;
  out.reserve(static_cast<std::size_t>(n() + r()));
  for (int a = 1; a <= n(); ++a) out.push_back(path.full_family() ? gaudin(a, z, q) : gaudin_limit(a, z));
  for (int i = 1; i <= r(); ++i) out.push_back(path.full_family() ? nabla(i, z, q) : nabla_limit(i, q));
  return out;
}

void Diagnostics::merge(const Diagnostics& o) {
  steps += o.steps;
  refinements += o.refinements;
  low_overlap_accepts += o.low_overlap_accepts;
  min_overlap = std::min(min_overlap, o.min_overlap);
  min_gap = std::min(min_gap, o.min_gap);
  endpoint_deviation = std::max(endpoint_deviation, o.endpoint_deviation);
}

Combination draw_combination(std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-1024, 1024);
  auto draw = [&] {
    VectorXd v(static_cast<Eigen::Index>(size));
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      int x = 0;
      while (x == 0) x = num(rng);
      v(k) = x / 1024.0;
    }
    return v;
  };
  Combination c;
  c.primary = draw();
  c.secondary = draw();
  return c;
}

Transport continue_branches(const BlockOperators& ops, const PathSpec& path, const MatrixXd& start,
                            const Combination& comb, const TrackOptions& opts, const TraceSink* sink,
                            std::string_view stage) {
  if (start.rows() != ops.dim() || start.cols() != ops.dim())
    throw std::invalid_argument("start vectors do not match the block dimension");
  Transport out{start, {}};
  if (ops.dim() == 0) return out;
  BranchTracker tracker(ops, path, comb, opts);
  const auto ts = path.grid();
  std::size_t k = 0;
  try {
    out.vectors = tracker.advance(start, ts.front(), ts.front(), 0);
    emit_trace(ops, path, ts.front(), out.vectors, sink, stage);
    for (k = 1; k < ts.size(); ++k) {
      out.vectors = tracker.advance(out.vectors, ts[k - 1], ts[k], 0);
      emit_trace(ops, path, ts[k], out.vectors, sink, stage);
    }
  } catch (const DegenerateSpectrum& e) {
    std::ostringstream os;
    os << e.what() << " (" << to_string(path.kind) << " path near t=" << ts[std::min(k, ts.size() - 1)] << ")";
    throw DegenerateSpectrum(os.str());
  }
  out.diagnostics = tracker.diag;
  return out;
}

std::vector<double> rayleigh_quotients(const MatrixXd& op, const MatrixXd& vectors) {
  const MatrixXd image = op * vectors;
  std::vector<double> out(static_cast<std::size_t>(vectors.cols()));
  for (Eigen::Index b = 0; b < vectors.cols(); ++b) out[b] = vectors.col(b).dot(image.col(b));
  return out;
}

InfinityLabels labels_at_infinity(const BlockOperators& ops, PathSpec& path, const Combination& comb) {
  const auto& basis = ops.basis();
  const Eigen::Index m = ops.dim();
  double t = path.t_begin;
  for (int attempt = 0;; ++attempt) {
    const Decomposition d = decompose(ops.family(path, t), comb, 1e-7);
    double mixing = 0.0;
    std::vector<Eigen::Index> arg(static_cast<std::size_t>(m));
    for (Eigen::Index b = 0; b < m; ++b) {
      d.vectors.col(b).cwiseAbs().maxCoeff(&arg[b]);
      const double off = d.vectors.col(b).squaredNorm() - d.vectors(arg[b], b) * d.vectors(arg[b], b);
      mixing = std::max(mixing, std::sqrt(std::max(0.0, off)));
    }
    if (mixing < 1e-8) {
      std::vector<char> seen(static_cast<std::size_t>(m), 0);
      for (Eigen::Index b = 0; b < m; ++b) {
        NatMatrix label(ops.r(), ops.n());
        for (int i = 1; i <= ops.r(); ++i)
          for (int a = 1; a <= ops.n(); ++a) {
            const double v = d.vectors.col(b).dot(ops.cartan(i, a) * d.vectors.col(b));
            label(i - 1, a - 1) = static_cast<int>(std::lround(v));
          }
        if (!(label == basis[arg[b]]) || seen[arg[b]])
          throw ContinuationFailure("eigenvector at infinity does not match its Cartan label");
        seen[arg[b]] = 1;
      }
      path.t_begin = t;
      return {t, basis.monomials()};
    }
    if (attempt == 12) throw ContinuationFailure("no monomial regime found near infinity");
    t = from_var(path, path_var(path, t) * 10.0);
  }
}

std::vector<std::vector<std::size_t>> coalescence_classes(const std::vector<std::vector<double>>& values,
                                                          const ClusterOptions& opts) {
  const std::size_t m = values.size();
  auto dist = [&](std::size_t i, std::size_t j) {
    double d = 0.0;
    for (std::size_t k = 0; k < values[i].size(); ++k) d = std::max(d, std::abs(values[i][k] - values[j][k]));
    return d;
  };
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (dist(i, j) <= opts.radius) parent[find(i)] = find(j);

  double intra = 0.0, inter = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = dist(i, j);
      if (find(i) == find(j)) intra = std::max(intra, d);
      else inter = std::min(inter, d);
    }
  if (intra > 0.0 && inter < opts.gap_ratio * intra) {
    std::ostringstream os;
    os << "coalescence gap too small: intra " << intra << ", inter " << inter << ", ratio " << opts.gap_ratio;
    throw InconclusiveClustering(os.str(), std::sqrt(intra * inter));
  }

  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < m; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  std::sort(out.begin(), out.end());
  return out;
}

Tableau decode_gt_chain(std::span<const double> c1, std::span<const double> c2, std::span<const double> c3,
                        int bound) {
  if (static_cast<int>(c1.size()) != bound || static_cast<int>(c2.size()) != bound ||
      static_cast<int>(c3.size()) != bound)
    throw std::invalid_argument("decode: expected one Casimir value per level");
  Partition prev;
  std::vector<std::vector<int>> rows;
  for (int i = 1; i <= bound; ++i) {
    const long size = std::lround(c1[i - 1]);
    if (std::abs(c1[i - 1] - static_cast<double>(size)) > 1e-6)
      throw DecoderAmbiguity("non-integral degree-one Casimir at level " + std::to_string(i));
    const int added = static_cast<int>(size) - prev.size();
    if (added < 0) throw DecoderAmbiguity("decreasing chain at level " + std::to_string(i));
    std::vector<Partition> hits;
    for (const auto& mu : crystal::pieri_shapes(prev, added, i)) {
      const double t2 = static_cast<double>(lie::casimir2_eigenvalue(mu, i));
      const double t3 = lie::casimir_eigenvalue(mu, i, 3).get_d();
      if (std::abs(c2[i - 1] - t2) <= 1e-6 * std::max(1.0, std::abs(t2)) &&
          std::abs(c3[i - 1] - t3) <= 1e-6 * std::max(1.0, std::abs(t3)))
        hits.push_back(mu);
    }
    if (hits.size() != 1) {
      std::ostringstream os;
      os << "level " << i << ": " << hits.size() << " shapes match Casimir values " << c2[i - 1] << ", "
         << c3[i - 1];
      throw DecoderAmbiguity(os.str());
    }
    const Partition& mu = hits.front();
    rows.resize(static_cast<std::size_t>(mu.length()));
    for (int row = 0; row < mu.length(); ++row)
      for (int c = prev[row]; c < mu[row]; ++c) rows[row].push_back(i);
    prev = mu;
  }
  return Tableau(std::move(rows), bound);
}

std::vector<double> default_z(int n) {
  static const double base[] = {1.0, 2.3, 3.9, 5.8, 8.1, 10.7};
  std::vector<double> z;
  for (int a = 0; a < n; ++a) z.push_back(a < 6 ? base[a] : base[5] + 2.9 * (a - 5) + 0.13 * (a - 5) * (a - 5));
  return z;
}

std::vector<double> default_q(int r) {
  static const double base[] = {1.0, 2.2, 3.7, 5.9, 8.3, 11.2};
  std::vector<double> q;
  for (int i = 0; i < r; ++i) q.push_back(i < 6 ? base[i] : base[5] + 3.1 * (i - 5) + 0.17 * (i - 5) * (i - 5));
  return q;
}

namespace {

std::vector<Tableau> decode_all(const BlockOperators& ops, const MatrixXd& v, lie::Side side) {
  const int bound = side == lie::Side::GlR ? ops.r() : ops.n();
  std::vector<std::vector<std::vector<double>>> c(3, std::vector<std::vector<double>>(bound));
  for (int d = 1; d <= 3; ++d)
    for (int i = 1; i <= bound; ++i) c[d - 1][i - 1] = rayleigh_quotients(ops.casimir(side, i, d), v);
  std::vector<Tableau> out;
  for (Eigen::Index b = 0; b < v.cols(); ++b) {
    std::vector<std::vector<double>> x(3);
    for (int d = 0; d < 3; ++d)
      for (int i = 0; i < bound; ++i) x[d].push_back(c[d][i][b]);
    out.push_back(decode_gt_chain(x[0], x[1], x[2], bound));
  }
  return out;
}

}  // namespace

std::vector<Tableau> extract_S(const BlockOperators& ops, const MatrixXd& at_z_zero, std::span<const double> z_end,
                               std::span<const double> q, const Combination& comb, const FlowConfig& cfg,
                               Diagnostics& diag, const TraceSink* sink) {
  PathSpec p = gt_q_path({z_end.begin(), z_end.end()}, {q.begin(), q.end()});
  p.t_end = cfg.t_gt;
  p.steps_per_decade = cfg.steps_per_decade;
  const Transport tr = continue_branches(ops, p, at_z_zero, comb, cfg.track, sink, "gt_q");
  diag.merge(tr.diagnostics);
  return decode_all(ops, tr.vectors, lie::Side::GlR);
}

std::vector<Tableau> extract_T(const BlockOperators& ops, const MatrixXd& at_q_zero, std::span<const double> z,
                               std::span<const double> q, const Combination& comb, const FlowConfig& cfg,
                               Diagnostics& diag, const TraceSink* sink) {
  PathSpec p = gt_z_path({z.begin(), z.end()}, {q.begin(), q.end()});
  p.t_end = cfg.t_gt;
  p.steps_per_decade = cfg.steps_per_decade;
  const Transport tr = continue_branches(ops, p, at_q_zero, comb, cfg.track, sink, "gt_z");
  diag.merge(tr.diagnostics);
  return decode_all(ops, tr.vectors, lie::Side::GlN);
}

namespace {

PathSpec z_path_spec(const FlowConfig& cfg, const std::vector<double>& q) {
  PathSpec p;
  switch (cfg.z_path) {
    case ZPath::Ray: p = straight_to_zero(cfg.z, q); break;
    case ZPath::CollisionThrough: p = collision_path(static_cast<int>(cfg.z.size()), cfg.z, q, false); break;
    case ZPath::CollisionUnit: p = collision_path(static_cast<int>(cfg.z.size()), cfg.z, q, true); break;
  }
  p.steps_per_decade = cfg.steps_per_decade;
  return p;
}

std::vector<double> jittered(const std::vector<double>& q, std::uint64_t seed, int attempt) {
  if (attempt == 0) return q;
  std::mt19937_64 rng(seed * 7919 + static_cast<std::uint64_t>(attempt));
  std::uniform_int_distribution<int> num(1, 1024);
  std::vector<double> out = q;
  for (auto& x : out) x += 1e-3 * attempt * (num(rng) / 1024.0);
  return out;
}

FlowResult run_once(const BlockOperators& ops, const FlowConfig& cfg, const std::vector<double>& q,
                    std::uint64_t seed, const TraceSink* sink) {
  const int r = ops.r(), n = ops.n();
  const Eigen::Index m = ops.dim();
  FlowResult res;
  res.q_used = q;

  PathSpec inf = z_path_spec(cfg, q);
  inf.t_begin = cfg.t_infinity;
  inf.t_end = 1.0;
  Combination comb = draw_combination(static_cast<std::size_t>(r + n), seed);
  for (std::uint64_t extra = 1; extra <= 8; ++extra) {
    if (decompose(ops.family(inf, inf.t_begin), comb, 1e-7).min_gap >= 1e-6) break;
    comb = draw_combination(static_cast<std::size_t>(r + n), seed + 1000 * extra);
  }
  const InfinityLabels labels = labels_at_infinity(ops, inf, comb);

  const Transport a = continue_branches(ops, inf, MatrixXd::Identity(m, m), comb, cfg.track, sink, "z_inf");
  PathSpec zero = inf;
  zero.t_begin = 1.0;
  zero.t_end = cfg.t_zero;
  const Transport b = continue_branches(ops, zero, a.vectors, comb, cfg.track, sink, "z_zero");
  res.diagnostics.merge(a.diagnostics);
  res.diagnostics.merge(b.diagnostics);

  std::vector<std::vector<double>> endpoint(static_cast<std::size_t>(m), std::vector<double>(r));
  for (int i = 1; i <= r; ++i) {
    const MatrixXd k = ops.nabla_limit(i, q);
    const auto rq = rayleigh_quotients(k, b.vectors);
    const VectorXd spec = Eigen::SelfAdjointEigenSolver<MatrixXd>(k, Eigen::EigenvaluesOnly).eigenvalues();
    for (Eigen::Index br = 0; br < m; ++br) {
      endpoint[br][i - 1] = rq[br];
      res.diagnostics.endpoint_deviation =
          std::max(res.diagnostics.endpoint_deviation, (spec.array() - rq[br]).abs().minCoeff());
    }
  }
  res.classes = coalescence_classes(endpoint, cfg.cluster);

  const auto s = extract_S(ops, b.vectors, zero.z_at(cfg.t_zero), q, comb, cfg, res.diagnostics, sink);

  const auto z_star = inf.z_at(1.0);
  PathSpec qpath = q_rescale(z_star, q);
  qpath.t_end = cfg.t_zero;
  qpath.steps_per_decade = cfg.steps_per_decade;
  const Transport c = continue_branches(ops, qpath, a.vectors, comb, cfg.track, sink, "q_zero");
  res.diagnostics.merge(c.diagnostics);
  const auto t = extract_T(ops, c.vectors, z_star, q, comb, cfg, res.diagnostics, sink);

  for (Eigen::Index br = 0; br < m; ++br)
    res.branches.push_back({labels.labels[br], endpoint[br], s[br], t[br]});
  return res;
}

}  // namespace

FlowResult run_block(const lie::BasisPtr& basis, const FlowConfig& cfg, const TraceSink* sink) {
  if (static_cast<int>(cfg.z.size()) != basis->n() || static_cast<int>(cfg.q.size()) != basis->r())
    throw std::invalid_argument("flow config: z must have length n and q length r");
  const BlockOperators ops(basis);
  for (int attempt = 0;; ++attempt) {
    try {
      FlowResult res = run_once(ops, cfg, jittered(cfg.q, cfg.seed, attempt), cfg.seed + attempt, sink);
      res.attempts = attempt + 1;
      return res;
    } catch (const DegenerateSpectrum&) {
      if (attempt + 1 >= cfg.max_attempts) throw;
    } catch (const DecoderAmbiguity&) {
      if (attempt + 1 >= cfg.max_attempts) throw;
    } catch (const ContinuationFailure&) {
      if (attempt + 1 >= cfg.max_attempts) throw;
    }
  }
}

std::vector<std::pair<lie::BasisPtr, std::vector<NatMatrix>>> corpus_blocks(int r, int n, const Corpus& corpus) {
  std::map<std::pair<std::vector<int>, std::vector<int>>, std::vector<NatMatrix>> groups;
  auto add = [&](const NatMatrix& a) { groups[{a.col_sums(), a.row_sums()}].push_back(a); };
  switch (corpus.kind) {
    case Corpus::Kind::EntryBound:
      for (const auto& a : matrices_with_entry_bound(r, n, corpus.max_entry)) add(a);
      break;
    case Corpus::Kind::ColumnDegrees:
      if (static_cast<int>(corpus.k.size()) != n) throw std::invalid_argument("corpus: k must have length n");
      for (const auto& a : matrices_with_col_sums(r, corpus.k)) add(a);
      break;
    case Corpus::Kind::Weight:
      if (static_cast<int>(corpus.k.size()) != n || static_cast<int>(corpus.weight.size()) != r)
        throw std::invalid_argument("corpus: k must have length n and weight length r");
      for (const auto& a : matrices_with_margins(corpus.weight, corpus.k)) add(a);
      break;
  }
  std::vector<std::pair<lie::BasisPtr, std::vector<NatMatrix>>> out;
  for (auto& [key, members] : groups) out.emplace_back(lie::basis_for(r, n, key.first, key.second), std::move(members));
  return out;
}

MainTheoremReport verify_main_theorem(int r, int n, const Corpus& corpus, const FlowConfig& cfg,
                                      const TraceSink* sink, std::size_t max_dim) {
  MainTheoremReport rep;
  const auto blocks = corpus_blocks(r, n, corpus);
  for (const auto& [basis, members] : blocks) rep.max_dim = std::max(rep.max_dim, basis->size());
  if (rep.max_dim > max_dim)
    throw BudgetError("largest block has dimension " + std::to_string(rep.max_dim) + " > budget " +
                      std::to_string(max_dim));
  for (const auto& [basis, members] : blocks) {
    rep.cases += members.size();
    BlockReport br{members.front().row_sums(), members.front().col_sums(), {}};
    try {
      br.result = run_block(basis, cfg, sink);
    } catch (const std::exception& e) {
      std::string rows;
      for (int x : br.row_sums) rows += (rows.empty() ? "" : ",") + std::to_string(x);
      rep.failures.push_back("block with row sums (" + rows + "): " + e.what());
      rep.blocks.push_back(std::move(br));
      continue;
    }
    for (const auto& a : members) {
      const auto it = std::find_if(br.result.branches.begin(), br.result.branches.end(),
                                   [&](const Branch& b) { return b.label == a; });
      const RskPair pq = rsk(a);
      if (it != br.result.branches.end() && it->S == pq.Q && it->T == pq.P) {
        ++rep.agreements;
        continue;
      }
      Mismatch mm{a, Tableau(r), Tableau(n), pq.P, pq.Q};
      if (it != br.result.branches.end()) {
        mm.S = it->S;
        mm.T = it->T;
      }
      rep.mismatches.push_back(std::move(mm));
    }
    rep.blocks.push_back(std::move(br));
  }
  return rep;
}

}  // namespace rskflow::flow
