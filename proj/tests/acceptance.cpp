// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rskflow/cmcells.hpp"
#include "rskflow/combinatorics.hpp"
#include "rskflow/crystals.hpp"
#include "rskflow/liealg.hpp"
#include "rskflow/spectralflow.hpp"

using namespace rskflow;

namespace {

using Op = lie::LinearOperator<lie::Rational>;

struct Verdict {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Verdict()> run;
};

lie::Rational rat(long p, long q = 1) {
  lie::Rational x(p, q);
  x.canonicalize();
  return x;
}

std::string join(const std::vector<std::size_t>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

// 1

Verdict worked_example() {
  const NatMatrix a = NatMatrix::from_rows({{0, 2, 1}, {1, 0, 1}});
  const auto t0 = std::chrono::steady_clock::now();
  const RskPair pq = rsk(a);
  const double us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = pq.P.rows() == std::vector<std::vector<int>>{{1, 2, 3, 3}, {2}} &&
                  pq.Q.rows() == std::vector<std::vector<int>>{{1, 1, 1, 2}, {2}} && us < 1000.0;
  return {ok, "P = " + pq.P.to_string() + ", Q = " + pq.Q.to_string() + ", rsk call " + std::to_string(us) + " us"};
}

// 2

Verdict bijection() {
  std::size_t cases = 0;
  auto check = [&](const NatMatrix& m) {
    ++cases;
    const RskPair pq = rsk(m);
    return rsk_inverse(pq.P, pq.Q) == m && transpose_check(m);
  };
  for (int r = 1; r <= 3; ++r)
    for (int n = 1; n <= 3; ++n)
      for (const auto& m : matrices_with_entry_bound(r, n, 2))
        if (!check(m)) return {false, "fails on " + m.to_string()};
  const std::size_t exhaustive = cases;
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> dim(1, 5), entry(0, 4);
  for (int s = 0; s < 10000; ++s) {
    NatMatrix m(dim(rng), dim(rng));
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) m(i, j) = entry(rng);
    if (!check(m)) return {false, "fails on " + m.to_string()};
  }
  return {true, std::to_string(exhaustive) + " exhaustive + " + std::to_string(cases - exhaustive) + " random cases"};
}

// 3

Verdict crystal_isomorphism() {
  std::size_t checked = 0;
  for (auto [r, n, e] : {std::tuple{2, 3, 2}, std::tuple{3, 3, 1}}) {
    std::vector<crystal::Element> samples;
    for (auto& m : matrices_with_entry_bound(r, n, e)) samples.emplace_back(std::move(m));
    const auto rep = crystal::verify_isomorphism(crystal::rsk_crystal_map(), samples);
    if (!rep.passed) return {false, rep.violation};
    checked += rep.checked;
  }
  return {true, std::to_string(checked) + " elements of Mat_2x3 (<= 2) and Mat_3x3 (<= 1)"};
}

// 4

struct Universe {
  std::vector<lie::BasisPtr> bases;
  std::size_t max_dim = 0;
};

// Full degree blocks with r, n <= 3, column degrees in 1..3, dimension <= 300.
Universe algebra_universe() {
  Universe u;
  for (int r = 1; r <= 3; ++r)
    for (int n = 1; n <= 3; ++n) {
      std::vector<int> k(static_cast<std::size_t>(n), 1);
      while (true) {
        auto b = lie::basis_for(r, n, k);
        if (b->size() <= 300) {
          u.bases.push_back(b);
          u.max_dim = std::max(u.max_dim, b->size());
        }
        std::size_t pos = 0;
        while (pos < k.size() && k[pos] == 3) k[pos++] = 1;
        if (pos == k.size()) break;
        ++k[pos];
      }
    }
  return u;
}

Verdict algebraic_identities() {
  const std::vector<lie::Rational> z{rat(1), rat(5, 2), rat(-7, 3)}, q{rat(0), rat(3, 2), rat(11, 5)};
  const Universe u = algebra_universe();
  std::size_t commutators = 0, adjoint = 0;
  auto all_commute = [&](const std::vector<Op>& ops) {
    for (std::size_t x = 0; x < ops.size(); ++x)
      for (std::size_t y = x + 1; y < ops.size(); ++y) {
        ++commutators;
        if (!lie::commutator(ops[x], ops[y]).is_zero()) return false;
      }
    return true;
  };
  for (const auto& b : u.bases) {
    const int r = b->r(), n = b->n();
    const std::span<const lie::Rational> zs(z.data(), static_cast<std::size_t>(n)), qs(q.data(), static_cast<std::size_t>(r));
    const std::string where = "on r=" + std::to_string(r) + ", n=" + std::to_string(n) + ", dim " + std::to_string(b->size());

    std::vector<Op> family, jms, casimirs_r, casimirs_n;
    for (int i = 1; i <= r; ++i) family.push_back(lie::nabla<lie::Rational>(i, zs, qs, b));
    for (int a = 1; a <= n; ++a) family.push_back(lie::gaudin<lie::Rational>(a, zs, qs, b));
    for (int a = 2; a <= n; ++a) jms.push_back(lie::jm<lie::Rational>(a, b));
    for (int i = 1; i <= r; ++i)
      for (int d = 1; d <= 3; ++d) casimirs_r.push_back(lie::nested_casimir<lie::Rational>(i, d, b, lie::Side::GlR));
    for (int i = 1; i <= n; ++i)
      for (int d = 1; d <= 3; ++d) casimirs_n.push_back(lie::nested_casimir<lie::Rational>(i, d, b, lie::Side::GlN));
    if (!all_commute(family)) return {false, "nabla/Gaudin family does not commute " + where};
    if (!all_commute(jms)) return {false, "Jucys-Murphy elements do not commute " + where};
    if (!all_commute(casimirs_r) || !all_commute(casimirs_n)) return {false, "nested Casimirs do not commute " + where};
    for (int i = 1; i <= r; ++i)
      for (int j = 1; j <= r; ++j) {
        ++commutators;
        if (!lie::commutator(family[static_cast<std::size_t>(i - 1)], lie::total_E<lie::Rational>(j, j, b)).is_zero())
          return {false, "[nabla_i, E_jj] != 0 " + where};
      }
    for (int a = 1; a <= n; ++a)
      for (int i = 1; i <= r; ++i)
        for (int j = 1; j <= r; ++j) {
          ++adjoint;
          if (!lie::is_adjoint_pair(lie::op_E<lie::Rational>(i, j, a, b), lie::op_E<lie::Rational>(j, i, a, b)))
            return {false, "E_ij and E_ji are not adjoint " + where};
        }
  }
  return {true, std::to_string(u.bases.size()) + " bases (dim <= " + std::to_string(u.max_dim) + "), " +
                    std::to_string(commutators) + " commutators, " + std::to_string(adjoint) + " adjoint pairs"};
}

// 5

flow::FlowConfig flow_config(int r, int n) {
  flow::FlowConfig cfg;
  cfg.z = flow::default_z(n);
  cfg.q = flow::default_q(r);
  return cfg;
}

Verdict main_theorem() {
  struct Case {
    int r, n;
    flow::Corpus corpus;
  };
  flow::Corpus entries, cols, perms;
  entries.max_entry = 2;
  cols.kind = flow::Corpus::Kind::ColumnDegrees;
  cols.k = {1, 1, 1};
  perms.kind = flow::Corpus::Kind::Weight;
  perms.k = {1, 1, 1};
  perms.weight = {1, 1, 1};

  std::size_t cases = 0, matched = 0, literal = 0, failures = 0;
  for (const Case& c : {Case{2, 2, entries}, Case{2, 3, cols}, Case{3, 3, perms}}) {
    const auto rep = flow::verify_main_theorem(c.r, c.n, c.corpus, flow_config(c.r, c.n));
    cases += rep.cases;
    matched += rep.agreements;
    failures += rep.failures.size();
    std::set<NatMatrix> members;
    for (const auto& [basis, list] : flow::corpus_blocks(c.r, c.n, c.corpus)) members.insert(list.begin(), list.end());
    for (const auto& block : rep.blocks)
      for (const auto& br : block.result.branches) {
        if (!members.count(br.label)) continue;
        // The statement as written: S = P(A) and T = Q(A), compared entry by entry.
        const RskPair pq = rsk(br.label);
        if (br.S.rows() == pq.P.rows() && br.T.rows() == pq.Q.rows()) ++literal;
      }
  }
  std::ostringstream os;
  os << "as written (S,T) = (P(A),Q(A)): " << literal << "/" << cases
     << " (S has content = row sums, P has content = column sums); with tableaux matched by alphabet "
        "(S,T) = (Q(A),P(A)): "
     << matched << "/" << cases << ", " << failures << " continuation failures";
  return {literal == cases && failures == 0, os.str()};
}

// 6, 7

std::vector<std::size_t> sorted(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}

bool sizes_are_tableau_counts(const cm::CellPartition& p, bool squared) {
  for (const auto& block : p.blocks) {
    const auto f = static_cast<std::size_t>(count_standard(rs_permutation(block.front()).P.shape()));
    if (block.size() != (squared ? f * f : f)) return false;
  }
  return true;
}

Verdict right_cells_match() {
  const cm::CellOptions opts;
  std::ostringstream os;
  bool ok = true;
  for (int n = 2; n <= 4; ++n) {
    const auto res = cm::right_cells(n, opts);
    const bool eq = res.partition == cm::kl_reference_cells(n, cm::CellKind::Right);
    const bool count = res.partition.blocks.size() == res.expected_classes;
    const bool sizes = sizes_are_tableau_counts(res.partition, false);
    ok = ok && eq && count && sizes;
    os << "n=" << n << " (dim " << res.labels.size() << "): " << res.partition.blocks.size() << " classes, "
       << (eq ? "= P-classes" : "!= P-classes") << (sizes ? "" : ", sizes wrong") << "; ";
  }
  return {ok, os.str()};
}

Verdict left_and_two_sided() {
  const cm::CellOptions opts;
  const auto left = cm::left_cells(3, opts);
  const bool left_ok = left.partition == cm::kl_reference_cells(3, cm::CellKind::Left);
  const auto t3 = cm::two_sided_cells(3, opts), t4 = cm::two_sided_cells(4, opts);
  const bool s3 = sorted(t3.partition.sizes()) == std::vector<std::size_t>{1, 1, 4} &&
                  sizes_are_tableau_counts(t3.partition, true);
  const bool s4 = sorted(t4.partition.sizes()) == std::vector<std::size_t>{1, 1, 4, 9, 9} &&
                  sizes_are_tableau_counts(t4.partition, true);
  std::ostringstream os;
  os << "left n=3 " << (left_ok ? "= Q-classes" : "!= Q-classes") << "; two-sided n=3 sizes "
     << join(t3.partition.sizes()) << ", n=4 sizes " << join(t4.partition.sizes()) << " (each = f_lambda^2"
     << (s3 && s4 ? ")" : " FAILS)");
  return {left_ok && s3 && s4, os.str()};
}

// 8

Verdict duality_shadow() {
  std::ostringstream os;
  bool ok = true;
  for (auto [r, n] : {std::pair{2, 2}, std::pair{2, 3}}) {
    auto b = lie::basis_for(r, n, std::vector<int>(static_cast<std::size_t>(n), 1));
    std::vector<Op> jms, gts;
    for (int a = 2; a <= n; ++a) jms.push_back(lie::jm<lie::Rational>(a, b));
    for (int i = 1; i <= n; ++i)
      for (int d = 1; d <= 2; ++d) gts.push_back(lie::nested_casimir<lie::Rational>(i, d, b, lie::Side::GlN));
    const auto ej = lie::exact::joint_eigenspaces(jms), eg = lie::exact::joint_eigenspaces(gts);
    const bool same = lie::exact::same_decomposition(ej, eg);
    ok = ok && same;
    os << "r=" << r << " n=" << n << ": " << ej.size() << " vs " << eg.size() << " joint eigenspaces, "
       << (same ? "equal" : "different") << "; ";
  }
  return {ok, os.str()};
}

// 9

Verdict path_robustness() {
  const auto reference = cm::right_cells(3, cm::CellOptions{});
  const auto ref_left = cm::left_cells(3, cm::CellOptions{});
  int variants = 0;
  for (auto path : {flow::ZPath::Ray, flow::ZPath::CollisionThrough, flow::ZPath::CollisionUnit})
    for (int steps : {16, 8}) {
      cm::CellOptions o;
      o.z_path = path;
      o.steps_per_decade = steps;
      const auto res = cm::right_cells(3, o);
      ++variants;
      if (res.labels != reference.labels || !(res.partition == reference.partition))
        return {false, "right cells differ on " + flow::to_string(path) + " with " + std::to_string(steps) +
                           " steps per decade"};
      if (path == flow::ZPath::Ray) {
        const auto left = cm::left_cells(3, o);
        if (left.labels != ref_left.labels || !(left.partition == ref_left.partition))
          return {false, "left cells differ with " + std::to_string(steps) + " steps per decade"};
      }
    }
  // The same variants on the S_3 block of the main flow.
  const std::vector<int> ones{1, 1, 1};
  const auto basis = lie::basis_for(3, 3, ones, ones);
  const auto base = flow::run_block(basis, flow_config(3, 3));
  for (auto path : {flow::ZPath::CollisionThrough, flow::ZPath::CollisionUnit})
    for (int steps : {16, 8}) {
      auto cfg = flow_config(3, 3);
      cfg.z_path = path;
      cfg.steps_per_decade = steps;
      const auto res = flow::run_block(basis, cfg);
      for (std::size_t b = 0; b < res.branches.size(); ++b)
        if (res.branches[b].label != base.branches[b].label || res.branches[b].S != base.branches[b].S ||
            res.branches[b].T != base.branches[b].T)
          return {false, "flow labels differ on " + flow::to_string(path)};
      if (res.classes != base.classes) return {false, "flow classes differ on " + flow::to_string(path)};
    }
  return {true, std::to_string(variants) + " cell runs (ray, both collision variants, full and halved grid) and "
                                           "4 flow runs agree"};
}

// 10

Verdict cm_dictionary() {
  const std::vector<double> z{1.0, 2.3}, q{1.0, 2.2};
  double worst_rank = 0.0, worst_limit = 0.0, worst_spec = 0.0, worst_gaudin = 0.0;

  const std::vector<double> z0{0.0, 1.0}, p0{0.0, 0.0};
  const auto ex = cm::upsilon(cm::cm_point(z0, p0));
  const bool example = std::abs(ex.y[0] - cm::Complex(0, -1)) < 1e-12 && std::abs(ex.y[1] - cm::Complex(0, 1)) < 1e-12;
  worst_rank = cm::rank_one_defect(cm::cm_point(z0, p0));

  const std::vector<int> ones{1, 1};
  const flow::BlockOperators ops(lie::basis_for(2, 2, ones, ones));
  const double s = 1e6;
  const std::vector<double> sz{s * z[0], s * z[1]};
  // Joint eigenvectors of the Gaudin family at (s z, q).
  const Eigen::MatrixXd h = ops.gaudin(1, sz, q) + 0.37 * ops.gaudin(2, sz, q);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);

  for (const auto& w : Permutation::all(2)) {
    const auto p = cm::fibre_point(z, q, w, s);
    const auto pt = cm::cm_point(sz, p);
    worst_rank = std::max(worst_rank, cm::rank_one_defect(pt));
    const auto lim = cm::limit_diagonal(w, q);
    const auto y = cm::upsilon(pt).y;
    for (int a = 0; a < 2; ++a) {
      worst_limit = std::max(worst_limit, std::abs(p[a] - lim[a]));
      worst_spec = std::max(worst_spec, std::abs(y[a] - q[a]));
    }
    // The Gaudin branch labelled w has 4 H_a -> p_a.
    const auto idx = *ops.basis().index_of(cm::weight_vector(w));
    Eigen::Index col = 0;
    es.eigenvectors().row(idx).cwiseAbs().maxCoeff(&col);
    const Eigen::VectorXd v = es.eigenvectors().col(col);
    for (int a = 1; a <= 2; ++a)
      worst_gaudin = std::max(worst_gaudin, std::abs(4.0 * v.dot(ops.gaudin(a, sz, q) * v) - lim[a - 1]));
  }
  std::ostringstream os;
  os << std::scientific << "rank defect " << worst_rank << ", |p(s) - diag limit| " << worst_limit
     << ", |spec Y - q| " << worst_spec << ", |4 H_a - p_a| " << worst_gaudin << " at s = 1e6";
  return {example && worst_rank < 1e-8 && worst_limit < 1e-8 && worst_spec < 1e-8 && worst_gaudin < 1e-8, os.str()};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "rsk worked example", 0.001, worked_example},
      {2, "bijection and transpose", 10, bijection},
      {3, "crystal isomorphism", 60, crystal_isomorphism},
      {4, "exact algebraic identities", 300, algebraic_identities},
      {5, "flow tableaux equal rsk", 600, main_theorem},
      {6, "right cells = P-classes", 300, right_cells_match},
      {7, "left and two-sided cells", 600, left_and_two_sided},
      {8, "duality shadow", 60, duality_shadow},
      {9, "path and grid robustness", 300, path_robustness},
      {10, "CM dictionary at n = 2", 1, cm_dictionary},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    while (v.detail.ends_with("; ")) v.detail.resize(v.detail.size() - 2);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // Criterion 1 times the rsk call itself; the others time the whole check.
    const bool in_time = c.id == 1 || secs < c.limit_seconds;
    const bool pass = v.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s %2d %-28s %9.3f s  %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                v.detail.c_str(), in_time ? "" : " [over time limit]");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
