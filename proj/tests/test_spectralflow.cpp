#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "rskflow/spectralflow.hpp"

using namespace rskflow;
using namespace rskflow::flow;

namespace {

FlowConfig config(int r, int n) {
  FlowConfig cfg;
  cfg.z = default_z(n);
  cfg.q = default_q(r);
  return cfg;
}

const Branch& branch_of(const FlowResult& res, const NatMatrix& a) {
  for (const auto& b : res.branches)
    if (b.label == a) return b;
  throw std::logic_error("label not found");
}

}  // namespace

TEST_CASE("worked example block") {
  const NatMatrix a = NatMatrix::from_rows({{0, 2, 1}, {1, 0, 1}});
  auto basis = lie::basis_for(2, 3, a.col_sums(), a.row_sums());
  const FlowResult res = run_block(basis, config(2, 3));
  const Branch& b = branch_of(res, a);
  CHECK(b.S == Tableau({{1, 1, 1, 2}, {2}}, 2));
  CHECK(b.T == Tableau({{1, 2, 3, 3}, {2}}, 3));
  CHECK(res.diagnostics.endpoint_deviation < 1e-8);
}

TEST_CASE("path schedules") {
  const std::vector<double> z{1.0, 2.0, 4.0}, q{1.0, 3.0};
  const PathSpec ray = straight_to_zero(z, q);
  const auto grid = ray.grid();
  CHECK(grid.front() == 1e6);
  CHECK(grid.back() == 1e-6);
  CHECK(grid.size() == 12 * 16 + 1);
  CHECK(ray.z_at(0.5) == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(ray.q_at(0.5) == q);
  CHECK(q_rescale(z, q).q_at(0.25) == std::vector<double>{0.25, 0.75});
  CHECK(gt_z_path(z, q).z_at(0.5) == std::vector<double>{0.25, 1.0, 4.0});

  PathSpec half = ray;
  half.steps_per_decade = 8;
  CHECK(half.grid().size() == 12 * 8 + 1);
}

TEST_CASE("collision path properties") {
  for (bool unit : {false, true}) {
    const PathSpec p = collision_path(4, default_z(4), default_q(2), unit);
    const CollisionCheck c = check_collision_properties(p);
    CHECK(c.ordered);
    CHECK(c.monotone);
    CHECK(c.limiting);
    CHECK(c.asymptotic);
  }
  const PathSpec unit = collision_path(3, default_z(3), default_q(2), true);
  CHECK(unit.z_at(1.0) == std::vector<double>{1.0, 2.0, 4.0});
  // A ray keeps ratios fixed, so it is not a collision path.
  CHECK_FALSE(check_collision_properties(straight_to_zero(default_z(3), default_q(2))).asymptotic);
}

TEST_CASE("dyadic combinations") {
  const auto a = draw_combination(6, 42), b = draw_combination(6, 42), c = draw_combination(6, 43);
  CHECK(a.primary == b.primary);
  CHECK(a.secondary == b.secondary);
  CHECK(a.primary != c.primary);
  for (Eigen::Index i = 0; i < a.primary.size(); ++i) {
    CHECK(a.primary(i) != 0.0);
    const double scaled = a.primary(i) * 1024.0;
    CHECK(scaled == std::round(scaled));
  }
}

TEST_CASE("decode a Gelfand-Tsetlin chain") {
  const Tableau t({{1, 1, 2, 3}, {2, 3}, {3}}, 3);
  std::vector<double> c1, c2, c3;
  for (int i = 1; i <= 3; ++i) {
    const Partition mu = restrict(t, i).shape();
    c1.push_back(lie::casimir_eigenvalue(mu, i, 1).get_d());
    c2.push_back(lie::casimir_eigenvalue(mu, i, 2).get_d());
    c3.push_back(lie::casimir_eigenvalue(mu, i, 3).get_d());
  }
  CHECK(decode_gt_chain(c1, c2, c3, 3) == t);
  c2[2] += 0.5;
  CHECK_THROWS_AS(decode_gt_chain(c1, c2, c3, 3), DecoderAmbiguity);
  CHECK_THROWS_AS(decode_gt_chain(c1, c2, c3, 2), std::invalid_argument);
}

TEST_CASE("coalescence classes") {
  const std::vector<std::vector<double>> v{{0.0, 1.0}, {2.0, 1.0}, {1e-9, 1.0}, {2.0, 1.0 + 2e-9}};
  const auto cls = coalescence_classes(v, ClusterOptions{});
  CHECK(cls == std::vector<std::vector<std::size_t>>{{0, 2}, {1, 3}});
  // A point between the radius and the gap leaves the split undecided.
  const std::vector<std::vector<double>> blurred{{0.0}, {5e-7}, {1e-4}};
  CHECK_THROWS_AS(coalescence_classes(blurred, ClusterOptions{}), InconclusiveClustering);
  try {
    coalescence_classes(blurred, ClusterOptions{});
  } catch (const InconclusiveClustering& e) {
    CHECK(e.suggested_tol() > 5e-7);
    CHECK(e.suggested_tol() < 1e-4);
  }
}

TEST_CASE("endpoint classes on permutation blocks") {
  const std::vector<int> two{1, 1}, three{1, 1, 1};
  const FlowResult r2 = run_block(lie::basis_for(2, 2, two, two), config(2, 2));
  CHECK(r2.classes.size() == 2);

  const FlowResult r3 = run_block(lie::basis_for(3, 3, three, three), config(3, 3));
  std::vector<std::size_t> sizes;
  for (const auto& c : r3.classes) sizes.push_back(c.size());
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<std::size_t>{1, 1, 2, 2});
  // Branches in one class share S.
  for (const auto& c : r3.classes)
    for (auto idx : c) CHECK(r3.branches[idx].S == r3.branches[c.front()].S);
  CHECK(r3.diagnostics.endpoint_deviation < 1e-8);
}

TEST_CASE("flow tableaux agree with RSK on small corpora") {
  Corpus entries;
  entries.max_entry = 2;
  const auto rep1 = verify_main_theorem(2, 2, entries, config(2, 2));
  CHECK(rep1.cases == 81);
  CHECK(rep1.passed());

  Corpus cols;
  cols.kind = Corpus::Kind::ColumnDegrees;
  cols.k = {1, 1, 1};
  const auto rep2 = verify_main_theorem(2, 3, cols, config(2, 3));
  CHECK(rep2.cases == 8);
  CHECK(rep2.passed());

  Corpus perms;
  perms.kind = Corpus::Kind::Weight;
  perms.k = {1, 1, 1};
  perms.weight = {1, 1, 1};
  const auto rep3 = verify_main_theorem(3, 3, perms, config(3, 3));
  CHECK(rep3.cases == 6);
  CHECK(rep3.passed());
}

TEST_CASE("result is independent of the z path and the grid") {
  Corpus entries;
  entries.max_entry = 1;
  for (ZPath p : {ZPath::Ray, ZPath::CollisionThrough, ZPath::CollisionUnit}) {
    for (int steps : {16, 8}) {
      FlowConfig cfg = config(2, 3);
      cfg.z_path = p;
      cfg.steps_per_decade = steps;
      const auto rep = verify_main_theorem(2, 3, entries, cfg);
      CHECK_MESSAGE(rep.passed(), to_string(p), " steps ", steps);
    }
  }
}

TEST_CASE("transposing swaps the two tableaux") {
  const NatMatrix a = NatMatrix::from_rows({{0, 2, 1}, {1, 0, 1}});
  const NatMatrix at = a.transpose();
  const FlowResult res = run_block(lie::basis_for(3, 2, at.col_sums(), at.row_sums()), config(3, 2));
  const Branch& b = branch_of(res, at);
  CHECK(b.S == Tableau({{1, 2, 3, 3}, {2}}, 3));
  CHECK(b.T == Tableau({{1, 1, 1, 2}, {2}}, 2));
}

TEST_CASE("budget and trace") {
  Corpus entries;
  entries.max_entry = 2;
  CHECK_THROWS_AS(verify_main_theorem(2, 3, entries, config(2, 3), nullptr, 5), BudgetError);

  std::size_t rows = 0;
  std::set<std::string> stages;
  const TraceSink sink = [&](const TraceRow& row) {
    ++rows;
    stages.insert(row.stage);
  };
  const std::vector<int> two{1, 1};
  run_block(lie::basis_for(2, 2, two, two), config(2, 2), &sink);
  CHECK(rows > 0);
  CHECK(stages.count("z_inf") == 1);
}
