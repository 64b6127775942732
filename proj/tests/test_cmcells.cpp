#include <algorithm>
#include <random>

#include "doctest.h"
#include "rskflow/cmcells.hpp"

using namespace rskflow;
using namespace rskflow::cm;

namespace {

CellPartition relabel_inverse(const CellPartition& p) {
  std::vector<std::vector<Permutation>> blocks;
  for (const auto& b : p.blocks) {
    std::vector<Permutation> img;
    for (const auto& w : b) img.push_back(w.inverse());
    blocks.push_back(img);
  }
  return make_partition(p.n, p.kind, blocks);
}

std::vector<std::size_t> sorted_sizes(const CellPartition& p) {
  auto s = p.sizes();
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

TEST_CASE("cm_point and the rank-one condition") {
  const std::vector<double> z1{0.7}, p1{2.0};
  CHECK(rank_one_defect(cm_point(z1, p1)) == 0.0);

  const std::vector<double> z{0.0, 1.0}, p{0.0, 0.0};
  const CMPoint pt = cm_point(z, p);
  CHECK(pt.Y(0, 1) == Complex(-1.0, 0.0));
  CHECK(pt.Y(1, 0) == Complex(1.0, 0.0));
  CHECK(rank_one_defect(pt) < 1e-14);
  const Upsilon u = upsilon(pt);
  CHECK(u.z == std::vector<Complex>{0.0, 1.0});
  CHECK(std::abs(u.y[0] - Complex(0.0, -1.0)) < 1e-12);
  CHECK(std::abs(u.y[1] - Complex(0.0, 1.0)) < 1e-12);

  const std::vector<double> rep{1.0, 1.0};
  CHECK_THROWS_AS(cm_point(rep, p), lie::PoleError);

  const std::vector<double> z4{0.3, -1.2, 2.5, 4.0}, p4{1.0, -2.0, 0.5, 3.0};
  CHECK(rank_one_defect(cm_point(z4, p4)) < 1e-12);
}

TEST_CASE("cm triples along gamma and lambda") {
  const std::vector<double> z{1.0, 3.0}, q{2.0, 5.0};
  const auto g = gamma_path(z, q);
  CHECK(cm_triple(g, 0.0).z == z);
  CHECK(cm_triple(g, 1.0).z == std::vector<double>{0.0, 0.0});
  CHECK(cm_triple(g, 0.5).z == std::vector<double>{0.5, 1.5});
  CHECK(cm_triple(g, 0.5).q == q);
  // Gaudin side at t = 1/2 is (z, q): s = (1 - t)/t = 1.
  CHECK(g.z_at(0.5) == z);
  const auto l = lambda_path(z, q);
  CHECK(cm_triple(l, 0.5).q == std::vector<double>{1.0, 2.5});
}

TEST_CASE("labelling dictionary") {
  for (const auto& w : Permutation::all(4)) {
    REQUIRE(label_of(weight_vector(w)) == w);
    const NatMatrix a = weight_vector(w);
    for (int i = 1; i <= 4; ++i)
      for (int col = 1; col <= 4; ++col) {
        REQUIRE(a(i - 1, col - 1) == (i == w(col) ? 1 : 0));
        // The transposed convention A_ij = delta_{j, w(i)} is the matrix of w^{-1}.
        REQUIRE(w.inverse().matrix()(i - 1, col - 1) == (col == w(i) ? 1 : 0));
      }
  }
  const std::vector<double> q{1.0, 2.0, 3.0};
  CHECK(limit_diagonal(Permutation({2, 3, 1}), q) == std::vector<double>{2.0, 3.0, 1.0});
  CHECK_THROWS_AS(label_of(NatMatrix::from_rows({{1, 1}, {0, 0}})), std::invalid_argument);
}

TEST_CASE("fibre over (s z, q) degenerates to diag(p) as s grows, n = 2") {
  const std::vector<double> z{1.0, 2.3}, q{1.0, 2.2};
  for (const auto& w : Permutation::all(2)) {
    double prev = 1.0;
    for (double s : {3.0, 30.0, 300.0, 3000.0}) {
      const auto p = fibre_point(z, q, w, s);
      std::vector<double> sz{s * z[0], s * z[1]};
      const CMPoint pt = cm_point(sz, p);
      CHECK(rank_one_defect(pt) < 1e-12);
      const auto y = upsilon(pt).y;
      CHECK(std::abs(y[0] - q[0]) < 1e-9);
      CHECK(std::abs(y[1] - q[1]) < 1e-9);
      const auto lim = limit_diagonal(w, q);
      const double dist = std::max(std::abs(p[0] - lim[0]), std::abs(p[1] - lim[1]));
      CHECK(dist < prev);
      prev = dist;
    }
    CHECK(prev < 1e-6);
  }
  // The two sheets stay apart.
  const auto a = fibre_point(z, q, Permutation({1, 2}), 3.0), b = fibre_point(z, q, Permutation({2, 1}), 3.0);
  CHECK(std::abs(a[0] - b[0]) > 0.5);
}

TEST_CASE("Gaudin labels at infinity match the CM limit diagonal") {
  // On the branch x_w the factor-a Gaudin eigenvalue tends to q_{w(a)}/4 = p_a/4.
  const int n = 3;
  const std::vector<int> ones(n, 1);
  const flow::BlockOperators ops(lie::basis_for(n, n, ones, ones));
  const auto z = flow::default_z(n), q = flow::default_q(n);
  for (const auto& w : Permutation::all(n)) {
    const auto idx = ops.basis().index_of(weight_vector(w));
    REQUIRE(idx.has_value());
    const auto p = limit_diagonal(w, q);
    for (int a = 1; a <= n; ++a) {
      const Eigen::MatrixXd h = ops.gaudin(a, std::vector<double>{1e9 * z[0], 1e9 * z[1], 1e9 * z[2]}, q);
      CHECK(h(*idx, *idx) == doctest::Approx(p[a - 1] / 4.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("reference cells") {
  CHECK(kl_reference_cells(3, CellKind::Right).blocks.size() == 4);
  CHECK(kl_reference_cells(3, CellKind::TwoSided).blocks.size() == 3);
  CHECK(sorted_sizes(kl_reference_cells(4, CellKind::TwoSided)) == std::vector<std::size_t>{1, 1, 4, 9, 9});
  // Right and left refine to singletons.
  const auto r = kl_reference_cells(4, CellKind::Right), l = kl_reference_cells(4, CellKind::Left);
  for (const auto& br : r.blocks)
    for (const auto& bl : l.blocks) {
      std::size_t common = 0;
      for (const auto& w : br) common += static_cast<std::size_t>(std::count(bl.begin(), bl.end(), w));
      REQUIRE(common <= 1);
    }
  CHECK(relabel_inverse(r).blocks == l.blocks);
  CHECK_THROWS_AS(kl_reference_cells(8, CellKind::Right), std::invalid_argument);
}

TEST_CASE("gamma and lambda endpoint classes") {
  const CellOptions opts;
  for (int n = 2; n <= 4; ++n) {
    const CellResult right = right_cells(n, opts), left = left_cells(n, opts);
    CHECK(right.partition.blocks.size() == right.expected_classes);
    CHECK(left.partition.blocks.size() == left.expected_classes);
    CHECK(right.diagnostics.endpoint_deviation < 1e-8);
    CHECK(right.partition.blocks == kl_reference_cells(n, CellKind::Right).blocks);
    CHECK(left.partition.blocks == kl_reference_cells(n, CellKind::Left).blocks);
    CHECK(relabel_inverse(right.partition).blocks == left.partition.blocks);
    for (const auto& block : right.partition.blocks) {
      const auto shape = rs_permutation(block.front()).P.shape();
      CHECK(block.size() == static_cast<std::size_t>(count_standard(shape)));
    }
  }
  CHECK(right_cells(2, opts).partition.blocks.size() == 2);
  CHECK(sorted_sizes(right_cells(3, opts).partition) == std::vector<std::size_t>{1, 1, 2, 2});
}

TEST_CASE("two-sided cells") {
  const CellOptions opts;
  CHECK(sorted_sizes(two_sided_cells(2, opts).partition) == std::vector<std::size_t>{1, 1});
  const auto three = two_sided_cells(3, opts).partition;
  CHECK(sorted_sizes(three) == std::vector<std::size_t>{1, 1, 4});
  CHECK(three.blocks == kl_reference_cells(3, CellKind::TwoSided).blocks);
  const auto four = two_sided_cells(4, opts).partition;
  CHECK(four.sizes() == kl_reference_cells(4, CellKind::TwoSided).sizes());
  CHECK(four.blocks == kl_reference_cells(4, CellKind::TwoSided).blocks);
}

TEST_CASE("cells are stable under small q jitter and path changes") {
  CellOptions base;
  const auto ref = right_cells(3, base).partition;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> jitter(-1e-3, 1e-3);
  for (int trial = 0; trial < 3; ++trial) {
    CellOptions o;
    o.q = flow::default_q(3);
    for (auto& x : o.q) x += jitter(rng);
    o.seed = 11 + trial;
    CHECK(right_cells(3, o).partition == ref);
  }
  for (auto p : {flow::ZPath::CollisionThrough, flow::ZPath::CollisionUnit}) {
    CellOptions o;
    o.z_path = p;
    CHECK(right_cells(3, o).partition == ref);
  }
  CellOptions fine;
  fine.steps_per_decade = 8;
  CHECK(right_cells(3, fine).partition == ref);
}
