#include <algorithm>

#include "doctest.h"
#include "rskflow/crystals.hpp"

using namespace rskflow;
using namespace rskflow::crystal;

namespace {

std::vector<Element> matrix_corpus(int r, int n, int max_entry) {
  std::vector<Element> out;
  for (auto& a : matrices_with_entry_bound(r, n, max_entry)) out.emplace_back(a);
  return out;
}

}  // namespace

TEST_CASE("weights") {
  CHECK(weight(Element(Tableau({{1, 1, 1, 2}, {2}}, 2))) == std::vector<int>{3, 2});
  CHECK(weight(Element(NatMatrix(3, 2))) == std::vector<int>{0, 0, 0});
  CHECK(weight(Element(NatMatrix::from_rows({{0, 2, 1}, {1, 0, 1}}))) == std::vector<int>{3, 2});
}

TEST_CASE("raising and lowering on small tableaux") {
  const Element hw(Tableau({{1, 1}, {2}}, 3));
  CHECK_FALSE(crystal_e(1, hw).has_value());
  CHECK_FALSE(crystal_e(2, hw).has_value());
  auto f = crystal_f(1, Element(Tableau({{1}}, 2)));
  REQUIRE(f.has_value());
  CHECK(std::get<Tableau>(*f) == Tableau({{2}}, 2));
  CHECK_THROWS_AS(crystal_f(2, Element(Tableau({{1}}, 2))), std::out_of_range);
  CHECK_THROWS_AS(crystal_e(0, Element(NatMatrix(2, 2))), std::out_of_range);
}

TEST_CASE("signature rule on words") {
  // word 2 1 1 2: the first 1 cancels the leading 2, leaving 1 2 unmatched.
  std::vector<int> w{2, 1, 1, 2};
  CHECK(word_lower_position(w, 1) == std::optional<std::size_t>(2));
  CHECK(word_raise_position(w, 1) == std::optional<std::size_t>(3));
  std::vector<int> cancel{2, 1};
  CHECK_FALSE(word_lower_position(cancel, 1).has_value());
  CHECK_FALSE(word_raise_position(cancel, 1).has_value());
}

TEST_CASE("e and f are partial inverses") {
  std::vector<Element> elems = matrix_corpus(3, 2, 2);
  for (int k = 0; k <= 4; ++k)
    for (const auto& lam : partitions_of(k, 3))
      for (auto& t : semistandard_tableaux(lam, 3)) elems.emplace_back(t);
  for (const auto& x : elems)
    for (int i = 1; i < rank(x); ++i) {
      if (auto y = crystal_f(i, x)) {
        auto back = crystal_e(i, *y);
        REQUIRE(back.has_value());
        REQUIRE(*back == x);
        auto wx = weight(x), wy = weight(*y);
        REQUIRE(wy[i - 1] == wx[i - 1] - 1);
        REQUIRE(wy[i] == wx[i] + 1);
      }
      if (auto y = crystal_e(i, x)) {
        auto back = crystal_f(i, *y);
        REQUIRE(back.has_value());
        REQUIRE(*back == x);
      }
    }
}

TEST_CASE("crystal graph of Mat_{2x2}(N,(1,1)) matches SSYT under rsk") {
  std::vector<Element> mats;
  std::vector<int> k{1, 1};
  for (auto& a : matrices_with_col_sums(2, k)) mats.emplace_back(a);
  REQUIRE(mats.size() == 4);
  std::vector<Element> images;
  for (const auto& m : mats) images.emplace_back(rsk(std::get<NatMatrix>(m)).Q);
  const auto g_mat = crystal_graph(mats);
  // Edges among the recording tableaux, transported back to matrix indices.
  std::vector<std::tuple<std::size_t, int, std::size_t>> a, b;
  for (auto e : g_mat) a.emplace_back(e.source, e.index, e.target);
  for (std::size_t s = 0; s < images.size(); ++s)
    for (std::size_t t = 0; t < images.size(); ++t) {
      auto y = crystal_f(1, images[s]);
      const bool same_p = rsk(std::get<NatMatrix>(mats[s])).P == rsk(std::get<NatMatrix>(mats[t])).P;
      if (y && *y == images[t] && same_p) b.emplace_back(s, 1, t);
    }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
  CHECK(a.size() == 2);
}

TEST_CASE("rsk is a crystal isomorphism on the recording tableau") {
  const CrystalMap f = rsk_crystal_map();
  for (auto [r, n, e] : {std::tuple{2, 3, 2}, {3, 3, 1}, {2, 2, 3}, {3, 2, 2}}) {
    auto corpus = matrix_corpus(r, n, e);
    auto report = verify_isomorphism(f, corpus);
    INFO(report.violation);
    CHECK(report.passed);
    CHECK(report.checked == corpus.size());
  }
}

TEST_CASE("identity passes, mutated rsk fails") {
  CrystalMap id;
  id.apply = [](const Element& x) { return x; };
  std::vector<Element> tabs;
  for (auto& t : semistandard_tableaux(Partition({2, 1}), 3)) tabs.emplace_back(t);
  CHECK(verify_isomorphism(id, tabs).passed);

  // Swap the images of two matrices with the same weight.
  CrystalMap bad = rsk_crystal_map();
  const NatMatrix x = NatMatrix::from_rows({{1, 1, 0}, {0, 0, 1}});
  const NatMatrix y = NatMatrix::from_rows({{1, 0, 1}, {0, 1, 0}});
  bad.apply = [x, y](const Element& e) {
    const auto& a = std::get<NatMatrix>(e);
    const NatMatrix& src = a == x ? y : (a == y ? x : a);
    return Element(rsk(src).Q);
  };
  bad.spectator = nullptr;
  auto report = verify_isomorphism(bad, matrix_corpus(2, 3, 2));
  CHECK_FALSE(report.passed);
  CHECK_FALSE(report.violation.empty());
}

TEST_CASE("pieri shapes") {
  CHECK(pieri_shapes(Partition({1}), 1, 2) == std::vector<Partition>{Partition({2}), Partition({1, 1})});
  CHECK(pieri_shapes(Partition(), 4, 3) == std::vector<Partition>{Partition({4})});
  auto s = pieri_shapes(Partition({2, 1}), 2, 3);
  std::vector<Partition> expected{Partition({4, 1}), Partition({3, 2}), Partition({3, 1, 1}), Partition({2, 2, 1})};
  std::sort(s.begin(), s.end());
  std::sort(expected.begin(), expected.end());
  CHECK(s == expected);
}

TEST_CASE("g and u chains") {
  std::vector<int> col{2, 1};
  CHECK(g_insert(Tableau(2), col) == Tableau({{1, 1, 2}}, 2));
  std::vector<int> zero{0, 0};
  const Tableau t({{1, 2}, {2}}, 2);
  CHECK(g_insert(t, zero) == t);

  CHECK(u_extend(Tableau({{1}}, 1), Partition({1, 1})) == Tableau({{1}, {2}}, 2));
  CHECK(u_extend(Tableau(0), Partition({3})) == Tableau({{1, 1, 1}}, 1));
  CHECK_THROWS_AS(u_extend(Tableau({{1}}, 1), Partition({1, 1, 1})), std::invalid_argument);

  for (int r = 1; r <= 3; ++r)
    for (int n = 1; n <= 3; ++n)
      for (const auto& a : matrices_with_entry_bound(r, n, 2)) {
        const RskPair pq = rsk(a);
        const Tableau g = g_chain(a), u = u_chain(a);
        REQUIRE(g == pq.Q);
        REQUIRE(u == pq.P);
        for (int j = 0; j < n; ++j) {
          const Partition before = g_chain(a.first_columns(j)).shape();
          const Partition after = g_chain(a.first_columns(j + 1)).shape();
          const auto shapes = pieri_shapes(before, after.size() - before.size(), r);
          REQUIRE(std::find(shapes.begin(), shapes.end(), after) != shapes.end());
        }
      }
}

TEST_CASE("rigidity: agreement after restriction forces agreement") {
  // The chain map agrees with rsk on the first n-1 columns and on the recording shape,
  // and then on the whole pair.
  for (int r = 1; r <= 3; ++r)
    for (int n = 2; n <= 3; ++n)
      for (const auto& a : matrices_with_entry_bound(r, n, 2)) {
        const RskPair pq = rsk(a);
        const Tableau s = u_chain(a);
        REQUIRE(restrict(s, n - 1) == rsk(a.first_columns(n - 1)).P);
        REQUIRE(restrict(pq.P, n - 1) == restrict(s, n - 1));
        REQUIRE(s.shape() == pq.P.shape());
        REQUIRE(s == pq.P);
      }
}
