#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rskflow/combinatorics.hpp"

namespace rskflow::crystal {

// A tableau over 1..r, or an r-row matrix read as a tensor product of its columns.
using Element = std::variant<Tableau, NatMatrix>;

int rank(const Element& x);
std::vector<int> weight(const Element& x);

// Raising / lowering operators; nullopt when undefined. Throws std::out_of_range unless 1 <= i < rank.
std::optional<Element> crystal_e(int i, const Element& x);
std::optional<Element> crystal_f(int i, const Element& x);

// Signature rule on a word: position changed by e_i (raise) or f_i (lower), if any.
std::optional<std::size_t> word_raise_position(std::span<const int> word, int i);
std::optional<std::size_t> word_lower_position(std::span<const int> word, int i);

// Column reading word: bottom to top within each column, columns left to right.
std::vector<int> reading_word(const Tableau& t);
// Columns left to right, each column written as 1^{A_1j} 2^{A_2j} ... r^{A_rj}.
std::vector<int> reading_word(const NatMatrix& a);

struct CrystalMap {
  std::string domain;
  std::string codomain;
  std::function<Element(const Element&)> apply;
  // Optional key that must stay constant along every string of the domain.
  std::function<std::string(const Element&)> spectator;
};

struct IsomorphismReport {
  bool passed = true;
  std::size_t checked = 0;
  std::string violation;
};

IsomorphismReport verify_isomorphism(const CrystalMap& f, std::span<const Element> samples);

// RSK viewed as a map onto the recording tableau, with P as spectator.
CrystalMap rsk_crystal_map();

struct Edge {
  std::size_t source;
  int index;
  std::size_t target;
};

// Edges x -> f_i(x) among the given elements; targets outside the list are dropped.
std::vector<Edge> crystal_graph(std::span<const Element> elements);

std::vector<Partition> pieri_shapes(const Partition& lambda, int l, int max_parts);

// Inserts 1 col[0] times, then 2 col[1] times, and so on.
Tableau g_insert(const Tableau& t, std::span<const int> col);
// Adds the boxes of mu / shape(t) filled with alphabet_bound(t) + 1.
Tableau u_extend(const Tableau& t_out, const Partition& mu);

// Chains over the columns of A; the g-chain ends at Q(A), the u-chain at P(A).
Tableau g_chain(const NatMatrix& a);
Tableau u_chain(const NatMatrix& a);

std::string key(const Element& x);

}  // namespace rskflow::crystal
