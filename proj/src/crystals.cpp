#include "rskflow/crystals.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace rskflow::crystal {

namespace {

struct Signature {
  std::vector<std::size_t> unmatched_low;   // positions of unmatched i
  std::vector<std::size_t> unmatched_high;  // positions of unmatched i+1
};

// Each i cancels against the nearest preceding unmatched i+1.
Signature signature(std::span<const int> word, int i) {
  Signature s;
  for (std::size_t p = 0; p < word.size(); ++p) {
    if (word[p] == i + 1) {
      s.unmatched_high.push_back(p);
    } else if (word[p] == i) {
      if (!s.unmatched_high.empty())
        s.unmatched_high.pop_back();
      else
        s.unmatched_low.push_back(p);
    }
  }
  return s;
}

void check_index(int i, const Element& x) {
  if (i < 1 || i >= rank(x)) throw std::out_of_range("crystal index out of range");
}

// Positions of the reading word inside the tableau.
std::vector<Box> reading_boxes(const Tableau& t) {
  std::vector<Box> boxes;
  const auto& rows = t.rows();
  const int cols = rows.empty() ? 0 : static_cast<int>(rows.front().size());
  for (int c = 0; c < cols; ++c)
    for (int r = static_cast<int>(rows.size()) - 1; r >= 0; --r)
      if (c < static_cast<int>(rows[r].size())) boxes.push_back({r, c});
  return boxes;
}

Tableau change_letter(const Tableau& t, std::size_t pos, int value) {
  Box b = reading_boxes(t)[pos];
  auto rows = t.rows();
  rows[b.row][b.col] = value;
  return Tableau(std::move(rows), t.alphabet_bound());
}

// Column of the matrix that holds word position pos.
int column_of(const NatMatrix& a, std::size_t pos) {
  std::size_t seen = 0;
  for (int j = 0; j < a.cols(); ++j) {
    for (int i = 0; i < a.rows(); ++i) seen += a(i, j);
    if (pos < seen) return j;
  }
  throw std::logic_error("word position outside matrix");
}

std::optional<Element> apply(int i, const Element& x, bool raise) {
  check_index(i, x);
  if (const auto* t = std::get_if<Tableau>(&x)) {
    auto word = reading_word(*t);
    auto pos = raise ? word_raise_position(word, i) : word_lower_position(word, i);
    if (!pos) return std::nullopt;
    return Element(change_letter(*t, *pos, raise ? i : i + 1));
  }
  const auto& a = std::get<NatMatrix>(x);
  auto word = reading_word(a);
  auto pos = raise ? word_raise_position(word, i) : word_lower_position(word, i);
  if (!pos) return std::nullopt;
  NatMatrix b = a;
  const int j = column_of(a, *pos);
  const int from = raise ? i : i - 1;  // 0-based row losing a letter
  const int to = raise ? i - 1 : i;
  b(from, j) -= 1;
  b(to, j) += 1;
  return Element(b);
}

}  // namespace

int rank(const Element& x) {
  if (const auto* t = std::get_if<Tableau>(&x)) return t->alphabet_bound();
  return std::get<NatMatrix>(x).rows();
}

std::vector<int> weight(const Element& x) {
  if (const auto* t = std::get_if<Tableau>(&x)) return t->content();
  return std::get<NatMatrix>(x).row_sums();
}

std::optional<std::size_t> word_raise_position(std::span<const int> word, int i) {
  Signature s = signature(word, i);
  if (s.unmatched_high.empty()) return std::nullopt;
  return s.unmatched_high.front();
}

std::optional<std::size_t> word_lower_position(std::span<const int> word, int i) {
  Signature s = signature(word, i);
  if (s.unmatched_low.empty()) return std::nullopt;
  return s.unmatched_low.back();
}

std::vector<int> reading_word(const Tableau& t) {
  std::vector<int> w;
  for (Box b : reading_boxes(t)) w.push_back(t.at(b.row, b.col));
  return w;
}

std::vector<int> reading_word(const NatMatrix& a) {
  std::vector<int> w;
  for (int j = 0; j < a.cols(); ++j)
    for (int i = 0; i < a.rows(); ++i) w.insert(w.end(), a(i, j), i + 1);
  return w;
}

std::optional<Element> crystal_e(int i, const Element& x) { return apply(i, x, true); }
std::optional<Element> crystal_f(int i, const Element& x) { return apply(i, x, false); }

std::string key(const Element& x) {
  if (const auto* t = std::get_if<Tableau>(&x)) return "T" + t->to_string();
  return "M" + std::get<NatMatrix>(x).to_string();
}

IsomorphismReport verify_isomorphism(const CrystalMap& f, std::span<const Element> samples) {
  IsomorphismReport report;
  auto fail = [&](const Element& x, const std::string& what) {
    report.passed = false;
    report.violation = what + " at " + key(x);
    return report;
  };
  for (const Element& x : samples) {
    ++report.checked;
    const Element fx = f.apply(x);
    if (weight(fx) != weight(x)) return fail(x, "weight not preserved");
    const int r = rank(x);
    if (rank(fx) != r) return fail(x, "rank differs");
    for (int i = 1; i < r; ++i) {
      for (bool raise : {true, false}) {
        auto step = [&](const Element& y) { return raise ? crystal_e(i, y) : crystal_f(i, y); };
        const auto ex = step(x);
        const auto efx = step(fx);
        const std::string op = std::string(raise ? "e_" : "f_") + std::to_string(i);
        if (ex.has_value() != efx.has_value()) return fail(x, op + " defined on one side only");
        if (!ex) continue;
        if (f.apply(*ex) != *efx) return fail(x, op + " does not commute");
        if (f.spectator && f.spectator(*ex) != f.spectator(x)) return fail(x, op + " moves the spectator");
      }
    }
  }
  return report;
}

CrystalMap rsk_crystal_map() {
  CrystalMap m;
  m.domain = "Mat_{r x n}(N)";
  m.codomain = "SSYT_n x SSYT_r (crystal on the recording tableau)";
  m.apply = [](const Element& x) { return Element(rsk(std::get<NatMatrix>(x)).Q); };
  m.spectator = [](const Element& x) { return rsk(std::get<NatMatrix>(x)).P.to_string(); };
  return m;
}

std::vector<Edge> crystal_graph(std::span<const Element> elements) {
  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < elements.size(); ++k) index.emplace(key(elements[k]), k);
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < elements.size(); ++k) {
    for (int i = 1; i < rank(elements[k]); ++i) {
      auto y = crystal_f(i, elements[k]);
      if (!y) continue;
      auto it = index.find(key(*y));
      if (it != index.end()) edges.push_back({k, i, it->second});
    }
  }
  return edges;
}

std::vector<Partition> pieri_shapes(const Partition& lambda, int l, int max_parts) {
  return add_horizontal_strip(lambda, l, max_parts);
}

Tableau g_insert(const Tableau& t, std::span<const int> col) {
  Tableau out = t.with_bound(std::max(t.alphabet_bound(), static_cast<int>(col.size())));
  for (std::size_t i = 0; i < col.size(); ++i) {
    if (col[i] < 0) throw std::invalid_argument("column entries must be non-negative");
    for (int m = 0; m < col[i]; ++m) out = row_insert(out, static_cast<int>(i) + 1).tableau;
  }
  return out;
}

Tableau u_extend(const Tableau& t_out, const Partition& mu) {
  const Partition lambda = t_out.shape();
  const int letter = t_out.alphabet_bound() + 1;
  const auto reachable = pieri_shapes(lambda, mu.size() - lambda.size(), -1);
  if (mu.size() < lambda.size() || std::find(reachable.begin(), reachable.end(), mu) == reachable.end())
    throw std::invalid_argument("shape is not a horizontal strip extension");
  auto rows = t_out.rows();
  rows.resize(mu.length());
  for (int r = 0; r < mu.length(); ++r) rows[r].resize(mu[r], letter);
  return Tableau(std::move(rows), letter);
}

Tableau g_chain(const NatMatrix& a) {
  Tableau t(a.rows());
  for (int j = 0; j < a.cols(); ++j) {
    std::vector<int> col(a.rows());
    for (int i = 0; i < a.rows(); ++i) col[i] = a(i, j);
    t = g_insert(t, col);
  }
  return t;
}

Tableau u_chain(const NatMatrix& a) {
  Tableau g(a.rows());
  Tableau u(0);
  for (int j = 0; j < a.cols(); ++j) {
    std::vector<int> col(a.rows());
    for (int i = 0; i < a.rows(); ++i) col[i] = a(i, j);
    g = g_insert(g, col);
    u = u_extend(u, g.shape());
  }
  return u;
}

}  // namespace rskflow::crystal
