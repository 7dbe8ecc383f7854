#include <algorithm>
#include <cstdlib>
#include <numeric>

#include "group_internal.hpp"
#include "lgb/errors.hpp"

namespace lgb {

namespace {

/// Reference pair cost: exact rational NCP sum over the signature.
struct ExactCost {
  const Table& t;
  const std::vector<int>& qi;
  using Value = Rational;

  Rational operator()(std::size_t r1, std::size_t r2) const {
    Rational sum;
    for (int a : qi) {
      const auto& attr = t.attr(a);
      const auto& dom = t.domain().attrs[static_cast<std::size_t>(a)];
      if (attr.kind == Kind::Numeric) {
        if (dom.range != 0)
          sum += Rational(std::llabs(t.cell(r1, a) - t.cell(r2, a)), dom.range);
      } else {
        const Hierarchy& h = *attr.hierarchy;
        int lca = h.lca(h.leaf_node(static_cast<int>(t.cell(r1, a))),
                        h.leaf_node(static_cast<int>(t.cell(r2, a))));
        sum += Rational(h.subtree_leaves(lca), dom.domain_size);
      }
    }
    return sum;
  }
};

/// Same cost scaled by D = lcm of the per-attribute denominators, so each
/// comparison is one integer compare. Scaling by a positive constant keeps
/// every ordering and tie identical to ExactCost.
struct FastCost {
  const Table& t;
  const std::vector<int>& qi;
  std::vector<std::int64_t> mult;  // D / denominator; 0 for zero-range numeric
  using Value = std::int64_t;

  std::int64_t operator()(std::size_t r1, std::size_t r2) const {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < qi.size(); ++i) {
      if (mult[i] == 0) continue;
      int a = qi[i];
      const auto& attr = t.attr(a);
      if (attr.kind == Kind::Numeric) {
        sum += std::llabs(t.cell(r1, a) - t.cell(r2, a)) * mult[i];
      } else {
        const Hierarchy& h = *attr.hierarchy;
        int lca = h.lca(h.leaf_node(static_cast<int>(t.cell(r1, a))),
                        h.leaf_node(static_cast<int>(t.cell(r2, a))));
        sum += h.subtree_leaves(lca) * mult[i];
      }
    }
    return sum;
  }
};

/// Fills the multiplier table; false when the common denominator or the
/// worst-case sum cannot fit in 64 bits (callers then use ExactCost).
bool build_fast(const Table& t, const std::vector<int>& qi,
                std::vector<std::int64_t>& mult) {
  std::int64_t D = 1;
  std::vector<std::int64_t> dens;
  for (int a : qi) {
    const auto& dom = t.domain().attrs[static_cast<std::size_t>(a)];
    std::int64_t den =
        t.attr(a).kind == Kind::Numeric ? dom.range : dom.domain_size;
    dens.push_back(den);
    if (den > 0) {
      std::int64_t g = std::gcd(D, den);
      std::int64_t scaled;
      if (__builtin_mul_overflow(D / g, den, &scaled)) return false;
      D = scaled;
    }
  }
  std::size_t terms = std::max<std::size_t>(1, qi.size());
  if (D > INT64_MAX / static_cast<std::int64_t>(terms)) return false;
  mult.clear();
  for (auto den : dens) mult.push_back(den > 0 ? D / den : 0);
  return true;
}

template <class Cost>
std::pair<std::size_t, std::size_t> seeds_core(const std::vector<std::size_t>& set,
                                               const Cost& cost) {
  // set is in ascending id order, so on cost ties the smaller id wins.
  std::size_t u = set[0], prev = u;
  for (int round = 0; round < 3; ++round) {
    bool have = false;
    typename Cost::Value best{};
    std::size_t far = u;
    for (auto w : set) {
      if (w == u) continue;
      auto v = cost(u, w);
      if (!have || best < v) {
        have = true;
        best = v;
        far = w;
      }
    }
    prev = u;
    u = far;
  }
  return {prev, u};
}

/// Covering extent of a growing group on one attribute: an interval for
/// numeric, the common-ancestor node for categorical.
struct Ext {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  int node = -1;
};

std::vector<Ext> extent_of(const Table& t, const std::vector<int>& qi, std::size_t r) {
  std::vector<Ext> e(qi.size());
  for (std::size_t i = 0; i < qi.size(); ++i) {
    int a = qi[i];
    if (t.attr(a).kind == Kind::Numeric)
      e[i].lo = e[i].hi = t.cell(r, a);
    else
      e[i].node = t.attr(a).hierarchy->leaf_node(static_cast<int>(t.cell(r, a)));
  }
  return e;
}

void absorb(const Table& t, const std::vector<int>& qi, std::vector<Ext>& e,
            std::size_t r) {
  for (std::size_t i = 0; i < qi.size(); ++i) {
    int a = qi[i];
    if (t.attr(a).kind == Kind::Numeric) {
      auto v = t.cell(r, a);
      e[i].lo = std::min(e[i].lo, v);
      e[i].hi = std::max(e[i].hi, v);
    } else {
      const Hierarchy& h = *t.attr(a).hierarchy;
      e[i].node = h.lca(e[i].node, h.leaf_node(static_cast<int>(t.cell(r, a))));
    }
  }
}

/// Group-growth costs on the scaled integer scale. The width of a group is
/// the sum of its normalized per-attribute extents times D; the cost of
/// absorbing a tuple is the group NCP increase, previous members paying the
/// widening plus the newcomer paying the new width:
///   (n+1) x width' - n x width = n x (width' - width) + width'.
struct FastExtent {
  const Table& t;
  const std::vector<int>& qi;
  std::vector<std::int64_t> mult;
  using Cost = unsigned __int128;  // widths fit 63 bits, counts 32: no overflow

  std::int64_t width(const std::vector<Ext>& e) const {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < qi.size(); ++i) {
      if (mult[i] == 0) continue;
      if (t.attr(qi[i]).kind == Kind::Numeric)
        sum += (e[i].hi - e[i].lo) * mult[i];
      else
        sum += t.attr(qi[i]).hierarchy->subtree_leaves(e[i].node) * mult[i];
    }
    return sum;
  }

  std::int64_t extended(const std::vector<Ext>& e, std::size_t r) const {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < qi.size(); ++i) {
      if (mult[i] == 0) continue;
      int a = qi[i];
      const auto& attr = t.attr(a);
      if (attr.kind == Kind::Numeric) {
        auto v = t.cell(r, a);
        sum += (std::max(e[i].hi, v) - std::min(e[i].lo, v)) * mult[i];
      } else {
        const Hierarchy& h = *attr.hierarchy;
        int n = h.lca(e[i].node, h.leaf_node(static_cast<int>(t.cell(r, a))));
        sum += h.subtree_leaves(n) * mult[i];
      }
    }
    return sum;
  }

  Cost grow_cost(const std::vector<Ext>& e, std::size_t members, std::size_t r) const {
    std::int64_t before = width(e);
    std::int64_t after = extended(e, r);
    return static_cast<Cost>(members) * static_cast<Cost>(after - before) +
           static_cast<Cost>(after);
  }
};

/// Same growth costs in exact rationals, for domains whose common
/// denominator does not fit the scaled integer scheme.
struct ExactExtent {
  const Table& t;
  const std::vector<int>& qi;
  using Cost = Rational;

  Rational width_of(const std::vector<Ext>& e, bool extendv, std::size_t r) const {
    Rational sum;
    for (std::size_t i = 0; i < qi.size(); ++i) {
      int a = qi[i];
      const auto& attr = t.attr(a);
      const auto& dom = t.domain().attrs[static_cast<std::size_t>(a)];
      if (attr.kind == Kind::Numeric) {
        if (dom.range == 0) continue;
        std::int64_t lo = e[i].lo, hi = e[i].hi;
        if (extendv) {
          auto v = t.cell(r, a);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        sum += Rational(hi - lo, dom.range);
      } else {
        const Hierarchy& h = *attr.hierarchy;
        int n = e[i].node;
        if (extendv) n = h.lca(n, h.leaf_node(static_cast<int>(t.cell(r, a))));
        sum += Rational(h.subtree_leaves(n), dom.domain_size);
      }
    }
    return sum;
  }

  Cost grow_cost(const std::vector<Ext>& e, std::size_t members, std::size_t r) const {
    Rational before = width_of(e, false, r);
    Rational after = width_of(e, true, r);
    return (after - before) * Rational(static_cast<std::int64_t>(members)) + after;
  }
};

/// Top-down bisection step: both sides start as a seed and grow one tuple at
/// a time (ascending id). A tuple joins the side whose group NCP increases
/// least by absorbing it; ties go to the emptier side, then to sd1's side.
/// Charging the marginal widening, rather than a fixed distance to the seed,
/// is what lets this mode undercut median splits on the NCP metric.
template <class Policy>
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> divide_core(
    const std::vector<std::size_t>& set, std::size_t sd1, std::size_t sd2,
    const Policy& pol) {
  std::vector<std::size_t> one{sd1}, two{sd2};
  auto e1 = extent_of(pol.t, pol.qi, sd1);
  auto e2 = extent_of(pol.t, pol.qi, sd2);
  for (auto w : set) {
    if (w == sd1 || w == sd2) continue;
    auto c1 = pol.grow_cost(e1, one.size(), w);
    auto c2 = pol.grow_cost(e2, two.size(), w);
    bool to_one;
    if (c1 < c2)
      to_one = true;
    else if (c2 < c1)
      to_one = false;
    else
      to_one = one.size() <= two.size();
    if (to_one) {
      absorb(pol.t, pol.qi, e1, w);
      one.push_back(w);
    } else {
      absorb(pol.t, pol.qi, e2, w);
      two.push_back(w);
    }
  }
  return {std::move(one), std::move(two)};
}

template <class Cost, class Policy>
std::vector<LocalEquivalenceGroup> ncp_worklist(const Table& t, const Table::Subset& s,
                                                int k, const Cost& cost,
                                                const Policy& pol) {
  std::vector<LocalEquivalenceGroup> out;
  const auto need = static_cast<std::size_t>(k);
  std::vector<std::vector<std::size_t>> work{detail::rows_by_id(t, s.rows)};
  auto by_id = [&](std::size_t a, std::size_t b) { return t.id_at(a) < t.id_at(b); };

  while (!work.empty()) {
    auto set = std::move(work.back());
    work.pop_back();
    if (set.size() < 2 * need) {
      out.push_back(detail::make_group(t, set, s.attrs));
      continue;
    }
    auto [sd1, sd2] = seeds_core(set, cost);
    auto [one, two] = divide_core(set, sd1, sd2, pol);
    if (one.size() >= need && two.size() >= need) {
      std::sort(one.begin(), one.end(), by_id);
      std::sort(two.begin(), two.end(), by_id);
      work.push_back(std::move(two));
      work.push_back(std::move(one));
    } else {
      out.push_back(detail::make_group(t, set, s.attrs));
    }
  }
  return out;
}

std::vector<LocalEquivalenceGroup> ncp_subset(const Table& t, const Table::Subset& s,
                                              int k) {
  std::vector<std::int64_t> mult;
  if (build_fast(t, s.attrs, mult)) {
    FastCost cost{t, s.attrs, mult};
    return ncp_worklist(t, s, k, cost, FastExtent{t, s.attrs, std::move(mult)});
  }
  return ncp_worklist(t, s, k, ExactCost{t, s.attrs}, ExactExtent{t, s.attrs});
}

}  // namespace

std::vector<LocalEquivalenceGroup> generalize_ncp(const Table& t, int k, Exec exec) {
  return detail::run_subsets(t, k, exec, &ncp_subset);
}

std::pair<std::int64_t, std::int64_t> find_seeds(const Table& t,
                                                 const std::vector<std::int64_t>& ids,
                                                 const std::vector<int>& qi_set) {
  if (ids.size() < 2) throw ValidationError("find_seeds needs at least two tuples");
  std::vector<std::size_t> rows;
  for (auto id : ids) rows.push_back(t.row_of_id(id));
  rows = detail::rows_by_id(t, rows);
  auto [a, b] = seeds_core(rows, ExactCost{t, qi_set});
  return {t.id_at(a), t.id_at(b)};
}

std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> divide_table(
    const Table& t, const std::vector<std::int64_t>& ids, std::int64_t sd1,
    std::int64_t sd2, const std::vector<int>& qi_set) {
  bool has1 = false, has2 = false;
  for (auto id : ids) {
    has1 = has1 || id == sd1;
    has2 = has2 || id == sd2;
  }
  if (!has1 || !has2) throw ValidationError("divide_table: seeds must belong to the set");
  std::vector<std::size_t> rows;
  for (auto id : ids) rows.push_back(t.row_of_id(id));
  rows = detail::rows_by_id(t, rows);
  auto [one, two] =
      divide_core(rows, t.row_of_id(sd1), t.row_of_id(sd2), ExactExtent{t, qi_set});
  std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> out;
  for (auto r : one) out.first.push_back(t.id_at(r));
  for (auto r : two) out.second.push_back(t.id_at(r));
  std::sort(out.first.begin(), out.first.end());
  std::sort(out.second.begin(), out.second.end());
  return out;
}

}  // namespace lgb
