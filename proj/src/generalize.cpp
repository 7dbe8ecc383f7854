#include "lgb/generalize.hpp"

#include <algorithm>

#include "lgb/errors.hpp"

namespace lgb {

GeneralizedValue generalize_values(const AttributeSchema& attr,
                                   const std::vector<std::int64_t>& values) {
  if (values.empty())
    throw ValidationError("generalize_values('" + attr.name + "'): empty value set");
  if (attr.kind == Kind::Numeric) {
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return GeneralizedValue::interval(*lo, *hi);
  }
  for (auto v : values)
    if (v < 0 || v >= attr.hierarchy->leaf_count())
      throw ValidationError("generalize_values('" + attr.name + "'): leaf code " +
                            std::to_string(v) + " not in hierarchy");
  return GeneralizedValue::category(attr.hierarchy->lca_of_leaf_ranks(values));
}

Rational ncp_cell(const AttributeSchema& attr, const GeneralizedValue& g,
                  const DomainStats::Attr& dom) {
  if (attr.kind == Kind::Numeric) {
    if (dom.range == 0) return Rational(0);
    return Rational(g.hi - g.lo, dom.range);
  }
  return Rational(attr.hierarchy->subtree_leaves(g.node), dom.domain_size);
}

std::string cmp_symbol(Cmp c) {
  switch (c) {
    case Cmp::GT: return ">";
    case Cmp::LT: return "<";
    case Cmp::EQ: return "=";
    case Cmp::GE: return ">=";
    case Cmp::LE: return "<=";
    default: return "!=";
  }
}

namespace {

bool raw_numeric_matches(std::int64_t cell, Cmp cmp, std::int64_t v) {
  switch (cmp) {
    case Cmp::GT: return cell > v;
    case Cmp::LT: return cell < v;
    case Cmp::EQ: return cell == v;
    case Cmp::GE: return cell >= v;
    case Cmp::LE: return cell <= v;
    default: return cell != v;
  }
}

/// Integer points of [lo,hi] satisfying `cmp v`.
std::int64_t points_matching(std::int64_t lo, std::int64_t hi, Cmp cmp, std::int64_t v) {
  auto span = [](std::int64_t a, std::int64_t b) {
    return a > b ? 0 : b - a + 1;
  };
  switch (cmp) {
    case Cmp::GT: return span(std::max(lo, v + 1), hi);
    case Cmp::GE: return span(std::max(lo, v), hi);
    case Cmp::LT: return span(lo, std::min(hi, v - 1));
    case Cmp::LE: return span(lo, std::min(hi, v));
    case Cmp::EQ: return (lo <= v && v <= hi) ? 1 : 0;
    default:      return span(lo, hi) - ((lo <= v && v <= hi) ? 1 : 0);
  }
}

void check_kinds(const AttributeSchema& attr, const Predicate& p) {
  if (p.categorical() != (attr.kind == Kind::Categorical))
    throw ValidationError("predicate kind does not match attribute '" + attr.name + "'");
}

}  // namespace

Rational value_matches(const AttributeSchema& attr, std::int64_t cell,
                       const Predicate& p) {
  check_kinds(attr, p);
  if (attr.kind == Kind::Numeric)
    return raw_numeric_matches(cell, p.cmp, p.value) ? Rational(1) : Rational(0);
  return std::binary_search(p.values.begin(), p.values.end(), cell) ? Rational(1)
                                                                    : Rational(0);
}

Rational value_matches(const AttributeSchema& attr, const GeneralizedValue& g,
                       const Predicate& p) {
  check_kinds(attr, p);
  if (attr.kind == Kind::Numeric) {
    if (!g.is_interval())
      throw ValidationError("categorical value on numeric attribute '" + attr.name + "'");
    std::int64_t total = g.hi - g.lo + 1;
    return Rational(points_matching(g.lo, g.hi, p.cmp, p.value), total);
  }
  if (g.is_interval())
    throw ValidationError("interval on categorical attribute '" + attr.name + "'");
  const auto& node = attr.hierarchy->node(g.node);
  std::int64_t inside = 0;
  for (auto v : p.values)
    if (node.first_leaf <= v && v <= node.last_leaf) ++inside;
  return Rational(inside, attr.hierarchy->subtree_leaves(g.node));
}

}  // namespace lgb
