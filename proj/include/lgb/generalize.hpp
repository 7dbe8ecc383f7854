#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lgb/rational.hpp"
#include "lgb/table.hpp"

namespace lgb {

/// Generalized form of a QI cell: an interval for numeric attributes, a
/// hierarchy node for categorical ones.
struct GeneralizedValue {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  int node = -1;  // hierarchy node index; -1 means interval

  static GeneralizedValue interval(std::int64_t lo, std::int64_t hi) {
    GeneralizedValue g;
    g.lo = lo;
    g.hi = hi;
    return g;
  }
  static GeneralizedValue category(int node) {
    GeneralizedValue g;
    g.node = node;
    return g;
  }
  bool is_interval() const { return node < 0; }

  bool operator==(const GeneralizedValue& o) const {
    return lo == o.lo && hi == o.hi && node == o.node;
  }
};

/// Smallest generalized value covering a non-empty multiset of cell codes:
/// [min,max] for numeric, lowest common ancestor for categorical.
GeneralizedValue generalize_values(const AttributeSchema& attr,
                                   const std::vector<std::int64_t>& values);

/// Normalized certainty penalty of one generalized cell, exact.
/// Numeric: (hi-lo)/range, 0 when the whole table has zero range.
/// Categorical: subtree leaf count / number of distinct values.
Rational ncp_cell(const AttributeSchema& attr, const GeneralizedValue& g,
                  const DomainStats::Attr& dom);

enum class Cmp { GT, LT, EQ, GE, LE, NE };

std::string cmp_symbol(Cmp c);

/// One conjunct of a query: a comparison against a numeric attribute, or a
/// disjunction of equalities over categorical leaf values.
struct Predicate {
  int attr = -1;
  Cmp cmp = Cmp::EQ;
  std::int64_t value = 0;               // numeric comparand
  std::vector<std::int64_t> values;     // categorical leaf ranks, sorted, unique

  bool categorical() const { return !values.empty(); }
};

/// Fraction of a raw cell matching the predicate: exactly 0 or 1.
Rational value_matches(const AttributeSchema& attr, std::int64_t cell,
                       const Predicate& p);

/// Fraction of a generalized cell matching the predicate: integer points of
/// the interval (uniform over the lattice) or subtree leaves in the
/// predicate's value set.
Rational value_matches(const AttributeSchema& attr, const GeneralizedValue& g,
                       const Predicate& p);

}  // namespace lgb
