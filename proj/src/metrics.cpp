#include "lgb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <string>

#include "lgb/errors.hpp"
#include "lgb/rng.hpp"

namespace lgb {

std::int64_t c_dm(const std::vector<LocalEquivalenceGroup>& groups) {
  std::int64_t sum = 0;
  for (const auto& g : groups) {
    auto n = static_cast<std::int64_t>(g.member_ids.size());
    sum += n * n;
  }
  return sum;
}

Rational ncp_table(const PublishedTable& pub, const DomainStats& domain) {
  Rational sum;
  for (const auto& row : pub.rows) {
    for (std::size_t a = 0; a < row.cells.size(); ++a) {
      const auto& cell = row.cells[a];
      if (cell.bucketed()) continue;
      sum += ncp_cell(pub.schema[a], cell.g, domain.attrs[a]);
    }
  }
  return sum;
}

Rational ncp_table(const PublishedTable& pub) { return ncp_table(pub, pub.domain); }

int sum_attribute(const std::vector<AttributeSchema>& schema) {
  for (std::size_t a = 0; a < schema.size(); ++a) {
    if (schema[a].role == Role::Sensitive && schema[a].kind == Kind::Numeric)
      return static_cast<int>(a);
  }
  throw ValidationError("schema has no numeric sensitive attribute to sum over");
}

namespace {

// First m entries of a seeded uniform permutation of v.
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> v, std::size_t m, Rng& rng) {
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.below(v.size() - i));
    std::swap(v[i], v[j]);
  }
  v.resize(m);
  return v;
}

}  // namespace

std::vector<Query> gen_queries(const std::vector<AttributeSchema>& schema,
                               const DomainStats& domain, int n,
                               std::uint64_t seed) {
  if (n < 0) throw ValidationError("query count must be non-negative");
  std::vector<int> eligible;
  for (std::size_t a = 0; a < schema.size(); ++a)
    if (schema[a].role != Role::Sensitive) eligible.push_back(static_cast<int>(a));
  if (eligible.size() < 4)
    throw ValidationError("need at least 4 non-sensitive attributes for queries, have " +
                          std::to_string(eligible.size()));

  Rng rng(seed);
  std::vector<Query> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<int> attrs = sample_without_replacement(eligible, 4, rng);
    std::sort(attrs.begin(), attrs.end());
    Query q;
    for (int a : attrs) {
      Predicate p;
      p.attr = a;
      const auto& dom = domain.attrs[static_cast<std::size_t>(a)];
      if (schema[static_cast<std::size_t>(a)].kind == Kind::Numeric) {
        p.cmp = static_cast<Cmp>(rng.below(6));
        p.value = rng.range(dom.lo, dom.hi);
      } else {
        auto limit = static_cast<std::size_t>(std::min<std::int64_t>(5, dom.domain_size));
        std::size_t m = 1 + static_cast<std::size_t>(rng.below(limit));
        std::vector<std::int64_t> leaves(static_cast<std::size_t>(dom.domain_size));
        std::iota(leaves.begin(), leaves.end(), 0);
        p.values = sample_without_replacement(std::move(leaves), m, rng);
        std::sort(p.values.begin(), p.values.end());
      }
      q.preds.push_back(std::move(p));
    }
    out.push_back(std::move(q));
  }
  return out;
}

namespace {

Rational pro_of_row(const PublishedTable& pub, const PublishedTable::Row& row,
                    const Query& q) {
  Rational pro(1);
  for (const Predicate& pred : q.preds) {
    const auto& attr = pub.schema[static_cast<std::size_t>(pred.attr)];
    const auto& cell = row.cells[static_cast<std::size_t>(pred.attr)];
    Rational f;
    if (cell.bucketed()) {
      const auto& b = pub.bucket_of(pred.attr, cell.bid);
      std::int64_t hits = 0;
      for (std::int64_t v : b.values)
        if (!value_matches(attr, v, pred).is_zero()) ++hits;
      f = Rational(hits, static_cast<std::int64_t>(b.values.size()));
    } else {
      f = value_matches(attr, cell.g, pred);
    }
    if (f.is_zero()) return Rational();
    pro *= f;
  }
  return pro;
}

}  // namespace

QueryAnswer answer_query(const PublishedTable& pub, const Table& original,
                         const Query& q) {
  for (const Predicate& pred : q.preds) {
    if (pred.attr < 0 || pred.attr >= static_cast<int>(pub.schema.size()))
      throw ValidationError("query predicate addresses attribute " +
                            std::to_string(pred.attr) + ", out of range");
  }
  const int sa = sum_attribute(pub.schema);

  std::map<int, FractionSum> per_bucket;
  std::int64_t lower = 0;
  std::int64_t upper = 0;
  for (const auto& row : pub.rows) {
    Rational pro = pro_of_row(pub, row, q);
    if (pro.is_zero()) continue;
    const auto& sc = row.cells[static_cast<std::size_t>(sa)];
    if (sc.bucketed()) {
      per_bucket[sc.bid].add(pro);
    } else {
      // Singleton pseudo-bucket: floor(pro) tuples at the interval's low
      // end, ceil(pro) at its high end.
      if (pro == Rational(1)) lower += sc.g.lo;
      upper += sc.g.hi;
    }
  }
  for (const auto& [bid, pro_sum] : per_bucket) {
    const auto& values = pub.bucket_of(sa, bid).values;  // ascending
    auto size = static_cast<std::int64_t>(values.size());
    std::int64_t n_lo = std::clamp<std::int64_t>(pro_sum.floor_value(), 0, size);
    std::int64_t n_hi = std::clamp<std::int64_t>(pro_sum.ceil_value(), 0, size);
    for (std::int64_t i = 0; i < n_lo; ++i)
      lower += values[static_cast<std::size_t>(i)];
    for (std::int64_t i = 0; i < n_hi; ++i)
      upper += values[static_cast<std::size_t>(size - 1 - i)];
  }

  std::int64_t actual = 0;
  for (std::size_t r = 0; r < original.row_count(); ++r) {
    bool match = true;
    for (const Predicate& pred : q.preds) {
      if (value_matches(original.attr(pred.attr), original.cell(r, pred.attr), pred)
              .is_zero()) {
        match = false;
        break;
      }
    }
    if (match) actual += original.cell(r, sa);
  }

  QueryAnswer ans;
  ans.lower = Rational(lower);
  ans.upper = Rational(upper);
  ans.actual = Rational(actual);
  ans.defined = actual != 0;
  if (ans.defined) ans.r_error = Rational(upper - lower, actual);
  return ans;
}

WorkloadResult run_workload(const PublishedTable& pub, const Table& original,
                            const std::vector<Query>& queries, Exec exec) {
  WorkloadResult res;
  res.answers.resize(queries.size());
  auto n = static_cast<std::int64_t>(queries.size());
  if (exec == Exec::Serial) {
    for (std::int64_t i = 0; i < n; ++i)
      res.answers[static_cast<std::size_t>(i)] =
          answer_query(pub, original, queries[static_cast<std::size_t>(i)]);
  } else {
    std::exception_ptr err;
#ifdef LGB_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        res.answers[static_cast<std::size_t>(i)] =
            answer_query(pub, original, queries[static_cast<std::size_t>(i)]);
      } catch (...) {
#ifdef LGB_HAVE_OPENMP
#pragma omp critical
#endif
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
  }

  long double total = 0.0L;
  for (const auto& a : res.answers) {
    if (!a.defined) continue;
    ++res.defined;
    total += static_cast<long double>(a.r_error.to_double());
  }
  if (res.defined > 0) res.mean_r_error = static_cast<double>(total / res.defined);
  return res;
}

std::vector<std::vector<std::uint8_t>> density_mask(const Table& t, double p,
                                                    std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ValidationError("density must lie in [0, 1]");
  const std::size_t n = t.row_count();
  std::vector<std::vector<std::uint8_t>> mask(
      n, std::vector<std::uint8_t>(static_cast<std::size_t>(t.attr_count()), 0));
  const Rng root(seed);
  for (int a = 0; a < t.attr_count(); ++a) {
    Role role = t.attr(a).role;
    if (role == Role::QI) continue;
    if (role == Role::Sensitive) {
      for (std::size_t r = 0; r < n; ++r) mask[r][static_cast<std::size_t>(a)] = 1;
      continue;
    }
    auto count = static_cast<std::size_t>(std::clamp<long long>(
        std::llround(p * static_cast<double>(n)), 0, static_cast<long long>(n)));
    Rng rng = root.child(static_cast<std::uint64_t>(a));
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(rows[i], rows[j]);
      mask[rows[i]][static_cast<std::size_t>(a)] = 1;
    }
  }
  return mask;
}

}  // namespace lgb
