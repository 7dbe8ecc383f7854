#include "lgb/audit.hpp"

#include <algorithm>
#include <exception>
#include <map>

#include "lgb/errors.hpp"

namespace lgb {

namespace {

bool cell_covers(const PublishedTable& pub, int attr,
                 const PublishedTable::Cell& c, std::int64_t v) {
  if (c.bucketed()) {
    // The row's value is one of the bucket's; v elsewhere rules the row out.
    const auto& b = pub.bucket_of(attr, c.bid);
    return std::binary_search(b.values.begin(), b.values.end(), v);
  }
  const auto& schema = pub.schema[static_cast<std::size_t>(attr)];
  if (schema.kind == Kind::Numeric) return c.g.lo <= v && v <= c.g.hi;
  return schema.hierarchy->subtree_contains(c.g.node, static_cast<int>(v));
}

bool row_matches(const PublishedTable& pub, const PublishedTable::Row& r,
                 const BackgroundKnowledge& bk) {
  for (std::size_t i = 0; i < bk.attrs.size(); ++i) {
    int a = bk.attrs[i];
    if (!cell_covers(pub, a, r.cells[static_cast<std::size_t>(a)], bk.values[i]))
      return false;
  }
  return true;
}

void check_attr(const PublishedTable& pub, int attr) {
  if (attr < 0 || static_cast<std::size_t>(attr) >= pub.schema.size())
    throw ValidationError("attribute index " + std::to_string(attr) +
                          " out of range");
}

}  // namespace

BackgroundKnowledge knowledge_of(const Table& t, std::int64_t id) {
  std::size_t row = t.row_of_id(id);
  BackgroundKnowledge bk;
  bk.attrs = t.signature_of_row(row);
  for (int a : bk.attrs) bk.values.push_back(t.cell(row, a));
  return bk;
}

std::vector<std::int64_t> matching_tuples(const PublishedTable& pub,
                                          const BackgroundKnowledge& bk) {
  if (bk.attrs.size() != bk.values.size())
    throw ValidationError("knowledge attrs and values differ in length");
  for (int a : bk.attrs) check_attr(pub, a);
  std::vector<std::int64_t> out;
  for (const auto& r : pub.rows)
    if (row_matches(pub, r, bk)) out.push_back(r.id);
  return out;
}

std::vector<int> matching_buckets(const PublishedTable& pub,
                                  const BackgroundKnowledge& bk, int attr) {
  check_attr(pub, attr);
  std::vector<int> bids;
  for (auto id : matching_tuples(pub, bk)) {
    const auto& c = pub.row_of_id(id).cells[static_cast<std::size_t>(attr)];
    if (c.bucketed()) bids.push_back(c.bid);
  }
  std::sort(bids.begin(), bids.end());
  bids.erase(std::unique(bids.begin(), bids.end()), bids.end());
  return bids;
}

Rational identity_disclosure_prob(const PublishedTable& pub,
                                  const BackgroundKnowledge& bk) {
  auto m = matching_tuples(pub, bk);
  if (m.empty()) return Rational(0);
  return Rational(1, static_cast<std::int64_t>(m.size()));
}

Rational value_disclosure_prob(const PublishedTable& pub,
                               const BackgroundKnowledge& bk, int attr,
                               std::int64_t s) {
  check_attr(pub, attr);
  auto matchers = matching_tuples(pub, bk);
  if (matchers.empty()) return Rational(0);

  std::map<int, std::int64_t> inside;  // bid -> matching tuples in the bucket
  for (auto id : matchers) {
    const auto& c = pub.row_of_id(id).cells[static_cast<std::size_t>(attr)];
    if (c.bucketed()) ++inside[c.bid];
  }
  Rational total;
  for (const auto& [bid, count] : inside) {
    const auto& b = pub.bucket_of(attr, bid);
    std::int64_t occur = static_cast<std::int64_t>(
        std::count(b.values.begin(), b.values.end(), s));
    if (occur == 0) continue;
    total = total + Rational(count, static_cast<std::int64_t>(matchers.size())) *
                        Rational(occur, static_cast<std::int64_t>(b.values.size()));
  }
  return total;
}

Verdict check_k(const PublishedTable& pub, int k) {
  for (const auto& g : pub.groups)
    if (g.member_ids.size() < static_cast<std::size_t>(k))
      return {false, "group " + std::to_string(g.gid) + " has " +
                         std::to_string(g.member_ids.size()) +
                         " members, fewer than k=" + std::to_string(k)};
  return {};
}

Verdict check_l(const PublishedTable& pub, int l) {
  for (std::size_t a = 0; a < pub.schema.size(); ++a) {
    for (const auto& b : pub.buckets[a]) {
      std::string where =
          "attribute '" + pub.schema[a].name + "' bucket B" + std::to_string(b.bid);
      if (b.values.size() < static_cast<std::size_t>(l))
        return {false, where + " has " + std::to_string(b.values.size()) +
                           " values, fewer than l=" + std::to_string(l)};
      for (std::size_t i = 1; i < b.values.size(); ++i)
        if (b.values[i] == b.values[i - 1])  // sorted multiset
          return {false, where + " repeats a value"};
    }
  }
  return {};
}

SweepResult adversary_sweep(const Table& t, const PublishedTable& pub, Exec exec) {
  const std::int64_t n = static_cast<std::int64_t>(t.row_count());
  std::vector<Rational> identity(static_cast<std::size_t>(n));
  std::vector<Rational> value(static_cast<std::size_t>(n));
  std::vector<int> value_attr(static_cast<std::size_t>(n), -1);

  auto probe = [&](std::int64_t r) {
    std::size_t row = static_cast<std::size_t>(r);
    auto bk = knowledge_of(t, t.id_at(row));
    identity[row] = identity_disclosure_prob(pub, bk);
    for (int a = 0; a < t.attr_count(); ++a) {
      if (!t.flagged(row, a)) continue;
      Rational p = value_disclosure_prob(pub, bk, a, t.cell(row, a));
      if (value_attr[row] < 0 || p > value[row]) {
        value[row] = p;
        value_attr[row] = a;
      }
    }
  };

#ifdef LGB_HAVE_OPENMP
  if (exec == Exec::Parallel) {
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t r = 0; r < n; ++r) {
      try {
        probe(r);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
  } else
#endif
  {
    for (std::int64_t r = 0; r < n; ++r) probe(r);
  }

  SweepResult res;
  for (std::int64_t r = 0; r < n; ++r) {
    std::size_t row = static_cast<std::size_t>(r);
    std::int64_t id = t.id_at(row);
    if (res.identity_id == 0 || identity[row] > res.max_identity ||
        (identity[row] == res.max_identity && id < res.identity_id)) {
      res.max_identity = identity[row];
      res.identity_id = id;
    }
    if (value_attr[row] >= 0 &&
        (res.value_attr < 0 || value[row] > res.max_value ||
         (value[row] == res.max_value && id < res.value_id))) {
      res.max_value = value[row];
      res.value_id = id;
      res.value_attr = value_attr[row];
    }
  }
  return res;
}

}  // namespace lgb
