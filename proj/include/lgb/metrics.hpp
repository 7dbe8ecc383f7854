#pragma once

#include <cstdint>
#include <vector>

#include "lgb/exec.hpp"
#include "lgb/generalize.hpp"
#include "lgb/publish.hpp"
#include "lgb/rational.hpp"
#include "lgb/table.hpp"

namespace lgb {

/// Discernibility penalty: sum of squared group sizes. Depends only on the
/// grouping, so it cannot move when the bucketization parameter changes.
std::int64_t c_dm(const std::vector<LocalEquivalenceGroup>& groups);

/// Information loss of a release: ncp_cell summed over every generalized
/// cell of every tuple. Bucket references carry no interval or node and
/// contribute nothing here; their cost surfaces as query error instead.
Rational ncp_table(const PublishedTable& pub, const DomainStats& domain);
Rational ncp_table(const PublishedTable& pub);

/// SUM aggregate probe with a four-way conjunctive filter. Predicates are
/// kept in ascending attribute order and address distinct attributes.
struct Query {
  std::vector<Predicate> preds;
};

/// The aggregation target: first numeric attribute with the sensitive role.
/// Throws ValidationError when the schema has none.
int sum_attribute(const std::vector<AttributeSchema>& schema);

/// n random queries, each filtering on 4 distinct attributes drawn
/// uniformly from the QI and semi-sensitive columns. Numeric comparators
/// are uniform over the six forms with a uniform comparand from the
/// attribute's observed range; categorical predicates take a distinct
/// value set of size uniform in [1, min(5, domain size)]. Fully determined
/// by the seed. Throws ValidationError with fewer than 4 eligible columns.
std::vector<Query> gen_queries(const std::vector<AttributeSchema>& schema,
                               const DomainStats& domain, int n,
                               std::uint64_t seed);

struct QueryAnswer {
  Rational lower;        // sum of the floor-count smallest values per bucket
  Rational upper;        // sum of the ceil-count largest values per bucket
  Rational actual;       // true SUM over the original table
  Rational r_error;      // (upper - lower) / actual; zero when undefined
  bool defined = false;  // actual != 0
};

/// Bounds the query's SUM from the release alone. Each tuple's match
/// probability is the product of per-predicate fractions, where a bucket
/// reference counts the matching share of its bucket. Probabilities are
/// summed per bucket of the sum attribute and rounded down / up to tuple
/// counts; the counts then pick the smallest / largest values held by that
/// bucket. A tuple whose sum cell is not bucketed acts as its own bucket
/// spanning the cell's interval. The true sum comes from the original rows.
QueryAnswer answer_query(const PublishedTable& pub, const Table& original,
                         const Query& q);

struct WorkloadResult {
  std::vector<QueryAnswer> answers;  // query order
  int defined = 0;                   // answers with a nonzero actual
  double mean_r_error = 0.0;         // over defined answers, 0 when none
};

/// Evaluates a query batch. Answers land in query order under either
/// executor; the mean is reduced serially from the exact per-query errors.
WorkloadResult run_workload(const PublishedTable& pub, const Table& original,
                            const std::vector<Query>& queries,
                            Exec exec = Exec::Serial);

/// Mask with every sensitive cell flagged, every QI cell clear, and a
/// seeded uniform choice of round(p * rows) flagged cells per
/// semi-sensitive attribute. Feed the result to Table::with_mask.
std::vector<std::vector<std::uint8_t>> density_mask(const Table& t, double p,
                                                    std::uint64_t seed);

}  // namespace lgb
