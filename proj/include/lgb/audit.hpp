#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lgb/exec.hpp"
#include "lgb/publish.hpp"
#include "lgb/rational.hpp"
#include "lgb/table.hpp"

namespace lgb {

/// What an adversary knows about one target: raw values for a subset of the
/// attributes. The worst case is every unflagged cell of the target's row.
struct BackgroundKnowledge {
  std::vector<int> attrs;            // schema indices, ascending
  std::vector<std::int64_t> values;  // parallel raw cell codes
};

/// Worst-case knowledge about one tuple: all of its unflagged cells.
BackgroundKnowledge knowledge_of(const Table& t, std::int64_t id);

/// Published rows consistent with the knowledge: every known value is
/// contained in the row's generalized cell, or occurs in the bucket the
/// cell references (the row's hidden value is one of the bucket's).
std::vector<std::int64_t> matching_tuples(const PublishedTable& pub,
                                          const BackgroundKnowledge& bk);

/// Buckets of the attribute holding at least one matching tuple.
std::vector<int> matching_buckets(const PublishedTable& pub,
                                  const BackgroundKnowledge& bk, int attr);

/// 1 / |matching tuples|; 0 when nothing matches (no exposure to measure).
Rational identity_disclosure_prob(const PublishedTable& pub,
                                  const BackgroundKnowledge& bk);

/// Probability that the target's cell in this attribute is the value s,
/// under a uniform prior over the matching tuples: sum over matching
/// buckets of (matchers inside / all matchers) * (occurrences of s / size).
Rational value_disclosure_prob(const PublishedTable& pub,
                               const BackgroundKnowledge& bk, int attr,
                               std::int64_t s);

struct Verdict {
  bool pass = true;
  std::string detail;  // first violation, empty when pass
};

/// Every local equivalence group has at least k members.
Verdict check_k(const PublishedTable& pub, int k);
/// Every bucket has at least l members and no repeated value.
Verdict check_l(const PublishedTable& pub, int l);

struct SweepResult {
  Rational max_identity;
  Rational max_value;
  std::int64_t identity_id = 0;  // target attaining max_identity
  std::int64_t value_id = 0;     // target attaining max_value
  int value_attr = -1;
};

/// Exhaustive worst-case adversary: one background-knowledge probe per
/// original row, disclosure of each row's own flagged values. Ties resolve
/// to the smaller tuple id so parallel runs report identically.
SweepResult adversary_sweep(const Table& t, const PublishedTable& pub,
                            Exec exec = Exec::Serial);

}  // namespace lgb
