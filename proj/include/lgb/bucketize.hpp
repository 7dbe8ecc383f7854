#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lgb/hierarchy.hpp"

namespace lgb {

struct ValuePair {
  std::int64_t id = 0;
  std::int64_t value = 0;  // cell code: numeric value or hierarchy leaf rank

  bool operator==(const ValuePair& o) const { return id == o.id && value == o.value; }
};

/// The flagged (id, sensitive-value) pairs of one attribute.
struct ValuePairSet {
  std::string attr;
  std::vector<ValuePair> pairs;
  std::shared_ptr<const Hierarchy> hierarchy;  // categorical only, for error text

  std::size_t size() const { return pairs.size(); }
  std::string value_text(std::int64_t v) const;
};

struct LocalBucket {
  std::string attr;
  int bid = 0;                // dense within attribute, starting at 1
  int split_set = 0;          // recursion leaf that produced this bucket
  std::vector<ValuePair> members;
};

/// Histogram of values ($value\_number$), ordered by value.
std::map<std::int64_t, std::int64_t> value_counts(const ValuePairSet& vp);

/// l-eligibility: (most frequent value count) x l <= |vp|.
bool check_condition(const ValuePairSet& vp, int l);

/// Smallest value v such that at least ceil(|vp|/2) pairs have value <= v.
std::int64_t weighted_median(const ValuePairSet& vp);

/// Same median rule over a plain value list (used by the generalizers too).
std::int64_t weighted_median_values(const std::vector<std::int64_t>& values);

/// Assigns an l-eligible set into B = |vp|/l buckets by dealing the pairs
/// round-robin, grouped by value with the most frequent values first. Every
/// bucket ends up with l or more members, all values distinct.
std::vector<LocalBucket> divide_buckets(const ValuePairSet& vp, int l);

/// Acceptance hook for the recursion guard; the default is check_condition.
/// Swapping it leaves room for stricter per-bucket constraints.
using Eligibility = std::function<bool(const ValuePairSet&, int)>;

/// Recursively halves the value range at the weighted median while both
/// halves stay eligible, then hands each leaf set to divide_buckets. Bucket
/// IDs run depth-first in creation order. Throws InfeasibleError when the
/// initial set is not l-eligible.
std::vector<LocalBucket> local_bucketize(const ValuePairSet& vp, int l,
                                         const Eligibility& eligible = {});

}  // namespace lgb
