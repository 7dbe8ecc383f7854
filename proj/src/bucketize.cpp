#include "lgb/bucketize.hpp"

#include <algorithm>

#include "lgb/errors.hpp"

namespace lgb {

std::string ValuePairSet::value_text(std::int64_t v) const {
  if (hierarchy)
    return hierarchy->node(hierarchy->leaf_node(static_cast<int>(v))).label;
  return std::to_string(v);
}

std::map<std::int64_t, std::int64_t> value_counts(const ValuePairSet& vp) {
  std::map<std::int64_t, std::int64_t> counts;
  for (const auto& p : vp.pairs) ++counts[p.value];
  return counts;
}

bool check_condition(const ValuePairSet& vp, int l) {
  if (l < 1) throw ValidationError("l must be at least 1");
  std::int64_t max_freq = 0;
  for (const auto& [v, c] : value_counts(vp)) max_freq = std::max(max_freq, c);
  return max_freq * l <= static_cast<std::int64_t>(vp.size());
}

std::int64_t weighted_median(const ValuePairSet& vp) {
  std::vector<std::int64_t> values;
  values.reserve(vp.pairs.size());
  for (const auto& p : vp.pairs) values.push_back(p.value);
  return weighted_median_values(values);
}

std::int64_t weighted_median_values(const std::vector<std::int64_t>& values) {
  if (values.empty()) throw ValidationError("weighted_median of empty set");
  std::map<std::int64_t, std::int64_t> counts;
  for (auto v : values) ++counts[v];
  std::int64_t need = (static_cast<std::int64_t>(values.size()) + 1) / 2;
  std::int64_t cum = 0;
  for (const auto& [v, c] : counts) {
    cum += c;
    if (cum >= need) return v;
  }
  return counts.rbegin()->first;  // unreachable
}

std::vector<LocalBucket> divide_buckets(const ValuePairSet& vp, int l) {
  const std::int64_t n = static_cast<std::int64_t>(vp.size());
  if (!check_condition(vp, l))
    throw InfeasibleError("divide_buckets('" + vp.attr + "'): set of " +
                          std::to_string(n) + " pairs is not " + std::to_string(l) +
                          "-eligible");
  const std::int64_t B = n / l;

  // Pairs grouped by value; groups by descending frequency, ties by value;
  // ids ascending inside a group. Dealing round-robin then keeps any two
  // same-value pairs B apart, and frequency <= B by eligibility.
  auto counts = value_counts(vp);
  std::vector<std::pair<std::int64_t, std::int64_t>> groups(counts.begin(), counts.end());
  std::stable_sort(groups.begin(), groups.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<std::vector<ValuePair>> by_value;
  for (const auto& [v, c] : groups) {
    std::vector<ValuePair> g;
    for (const auto& p : vp.pairs)
      if (p.value == v) g.push_back(p);
    std::sort(g.begin(), g.end(),
              [](const ValuePair& a, const ValuePair& b) { return a.id < b.id; });
    by_value.push_back(std::move(g));
  }

  std::vector<LocalBucket> buckets(static_cast<std::size_t>(B));
  for (std::int64_t b = 0; b < B; ++b) {
    buckets[static_cast<std::size_t>(b)].attr = vp.attr;
    buckets[static_cast<std::size_t>(b)].bid = static_cast<int>(b) + 1;
  }
  std::int64_t idx = 0;
  for (const auto& g : by_value)
    for (const auto& p : g) buckets[static_cast<std::size_t>(idx++ % B)].members.push_back(p);
  return buckets;
}

namespace {

void bucketize_rec(const ValuePairSet& vp, int l, const Eligibility& eligible,
                   int& next_bid, int& next_leaf, std::vector<LocalBucket>& out) {
  std::int64_t median = weighted_median(vp);
  ValuePairSet small{vp.attr, {}, vp.hierarchy};
  ValuePairSet big{vp.attr, {}, vp.hierarchy};
  for (const auto& p : vp.pairs)
    (p.value <= median ? small : big).pairs.push_back(p);

  if (!small.pairs.empty() && !big.pairs.empty() && eligible(small, l) &&
      eligible(big, l)) {
    bucketize_rec(small, l, eligible, next_bid, next_leaf, out);
    bucketize_rec(big, l, eligible, next_bid, next_leaf, out);
    return;
  }
  int leaf = next_leaf++;
  for (auto& b : divide_buckets(vp, l)) {
    b.bid = next_bid++;
    b.split_set = leaf;
    out.push_back(std::move(b));
  }
}

}  // namespace

std::vector<LocalBucket> local_bucketize(const ValuePairSet& vp, int l,
                                         const Eligibility& eligible) {
  Eligibility pred = eligible ? eligible : Eligibility(&check_condition);
  if (!pred(vp, l)) {
    std::int64_t max_freq = 0, max_val = 0;
    for (const auto& [v, c] : value_counts(vp)) {
      if (c > max_freq) {
        max_freq = c;
        max_val = v;
      }
    }
    throw InfeasibleError("attribute '" + vp.attr + "': value '" + vp.value_text(max_val) +
                          "' occurs " + std::to_string(max_freq) + " times in " +
                          std::to_string(vp.size()) + " flagged cells; cannot satisfy l=" +
                          std::to_string(l));
  }
  std::vector<LocalBucket> out;
  int next_bid = 1, next_leaf = 0;
  bucketize_rec(vp, l, pred, next_bid, next_leaf, out);
  return out;
}

}  // namespace lgb
