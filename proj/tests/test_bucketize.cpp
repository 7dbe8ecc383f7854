#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "lgb/bucketize.hpp"
#include "lgb/errors.hpp"
#include "lgb/rng.hpp"
#include "oracles.hpp"

using namespace lgb;

namespace {

ValuePairSet make_vp(const std::vector<std::int64_t>& values, const std::string& attr = "s") {
  ValuePairSet vp;
  vp.attr = attr;
  std::int64_t id = 1001;
  for (auto v : values) vp.pairs.push_back({id++, v});
  return vp;
}

std::vector<std::int64_t> values_of(const LocalBucket& b) {
  std::vector<std::int64_t> out;
  for (const auto& m : b.members) out.push_back(m.value);
  return out;
}

}  // namespace

TEST_CASE("check_condition evaluates the eligibility inequality") {
  // {a,a,b,c} encoded as {0,0,1,2}.
  CHECK(check_condition(make_vp({0, 0, 1, 2}), 2));
  CHECK_FALSE(check_condition(make_vp({0, 0, 1, 2}), 3));
  // All distinct with l = n sits exactly on the boundary.
  CHECK(check_condition(make_vp({4, 7, 9}), 3));
  CHECK_FALSE(check_condition(make_vp({4, 7, 9}), 4));
  CHECK_THROWS_AS(check_condition(make_vp({1}), 0), ValidationError);
}

TEST_CASE("weighted_median picks the lower middle") {
  CHECK(weighted_median(make_vp({1, 2, 3, 4})) == 2);
  CHECK(weighted_median(make_vp({5, 5, 5})) == 5);
  CHECK(weighted_median(make_vp({9})) == 9);
  CHECK(weighted_median(make_vp({3, 1, 4, 1, 5})) == 3);
  CHECK_THROWS_AS(weighted_median(make_vp({})), ValidationError);

  Rng rng(17);
  for (int it = 0; it < 300; ++it) {
    std::vector<std::int64_t> vals;
    std::size_t n = 1 + rng.below(25);
    for (std::size_t i = 0; i < n; ++i) vals.push_back(rng.range(0, 9));
    auto sorted = vals;
    std::sort(sorted.begin(), sorted.end());
    // Sort oracle: the element at position ceil(n/2) of the sorted list.
    std::int64_t oracle = sorted[(n + 1) / 2 - 1];
    CHECK(weighted_median(make_vp(vals)) == oracle);
  }
}

TEST_CASE("divide_buckets pinned examples") {
  auto two = divide_buckets(make_vp({1, 2, 3, 4}), 2);
  REQUIRE(two.size() == 2);
  CHECK(two[0].members.size() == 2);
  CHECK(two[1].members.size() == 2);
  CHECK(two[0].bid == 1);
  CHECK(two[1].bid == 2);

  // {a,a,b,c,d}: B=2, sizes {3,2}, the two a's separated.
  auto five = divide_buckets(make_vp({0, 0, 1, 2, 3}), 2);
  REQUIRE(five.size() == 2);
  CHECK(five[0].members.size() == 3);
  CHECK(five[1].members.size() == 2);
  int with_a = 0;
  for (const auto& b : five) {
    auto vals = values_of(b);
    with_a += std::count(vals.begin(), vals.end(), 0) > 0 ? 1 : 0;
    CHECK(std::count(vals.begin(), vals.end(), 0) <= 1);
  }
  CHECK(with_a == 2);

  CHECK_THROWS_AS(divide_buckets(make_vp({0, 0}), 2), InfeasibleError);
}

TEST_CASE("divide_buckets succeeds exactly when the partition oracle does") {
  // Exhaustive multisets of size <= 6 over a 3-letter alphabet, l in {2,3}.
  for (int n = 1; n <= 6; ++n) {
    std::vector<std::int64_t> vals(static_cast<std::size_t>(n), 0);
    std::function<void(int)> enumerate = [&](int pos) {
      if (pos == n) {
        for (int l = 2; l <= 3; ++l) {
          auto vp = make_vp(vals);
          bool eligible = check_condition(vp, l);
          bool oracle = testutil::diverse_partition_exists(vals, l);
          CHECK(eligible == oracle);
          if (eligible) {
            auto buckets = divide_buckets(vp, l);
            CHECK(testutil::buckets_conform(vp, buckets, l));
            // Balanced sizes: floor(n/B) or ceil(n/B).
            auto B = static_cast<std::int64_t>(buckets.size());
            CHECK(B == n / l);
            for (const auto& b : buckets) {
              auto sz = static_cast<std::int64_t>(b.members.size());
              CHECK(sz >= n / B);
              CHECK(sz <= (n + B - 1) / B);
            }
          } else {
            CHECK_THROWS_AS(divide_buckets(vp, l), InfeasibleError);
          }
        }
        return;
      }
      for (std::int64_t v = 0; v < 3; ++v) {
        vals[static_cast<std::size_t>(pos)] = v;
        enumerate(pos + 1);
      }
    };
    enumerate(0);
  }
}

TEST_CASE("local_bucketize splits {1,2,3,4} into the two range halves") {
  auto vp = make_vp({1, 2, 3, 4});
  auto buckets = local_bucketize(vp, 2);
  REQUIRE(buckets.size() == 2);
  CHECK(buckets[0].bid == 1);
  CHECK(buckets[1].bid == 2);
  auto v0 = values_of(buckets[0]);
  auto v1 = values_of(buckets[1]);
  std::sort(v0.begin(), v0.end());
  std::sort(v1.begin(), v1.end());
  CHECK(v0 == std::vector<std::int64_t>{1, 2});
  CHECK(v1 == std::vector<std::int64_t>{3, 4});
  CHECK(buckets[0].split_set != buckets[1].split_set);
}

TEST_CASE("local_bucketize rejects impossible diversity naming the culprit") {
  auto vp = make_vp({7, 7});
  vp.attr = "salary";
  CHECK_THROWS_WITH_AS(local_bucketize(vp, 2), doctest::Contains("salary"), InfeasibleError);
  CHECK_THROWS_WITH_AS(local_bucketize(vp, 2), doctest::Contains("'7'"), InfeasibleError);

  // Same thing on a categorical attribute names the label, not the code.
  ValuePairSet cat;
  cat.attr = "disease";
  cat.hierarchy = std::make_shared<Hierarchy>(Hierarchy::flat({"flu", "cold"}));
  cat.pairs = {{1, 0}, {2, 0}};
  CHECK_THROWS_WITH_AS(local_bucketize(cat, 2), doctest::Contains("'flu'"), InfeasibleError);
}

TEST_CASE("local_bucketize output conforms on random inputs") {
  Rng rng(900);
  for (int it = 0; it < 200; ++it) {
    std::size_t n = 2 + rng.below(40);
    std::int64_t spread = 1 + static_cast<std::int64_t>(rng.below(12));
    std::vector<std::int64_t> vals;
    for (std::size_t i = 0; i < n; ++i) vals.push_back(rng.range(0, spread));
    int l = 2 + static_cast<int>(rng.below(3));
    auto vp = make_vp(vals);
    if (!check_condition(vp, l)) {
      CHECK_THROWS_AS(local_bucketize(vp, l), InfeasibleError);
      continue;
    }
    auto buckets = local_bucketize(vp, l);
    CHECK(testutil::buckets_conform(vp, buckets, l));

    // Dense depth-first bids starting at 1.
    for (std::size_t i = 0; i < buckets.size(); ++i)
      CHECK(buckets[i].bid == static_cast<int>(i) + 1);

    // Buckets from different recursion leaves cover disjoint value ranges.
    for (const auto& b1 : buckets)
      for (const auto& b2 : buckets) {
        if (b1.split_set >= b2.split_set) continue;
        auto r1 = std::minmax_element(b1.members.begin(), b1.members.end(),
                                      [](const ValuePair& a, const ValuePair& b) {
                                        return a.value < b.value;
                                      });
        auto r2 = std::minmax_element(b2.members.begin(), b2.members.end(),
                                      [](const ValuePair& a, const ValuePair& b) {
                                        return a.value < b.value;
                                      });
        bool disjoint = r1.second->value < r2.first->value ||
                        r2.second->value < r1.first->value;
        CHECK(disjoint);
      }
  }
}

TEST_CASE("local_bucketize is deterministic") {
  Rng rng(901);
  std::vector<std::int64_t> vals;
  for (int i = 0; i < 30; ++i) vals.push_back(rng.range(0, 6));
  auto vp = make_vp(vals);
  auto b1 = local_bucketize(vp, 2);
  auto b2 = local_bucketize(vp, 2);
  REQUIRE(b1.size() == b2.size());
  for (std::size_t i = 0; i < b1.size(); ++i) {
    CHECK(b1[i].bid == b2[i].bid);
    REQUIRE(b1[i].members.size() == b2[i].members.size());
    for (std::size_t j = 0; j < b1[i].members.size(); ++j)
      CHECK(b1[i].members[j] == b2[i].members[j]);
  }
}

TEST_CASE("a custom eligibility hook changes the recursion guard") {
  auto vp = make_vp({1, 2, 3, 4, 5, 6, 7, 8});
  // Default guard recurses down to pairs.
  auto fine = local_bucketize(vp, 2);
  CHECK(fine.size() == 4);

  // A hook that additionally demands at least 6 pairs stops splitting early:
  // the whole set goes to divide_buckets in one piece, so the buckets come
  // from a single recursion leaf and interleave values round-robin.
  Eligibility coarse = [](const ValuePairSet& s, int l) {
    return s.size() >= 6 && check_condition(s, l);
  };
  auto big = local_bucketize(vp, 2, coarse);
  REQUIRE(big.size() == 4);
  for (const auto& b : big) CHECK(b.split_set == big[0].split_set);
  CHECK(values_of(big[0]) == std::vector<std::int64_t>{1, 5});
  // The default guard instead produced four range-contiguous leaves.
  std::set<int> leaves;
  for (const auto& b : fine) leaves.insert(b.split_set);
  CHECK(leaves.size() == 4);
  CHECK(values_of(fine[0]) == std::vector<std::int64_t>{1, 2});

  // A hook rejecting everything makes the initial call infeasible.
  Eligibility never = [](const ValuePairSet&, int) { return false; };
  CHECK_THROWS_AS(local_bucketize(vp, 2, never), InfeasibleError);
}
