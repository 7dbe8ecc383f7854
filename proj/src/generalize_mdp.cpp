#include <algorithm>

#include "group_internal.hpp"
#include "lgb/bucketize.hpp"

namespace lgb {

namespace {

std::vector<LocalEquivalenceGroup> mdp_subset(const Table& t, const Table::Subset& s,
                                              int k) {
  std::vector<LocalEquivalenceGroup> out;
  std::vector<std::vector<std::size_t>> work{detail::rows_by_id(t, s.rows)};
  const auto need = static_cast<std::size_t>(k);

  while (!work.empty()) {
    auto set = std::move(work.back());
    work.pop_back();

    // Every working set starts from the full signature; attributes that
    // fail to split are dropped for this set only.
    std::vector<int> qi = s.attrs;
    bool split = false;
    while (!split && !qi.empty()) {
      int a = choose_dimension(t, set, qi);
      std::vector<std::int64_t> vals;
      vals.reserve(set.size());
      for (auto r : set) vals.push_back(t.cell(r, a));
      std::int64_t median = weighted_median_values(vals);

      std::vector<std::size_t> left, right;
      for (auto r : set) (t.cell(r, a) <= median ? left : right).push_back(r);
      if (left.size() >= need && right.size() >= need) {
        // Depth-first with the low side on top of the stack.
        work.push_back(std::move(right));
        work.push_back(std::move(left));
        split = true;
      } else {
        qi.erase(std::find(qi.begin(), qi.end(), a));
      }
    }
    if (!split) out.push_back(detail::make_group(t, set, s.attrs));
  }
  return out;
}

}  // namespace

std::vector<LocalEquivalenceGroup> generalize_mdp(const Table& t, int k, Exec exec) {
  return detail::run_subsets(t, k, exec, &mdp_subset);
}

}  // namespace lgb
