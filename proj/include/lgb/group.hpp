#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lgb/exec.hpp"
#include "lgb/generalize.hpp"
#include "lgb/table.hpp"

namespace lgb {

/// k-anonymous group within one QI-signature subset: members plus one
/// generalized value per signature attribute.
struct LocalEquivalenceGroup {
  int gid = 0;
  std::vector<std::int64_t> member_ids;       // ascending
  std::vector<int> attrs;                     // signature, schema order
  std::vector<GeneralizedValue> generalized;  // parallel to attrs

  const GeneralizedValue* find(int attr) const {
    for (std::size_t i = 0; i < attrs.size(); ++i)
      if (attrs[i] == attr) return &generalized[i];
    return nullptr;
  }
};

enum class Mode { MDP, NCP };

std::string mode_name(Mode m);
Mode parse_mode(const std::string& s);

/// Local generalization by recursive multi-dimensional median splits
/// (accept a split only when both sides keep k or more members).
std::vector<LocalEquivalenceGroup> generalize_mdp(const Table& t, int k,
                                                  Exec exec = Exec::Serial);

/// Local generalization by greedy top-down bisection: seeds far apart in
/// pair-NCP, members join the side whose group NCP increases least, sets
/// below 2k emitted.
std::vector<LocalEquivalenceGroup> generalize_ncp(const Table& t, int k,
                                                  Exec exec = Exec::Serial);

std::vector<LocalEquivalenceGroup> generalize_groups(const Table& t, int k, Mode mode,
                                                     Exec exec = Exec::Serial);

/// Attribute of qi_set with the widest normalized spread over the rows;
/// ties broken by attribute name.
int choose_dimension(const Table& t, const std::vector<std::size_t>& rows,
                     const std::vector<int>& qi_set);

/// NCP of the two-row group over qi_set, exact. Validates that both tuples
/// carry exactly this signature.
Rational pair_ncp(const Table& t, std::int64_t id1, std::int64_t id2,
                  const std::vector<int>& qi_set);

/// Far pair by repeated farthest-neighbor hops from the minimal id.
std::pair<std::int64_t, std::int64_t> find_seeds(const Table& t,
                                                 const std::vector<std::int64_t>& ids,
                                                 const std::vector<int>& qi_set);

/// Splits ids between the two seeds. Both sides start as their seed and
/// grow in ascending id order; each tuple joins the side whose group NCP
/// increases least by absorbing it, current members paying the widening and
/// the newcomer paying the widened group's width (ties: emptier side, then
/// sd1's side).
std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> divide_table(
    const Table& t, const std::vector<std::int64_t>& ids, std::int64_t sd1,
    std::int64_t sd2, const std::vector<int>& qi_set);

}  // namespace lgb
