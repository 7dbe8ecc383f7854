#pragma once

#include <functional>
#include <vector>

#include "lgb/group.hpp"
#include "lgb/table.hpp"

namespace lgb {
namespace detail {

/// Subset rows in ascending tuple-id order (worklists keep this invariant).
std::vector<std::size_t> rows_by_id(const Table& t, const std::vector<std::size_t>& rows);

/// Emits one group over the given rows: members sorted by id, one
/// generalized value per signature attribute. gid left unassigned.
LocalEquivalenceGroup make_group(const Table& t, const std::vector<std::size_t>& rows,
                                 const std::vector<int>& attrs);

/// Per-subset worker; returns the subset's groups in emission order.
using SubsetFn = std::function<std::vector<LocalEquivalenceGroup>(
    const Table&, const Table::Subset&, int)>;

/// Checks subset sizes against k, then runs the worker over every subset
/// (serially or via OpenMP) and concatenates in canonical subset order,
/// assigning gids 1..G. The two execution policies give identical output.
std::vector<LocalEquivalenceGroup> run_subsets(const Table& t, int k, Exec exec,
                                               const SubsetFn& per_subset);

}  // namespace detail
}  // namespace lgb
