#include <algorithm>

#include "group_internal.hpp"
#include "lgb/errors.hpp"
#include "lgb/generalize.hpp"

namespace lgb {

std::string mode_name(Mode m) { return m == Mode::MDP ? "mdp" : "ncp"; }

Mode parse_mode(const std::string& s) {
  if (s == "mdp") return Mode::MDP;
  if (s == "ncp") return Mode::NCP;
  throw ValidationError("unknown generalizer mode '" + s + "' (expected mdp or ncp)");
}

int choose_dimension(const Table& t, const std::vector<std::size_t>& rows,
                     const std::vector<int>& qi_set) {
  if (qi_set.empty()) throw ValidationError("choose_dimension with empty attribute set");
  int best = -1;
  Rational best_spread(0);
  for (int a : qi_set) {
    const auto& attr = t.attr(a);
    const auto& dom = t.domain().attrs[static_cast<std::size_t>(a)];
    Rational spread;
    if (attr.kind == Kind::Numeric) {
      if (dom.range != 0) {
        std::int64_t lo = t.cell(rows[0], a), hi = lo;
        for (auto r : rows) {
          lo = std::min(lo, t.cell(r, a));
          hi = std::max(hi, t.cell(r, a));
        }
        spread = Rational(hi - lo, dom.range);
      }
    } else {
      std::vector<std::int64_t> vals;
      for (auto r : rows) vals.push_back(t.cell(r, a));
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      spread = Rational(static_cast<std::int64_t>(vals.size()), dom.domain_size);
    }
    if (best < 0 || spread > best_spread ||
        (spread == best_spread && attr.name < t.attr(best).name)) {
      best = a;
      best_spread = spread;
    }
  }
  return best;
}

Rational pair_ncp(const Table& t, std::int64_t id1, std::int64_t id2,
                  const std::vector<int>& qi_set) {
  std::size_t r1 = t.row_of_id(id1), r2 = t.row_of_id(id2);
  if (t.signature_of_row(r1) != qi_set || t.signature_of_row(r2) != qi_set)
    throw ValidationError("pair_ncp: tuples " + std::to_string(id1) + ", " +
                          std::to_string(id2) + " do not share the given signature");
  Rational sum;
  for (int a : qi_set) {
    auto g = generalize_values(t.attr(a), {t.cell(r1, a), t.cell(r2, a)});
    sum += ncp_cell(t.attr(a), g, t.domain().attrs[static_cast<std::size_t>(a)]);
  }
  return sum;
}

namespace detail {

std::vector<std::size_t> rows_by_id(const Table& t, const std::vector<std::size_t>& rows) {
  auto out = rows;
  std::sort(out.begin(), out.end(),
            [&](std::size_t a, std::size_t b) { return t.id_at(a) < t.id_at(b); });
  return out;
}

LocalEquivalenceGroup make_group(const Table& t, const std::vector<std::size_t>& rows,
                                 const std::vector<int>& attrs) {
  LocalEquivalenceGroup g;
  for (auto r : rows) g.member_ids.push_back(t.id_at(r));
  std::sort(g.member_ids.begin(), g.member_ids.end());
  g.attrs = attrs;
  for (int a : attrs) {
    std::vector<std::int64_t> vals;
    vals.reserve(rows.size());
    for (auto r : rows) vals.push_back(t.cell(r, a));
    g.generalized.push_back(generalize_values(t.attr(a), vals));
  }
  return g;
}

namespace {

std::string signature_names(const Table& t, const std::vector<int>& attrs) {
  std::vector<std::string> names;
  for (int a : attrs) names.push_back(t.attr(a).name);
  std::sort(names.begin(), names.end());
  std::string out = "{";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += names[i];
  }
  return out + "}";
}

}  // namespace

std::vector<LocalEquivalenceGroup> run_subsets(const Table& t, int k, Exec exec,
                                               const SubsetFn& per_subset) {
  if (k < 1) throw ValidationError("k must be at least 1");
  auto subsets = t.qi_partition();
  for (const auto& s : subsets) {
    if (s.rows.size() < static_cast<std::size_t>(k))
      throw InfeasibleError("QI subset " + signature_names(t, s.attrs) + " has " +
                            std::to_string(s.rows.size()) +
                            " tuples; cannot form a group of k=" + std::to_string(k));
  }

  std::vector<std::vector<LocalEquivalenceGroup>> slots(subsets.size());
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < subsets.size(); ++i)
      slots[i] = per_subset(t, subsets[i], k);
  } else {
    std::exception_ptr first_error;
#ifdef LGB_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::size_t i = 0; i < subsets.size(); ++i) {
      try {
        slots[i] = per_subset(t, subsets[i], k);
      } catch (...) {
#ifdef LGB_HAVE_OPENMP
#pragma omp critical
#endif
        if (!first_error) first_error = std::current_exception();
      }
    }
    if (first_error) std::rethrow_exception(first_error);
  }

  std::vector<LocalEquivalenceGroup> out;
  int gid = 1;
  for (auto& slot : slots)
    for (auto& g : slot) {
      g.gid = gid++;
      out.push_back(std::move(g));
    }
  return out;
}

}  // namespace detail

std::vector<LocalEquivalenceGroup> generalize_groups(const Table& t, int k, Mode mode,
                                                     Exec exec) {
  return mode == Mode::MDP ? generalize_mdp(t, k, exec) : generalize_ncp(t, k, exec);
}

}  // namespace lgb
