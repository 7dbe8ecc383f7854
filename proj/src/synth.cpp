#include "lgb/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <numeric>
#include <utility>
#include <vector>

#include "lgb/csv.hpp"
#include "lgb/errors.hpp"
#include "lgb/hierarchy.hpp"
#include "lgb/rng.hpp"

namespace lgb {
namespace {

// Root "any", intermediate groups of roughly sqrt(n) leaves, leaf labels
// "<prefix>_<rank>" so the integer codes read back from the labels.
Hierarchy grouped_tree(const std::string& prefix, int leaves) {
  std::vector<std::pair<std::string, std::string>> edges;
  int groups = std::max(1, static_cast<int>(std::lround(std::sqrt(leaves))));
  int base = leaves / groups;
  int extra = leaves % groups;
  int next = 0;
  for (int g = 0; g < groups; ++g) {
    std::string gl = prefix + "_g" + std::to_string(g);
    edges.emplace_back("any", gl);
    int size = base + (g < extra ? 1 : 0);
    for (int i = 0; i < size; ++i, ++next)
      edges.emplace_back(gl, prefix + "_" + std::to_string(next));
  }
  return Hierarchy::from_edges(edges, "<census:" + prefix + ">");
}

// Index with probability proportional to its cumulative-weight slice.
std::int64_t weighted(const std::vector<double>& cum, Rng& rng) {
  double u = rng.unit() * cum.back();
  auto it = std::upper_bound(cum.begin(), cum.end(), u);
  if (it == cum.end()) --it;
  return it - cum.begin();
}

// Cumulative weights 1/shift, 1/(shift+1), ... A small shift is sharply
// skewed (fine for QI columns); a large one caps the peak share low, which
// keeps semi-sensitive columns bucketization-feasible at high l.
std::vector<double> harmonic_cum(int n, double shift) {
  std::vector<double> cum(static_cast<std::size_t>(n));
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    acc += 1.0 / (shift + i);
    cum[static_cast<std::size_t>(i)] = acc;
  }
  return cum;
}

// Rewrites cells of column a until every support value appears, stealing
// rows from values that occur at least twice. No-op when the table is too
// small to hold the full support.
void ensure_support(std::vector<std::vector<std::int64_t>>& cells, int a,
                    const std::vector<std::int64_t>& support, Rng rng) {
  if (support.size() > cells.size()) return;
  std::map<std::int64_t, std::int64_t> count;
  for (const auto& row : cells) ++count[row[static_cast<std::size_t>(a)]];
  for (std::int64_t v : support) {
    if (count.find(v) != count.end()) continue;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      auto r = static_cast<std::size_t>(rng.below(cells.size()));
      auto& cur = cells[r][static_cast<std::size_t>(a)];
      auto it = count.find(cur);
      if (it->second >= 2) {
        --it->second;
        cur = v;
        count[v] = 1;
        break;
      }
    }
  }
}

std::vector<std::int64_t> iota_support(std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> s(static_cast<std::size_t>(hi - lo + 1));
  std::iota(s.begin(), s.end(), lo);
  return s;
}

}  // namespace

Table census_table(std::size_t rows, std::uint64_t seed, bool sex_semi,
                   double density) {
  if (rows == 0) throw ValidationError("census table needs at least one row");
  if (!(density > 0.0 && density < 1.0))
    throw ValidationError("density must lie strictly between 0 and 1");
  auto flags = static_cast<std::size_t>(std::llround(density * static_cast<double>(rows)));
  if (flags == 0 || flags >= rows)
    throw ValidationError("table of " + std::to_string(rows) +
                          " rows cannot hold a semi-sensitive share of " +
                          std::to_string(density));

  std::vector<AttributeSchema> schema(9);
  schema[0] = {"sex", Kind::Categorical,
               sex_semi ? Role::SemiSensitive : Role::QI, "", nullptr};
  schema[0].hierarchy = std::make_shared<Hierarchy>(
      Hierarchy::from_edges({{"any", "male"}, {"any", "female"}}, "<census:sex>"));
  schema[1] = {"age", Kind::Numeric, Role::SemiSensitive, "", nullptr};
  schema[2] = {"relationship", Kind::Categorical, Role::QI, "", nullptr};
  schema[2].hierarchy = std::make_shared<Hierarchy>(grouped_tree("rel", 13));
  schema[3] = {"marital_status", Kind::Categorical, Role::QI, "", nullptr};
  schema[3].hierarchy = std::make_shared<Hierarchy>(grouped_tree("mar", 6));
  schema[4] = {"race", Kind::Categorical, Role::QI, "", nullptr};
  schema[4].hierarchy = std::make_shared<Hierarchy>(grouped_tree("race", 9));
  schema[5] = {"education", Kind::Categorical, Role::QI, "", nullptr};
  schema[5].hierarchy = std::make_shared<Hierarchy>(grouped_tree("edu", 11));
  schema[6] = {"hours_per_week", Kind::Numeric, Role::QI, "", nullptr};
  schema[7] = {"occupation", Kind::Categorical, Role::SemiSensitive, "", nullptr};
  schema[7].hierarchy = std::make_shared<Hierarchy>(grouped_tree("occ", 257));
  schema[8] = {"salary", Kind::Numeric, Role::Sensitive, "", nullptr};

  const Rng root(seed);
  auto stream = [&](std::uint64_t tag) { return root.child(tag); };

  Rng r_sex = stream(0), r_age = stream(1), r_rel = stream(2), r_mar = stream(3),
      r_race = stream(4), r_edu = stream(5), r_hrs = stream(6), r_occ = stream(7),
      r_sal = stream(8);
  auto w_rel = harmonic_cum(13, 1.0);
  auto w_mar = harmonic_cum(6, 1.0);
  auto w_race = harmonic_cum(9, 1.0);
  auto w_edu = harmonic_cum(11, 1.0);
  auto w_occ = harmonic_cum(257, 40.0);

  std::vector<std::int64_t> ids(rows);
  std::iota(ids.begin(), ids.end(), 1);
  std::vector<std::vector<std::int64_t>> cells;
  cells.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    std::int64_t age = 17 + (r_age.range(0, 72) + r_age.range(0, 72)) / 2;
    std::int64_t hours = r_hrs.unit() < 0.3 ? 40 : 1 + r_hrs.range(0, 92);
    std::int64_t sal_j = (r_sal.range(0, 718) + r_sal.range(0, 718)) / 2;
    cells.push_back({static_cast<std::int64_t>(r_sex.below(2)), age,
                     weighted(w_rel, r_rel), weighted(w_mar, r_mar),
                     weighted(w_race, r_race), weighted(w_edu, r_edu), hours,
                     weighted(w_occ, r_occ), 10000 + 400 * sal_j});
  }

  ensure_support(cells, 0, iota_support(0, 1), stream(100));
  ensure_support(cells, 1, iota_support(17, 89), stream(101));
  ensure_support(cells, 2, iota_support(0, 12), stream(102));
  ensure_support(cells, 3, iota_support(0, 5), stream(103));
  ensure_support(cells, 4, iota_support(0, 8), stream(104));
  ensure_support(cells, 5, iota_support(0, 10), stream(105));
  ensure_support(cells, 6, iota_support(1, 93), stream(106));
  ensure_support(cells, 7, iota_support(0, 256), stream(107));
  std::vector<std::int64_t> sal_support(719);
  for (std::size_t j = 0; j < 719; ++j)
    sal_support[j] = 10000 + 400 * static_cast<std::int64_t>(j);
  ensure_support(cells, 8, sal_support, stream(108));

  std::vector<std::vector<std::uint8_t>> mask(rows, std::vector<std::uint8_t>(9, 0));
  for (std::size_t r = 0; r < rows; ++r) mask[r][8] = 1;

  auto flag_uniform = [&](int a, Rng rng) {
    std::vector<std::size_t> order(rows);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < flags; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.below(rows - i));
      std::swap(order[i], order[j]);
      mask[order[i]][static_cast<std::size_t>(a)] = 1;
    }
  };
  flag_uniform(1, stream(201));
  flag_uniform(7, stream(207));

  if (sex_semi) {
    // Even split between the two values keeps the flagged multiset exactly
    // 2-diverse, the best a two-valued column can do.
    std::size_t half = (flags - flags % 2) / 2;
    if (half == 0)
      throw ValidationError("table too small to flag an even number of sex cells");
    std::vector<std::size_t> strata[2];
    for (std::size_t r = 0; r < rows; ++r)
      strata[cells[r][0]].push_back(r);
    if (strata[0].size() < half || strata[1].size() < half)
      throw ValidationError("sex column too lopsided to split " +
                            std::to_string(2 * half) + " flags evenly");
    Rng rng = stream(200);
    for (auto& stratum : strata) {
      for (std::size_t i = 0; i < half; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(stratum.size() - i));
        std::swap(stratum[i], stratum[j]);
        mask[stratum[i]][0] = 1;
      }
    }
  }

  return Table::from_parts(std::move(schema), std::move(ids), std::move(cells),
                           std::move(mask));
}

void save_table(const Table& t, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::path base(dir);
  fs::create_directories(base);

  std::vector<std::vector<std::string>> data;
  std::vector<std::string> header{"id"};
  for (const auto& attr : t.schema()) header.push_back(attr.name);
  data.push_back(std::move(header));
  std::vector<std::vector<std::string>> mask;
  for (std::size_t r = 0; r < t.row_count(); ++r) {
    std::vector<std::string> line{std::to_string(t.id_at(r))};
    std::vector<std::string> flags;
    for (int a = 0; a < t.attr_count(); ++a) {
      line.push_back(t.cell_text(r, a));
      flags.push_back(t.flagged(r, a) ? "1" : "0");
    }
    data.push_back(std::move(line));
    mask.push_back(std::move(flags));
  }
  csv::write_file((base / "data.csv").string(), data);
  csv::write_file((base / "mask.csv").string(), mask);

  std::vector<std::vector<std::string>> sout;
  for (const auto& attr : t.schema()) {
    std::vector<std::string> line{attr.name, kind_name(attr.kind), role_name(attr.role)};
    if (attr.hierarchy) line.push_back("hierarchy_" + attr.name + ".csv");
    sout.push_back(std::move(line));
  }
  csv::write_file((base / "schema.csv").string(), sout);

  for (const auto& attr : t.schema()) {
    if (!attr.hierarchy) continue;
    std::vector<std::vector<std::string>> hout;
    for (const auto& [parent, child] : attr.hierarchy->edges())
      hout.push_back({parent, child});
    csv::write_file((base / ("hierarchy_" + attr.name + ".csv")).string(), hout);
  }
}

}  // namespace lgb
