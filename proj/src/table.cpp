#include "lgb/table.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>

#include "lgb/csv.hpp"
#include "lgb/errors.hpp"

namespace lgb {

std::string kind_name(Kind k) {
  return k == Kind::Numeric ? "numeric" : "categorical";
}

std::string role_name(Role r) {
  switch (r) {
    case Role::QI: return "qi";
    case Role::SemiSensitive: return "semi-sensitive";
    default: return "sensitive";
  }
}

Kind parse_kind(const std::string& s) {
  if (s == "numeric") return Kind::Numeric;
  if (s == "categorical") return Kind::Categorical;
  throw ValidationError("unknown attribute kind '" + s + "' (expected numeric or categorical)");
}

Role parse_role(const std::string& s) {
  if (s == "qi") return Role::QI;
  if (s == "semi-sensitive") return Role::SemiSensitive;
  if (s == "sensitive") return Role::Sensitive;
  throw ValidationError("unknown role '" + s + "' (expected qi, semi-sensitive or sensitive)");
}

namespace {

bool is_bucket_token(const std::string& s) {
  if (s.size() < 2 || s[0] != 'B') return false;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

}  // namespace

std::vector<AttributeSchema> load_schema(const std::string& schema_path) {
  std::ifstream in(schema_path);
  if (!in) throw ValidationError("cannot open file: " + schema_path);
  std::filesystem::path base = std::filesystem::path(schema_path).parent_path();

  std::vector<AttributeSchema> schema;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = csv::strip_cr(line);
    if (line.empty()) continue;
    auto fields = csv::split_line(line);
    std::string at = schema_path + ":" + std::to_string(lineno);
    if (fields.size() < 3 || fields.size() > 4)
      throw ValidationError(at + ": expected `name,kind,role[,hierarchy-file]`");
    AttributeSchema a;
    a.name = fields[0];
    if (a.name.empty()) throw ValidationError(at + ": empty attribute name");
    if (a.name == "id") throw ValidationError(at + ": 'id' is reserved for the row identifier");
    a.kind = parse_kind(fields[1]);
    a.role = parse_role(fields[2]);
    if (fields.size() == 4 && !fields[3].empty()) {
      if (a.kind == Kind::Numeric)
        throw ValidationError(at + ": hierarchy given for numeric attribute '" + a.name + "'");
      a.hierarchy_ref = fields[3];
      a.hierarchy = std::make_shared<Hierarchy>(Hierarchy::load((base / fields[3]).string()));
    }
    for (const auto& prev : schema)
      if (prev.name == a.name)
        throw ValidationError(at + ": duplicate attribute name '" + a.name + "'");
    schema.push_back(std::move(a));
  }
  if (schema.empty()) throw ValidationError(schema_path + ": no attributes");
  return schema;
}

Table Table::load(const std::string& data_path, const std::string& mask_path,
                  const std::string& schema_path) {
  Table t;
  t.schema_ = load_schema(schema_path);
  const int na = t.attr_count();

  auto data = csv::read_file(data_path);
  if (data.size() < 2) throw ValidationError(data_path + ": no data rows");
  const auto& header = data[0];
  if (header.size() != static_cast<std::size_t>(na) + 1)
    throw ValidationError(data_path + ":1: header has " + std::to_string(header.size()) +
                          " columns, schema expects " + std::to_string(na + 1));
  if (header[0] != "id")
    throw ValidationError(data_path + ":1: first column must be 'id', got '" + header[0] + "'");
  for (int a = 0; a < na; ++a) {
    if (header[static_cast<std::size_t>(a) + 1] != t.schema_[static_cast<std::size_t>(a)].name)
      throw ValidationError(data_path + ":1: column " + std::to_string(a + 2) + " is '" +
                            header[static_cast<std::size_t>(a) + 1] + "', schema says '" +
                            t.schema_[static_cast<std::size_t>(a)].name + "'");
  }

  const std::size_t nrows = data.size() - 1;
  t.ids_.reserve(nrows);
  t.cells_.reserve(nrows);

  // Distinct observed values per categorical attribute without a supplied
  // hierarchy; a flat one is generated over them (sorted, so the leaf order
  // does not depend on row order).
  std::vector<std::vector<std::string>> pending(static_cast<std::size_t>(na));

  for (std::size_t r = 1; r < data.size(); ++r) {
    const auto& row = data[r];
    std::string at = data_path + ":" + std::to_string(r + 1);
    std::int64_t id = csv::to_int(row[0], at + ", column id");
    if (id <= 0) throw ValidationError(at + ": row id must be positive, got " + row[0]);
    if (!t.row_by_id_.emplace(id, t.ids_.size()).second)
      throw ValidationError(at + ": duplicate row id " + row[0]);
    t.ids_.push_back(id);

    std::vector<std::int64_t> cells(static_cast<std::size_t>(na));
    for (int a = 0; a < na; ++a) {
      const auto& attr = t.schema_[static_cast<std::size_t>(a)];
      const std::string& v = row[static_cast<std::size_t>(a) + 1];
      std::string ctx = at + ", column '" + attr.name + "'";
      if (v.empty()) throw ValidationError(ctx + ": missing value");
      if (attr.kind == Kind::Numeric) {
        cells[static_cast<std::size_t>(a)] = csv::to_int(v, ctx);
      } else if (attr.hierarchy) {
        int idx = attr.hierarchy->index_of(v);
        if (idx < 0 || !attr.hierarchy->is_leaf(idx))
          throw ValidationError(ctx + ": value '" + v + "' is not a leaf of hierarchy " +
                                attr.hierarchy_ref);
        cells[static_cast<std::size_t>(a)] = attr.hierarchy->node(idx).first_leaf;
      } else {
        pending[static_cast<std::size_t>(a)].push_back(v);
        cells[static_cast<std::size_t>(a)] = -1;  // encoded after the flat hierarchy exists
      }
    }
    t.cells_.push_back(std::move(cells));
  }

  for (int a = 0; a < na; ++a) {
    auto& attr = t.schema_[static_cast<std::size_t>(a)];
    if (attr.kind != Kind::Categorical || attr.hierarchy) continue;
    auto& vals = pending[static_cast<std::size_t>(a)];
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    attr.hierarchy = std::make_shared<Hierarchy>(Hierarchy::flat(vals));
    for (std::size_t r = 1; r < data.size(); ++r) {
      const std::string& v = data[r][static_cast<std::size_t>(a) + 1];
      t.cells_[r - 1][static_cast<std::size_t>(a)] = attr.hierarchy->leaf_rank(v);
    }
  }

  auto mrows = csv::read_file(mask_path);
  if (mrows.size() != nrows)
    throw ValidationError(mask_path + ": " + std::to_string(mrows.size()) +
                          " rows, data has " + std::to_string(nrows));
  t.mask_.reserve(nrows);
  for (std::size_t r = 0; r < mrows.size(); ++r) {
    if (mrows[r].size() != static_cast<std::size_t>(na))
      throw ValidationError(mask_path + ":" + std::to_string(r + 1) + ": expected " +
                            std::to_string(na) + " columns, got " +
                            std::to_string(mrows[r].size()));
    std::vector<std::uint8_t> flags(static_cast<std::size_t>(na));
    for (int a = 0; a < na; ++a) {
      const std::string& v = mrows[r][static_cast<std::size_t>(a)];
      if (v != "0" && v != "1")
        throw ValidationError(mask_path + ":" + std::to_string(r + 1) + ", column " +
                              std::to_string(a + 1) + ": mask cells must be 0 or 1, got '" +
                              v + "'");
      flags[static_cast<std::size_t>(a)] = v == "1" ? 1 : 0;
    }
    t.mask_.push_back(std::move(flags));
  }

  t.finish_validation(data_path, mask_path);
  t.compute_domain();
  return t;
}

Table Table::from_parts(std::vector<AttributeSchema> schema,
                        std::vector<std::int64_t> ids,
                        std::vector<std::vector<std::int64_t>> cells,
                        std::vector<std::vector<std::uint8_t>> mask) {
  Table t;
  t.schema_ = std::move(schema);
  t.ids_ = std::move(ids);
  t.cells_ = std::move(cells);
  t.mask_ = std::move(mask);
  if (t.schema_.empty()) throw ValidationError("table with no attributes");
  if (t.ids_.empty()) throw ValidationError("table with no rows");
  if (t.cells_.size() != t.ids_.size() || t.mask_.size() != t.ids_.size())
    throw ValidationError("rows, cells and mask sizes differ");
  const std::size_t na = t.schema_.size();
  for (std::size_t r = 0; r < t.ids_.size(); ++r) {
    if (t.ids_[r] <= 0) throw ValidationError("row id must be positive");
    if (!t.row_by_id_.emplace(t.ids_[r], r).second)
      throw ValidationError("duplicate row id " + std::to_string(t.ids_[r]));
    if (t.cells_[r].size() != na || t.mask_[r].size() != na)
      throw ValidationError("row " + std::to_string(t.ids_[r]) + " has wrong width");
  }
  for (std::size_t a = 0; a < na; ++a) {
    const auto& attr = t.schema_[a];
    if (attr.kind == Kind::Categorical) {
      if (!attr.hierarchy)
        throw ValidationError("categorical attribute '" + attr.name + "' without hierarchy");
      for (std::size_t r = 0; r < t.ids_.size(); ++r) {
        std::int64_t c = t.cells_[r][a];
        if (c < 0 || c >= attr.hierarchy->leaf_count())
          throw ValidationError("attribute '" + attr.name + "': leaf code " +
                                std::to_string(c) + " out of range");
      }
    }
  }
  t.finish_validation("<memory>", "<memory>");
  t.compute_domain();
  return t;
}

void Table::finish_validation(const std::string& data_origin,
                              const std::string& mask_origin) {
  const std::size_t na = schema_.size();
  for (std::size_t a = 0; a < na; ++a) {
    const auto& attr = schema_[a];
    std::size_t flags = 0;
    std::size_t first_flag = 0, first_clear = 0;
    bool any_flag = false, any_clear = false;
    for (std::size_t r = 0; r < mask_.size(); ++r) {
      if (mask_[r][a]) {
        ++flags;
        if (!any_flag) { any_flag = true; first_flag = r; }
      } else if (!any_clear) {
        any_clear = true;
        first_clear = r;
      }
    }
    auto coord = [&](std::size_t r) {
      return mask_origin + ":" + std::to_string(r + 1) + ", column " + std::to_string(a + 1) +
             " ('" + attr.name + "')";
    };
    if (attr.role == Role::QI && flags > 0)
      throw ValidationError(coord(first_flag) +
                            ": flagged cell contradicts role hint qi");
    if (attr.role == Role::Sensitive && flags < mask_.size())
      throw ValidationError(coord(first_clear) +
                            ": unflagged cell contradicts role hint sensitive");
    if (attr.role == Role::SemiSensitive) {
      if (flags == 0)
        throw ValidationError(data_origin + ": column '" + attr.name +
                              "' hinted semi-sensitive but no cell is flagged");
      if (flags == mask_.size())
        throw ValidationError(data_origin + ": column '" + attr.name +
                              "' hinted semi-sensitive but every cell is flagged");
    }
    // Flagged values of this column are published as bucket references
    // (B<number>), so its category labels must not look like one.
    if (attr.kind == Kind::Categorical && attr.role != Role::QI) {
      for (int i = 0; i < attr.hierarchy->size(); ++i) {
        const auto& label = attr.hierarchy->node(i).label;
        if (is_bucket_token(label))
          throw ValidationError("hierarchy for '" + attr.name + "': label '" + label +
                                "' collides with bucket references; rename it");
      }
    }
  }
}

void Table::compute_domain() {
  domain_.attrs.assign(schema_.size(), DomainStats::Attr{});
  for (std::size_t a = 0; a < schema_.size(); ++a) {
    auto& d = domain_.attrs[a];
    if (schema_[a].kind == Kind::Categorical) {
      d.domain_size = schema_[a].hierarchy->leaf_count();
      continue;
    }
    d.lo = d.hi = cells_[0][a];
    for (std::size_t r = 1; r < cells_.size(); ++r) {
      d.lo = std::min(d.lo, cells_[r][a]);
      d.hi = std::max(d.hi, cells_[r][a]);
    }
    d.range = d.hi - d.lo;
  }
}

int Table::attr_index(const std::string& name) const {
  for (int a = 0; a < attr_count(); ++a)
    if (schema_[static_cast<std::size_t>(a)].name == name) return a;
  return -1;
}

std::size_t Table::row_of_id(std::int64_t id) const {
  auto it = row_by_id_.find(id);
  if (it == row_by_id_.end())
    throw ValidationError("unknown tuple id " + std::to_string(id));
  return it->second;
}

std::string Table::cell_text(std::size_t row, int a) const {
  const auto& attr = schema_[static_cast<std::size_t>(a)];
  std::int64_t c = cell(row, a);
  if (attr.kind == Kind::Numeric) return std::to_string(c);
  return attr.hierarchy->node(attr.hierarchy->leaf_node(static_cast<int>(c))).label;
}

std::vector<int> Table::signature_of_row(std::size_t row) const {
  std::vector<int> out;
  for (int a = 0; a < attr_count(); ++a)
    if (!flagged(row, a)) out.push_back(a);
  return out;
}

std::vector<std::string> Table::qi_signature(std::int64_t tuple_id) const {
  std::size_t row = row_of_id(tuple_id);
  std::vector<std::string> names;
  for (int a : signature_of_row(row)) names.push_back(attr(a).name);
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<Table::Subset> Table::qi_partition() const {
  std::map<std::vector<std::uint8_t>, std::vector<std::size_t>> by_pattern;
  for (std::size_t r = 0; r < row_count(); ++r) by_pattern[mask_[r]].push_back(r);

  std::vector<std::pair<std::vector<std::string>, Subset>> keyed;
  keyed.reserve(by_pattern.size());
  for (auto& [pattern, rows] : by_pattern) {
    Subset s;
    std::vector<std::string> names;
    for (int a = 0; a < attr_count(); ++a) {
      if (!pattern[static_cast<std::size_t>(a)]) {
        s.attrs.push_back(a);
        names.push_back(attr(a).name);
      }
    }
    std::sort(names.begin(), names.end());
    s.rows = std::move(rows);
    keyed.emplace_back(std::move(names), std::move(s));
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<Subset> out;
  out.reserve(keyed.size());
  for (auto& [names, s] : keyed) out.push_back(std::move(s));
  return out;
}

Table Table::with_mask(std::vector<std::vector<std::uint8_t>> new_mask) const {
  Table t;
  t.schema_ = schema_;
  t.ids_ = ids_;
  t.cells_ = cells_;
  t.mask_ = std::move(new_mask);
  t.row_by_id_ = row_by_id_;
  if (t.mask_.size() != t.ids_.size())
    throw ValidationError("mask row count differs from table");
  for (std::size_t r = 0; r < t.mask_.size(); ++r)
    if (t.mask_[r].size() != schema_.size())
      throw ValidationError("mask width differs from schema");
  for (std::size_t a = 0; a < t.schema_.size(); ++a) {
    std::size_t flags = 0;
    for (std::size_t r = 0; r < t.mask_.size(); ++r) flags += t.mask_[r][a];
    auto& attr = t.schema_[a];
    if (flags == 0)
      attr.role = Role::QI;
    else if (flags == t.mask_.size())
      attr.role = Role::Sensitive;
    else
      attr.role = Role::SemiSensitive;
  }
  t.finish_validation("<remask>", "<remask>");
  t.compute_domain();
  return t;
}

}  // namespace lgb
