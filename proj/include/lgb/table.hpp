#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "lgb/hierarchy.hpp"

namespace lgb {

enum class Kind { Numeric, Categorical };
enum class Role { QI, SemiSensitive, Sensitive };

std::string kind_name(Kind k);
std::string role_name(Role r);
Kind parse_kind(const std::string& s);
Role parse_role(const std::string& s);

struct AttributeSchema {
  std::string name;
  Kind kind = Kind::Numeric;
  Role role = Role::QI;
  std::string hierarchy_ref;  // file name as written in the schema, "" if none
  std::shared_ptr<const Hierarchy> hierarchy;  // set for every categorical attribute
};

/// Parses a `name,kind,role[,hierarchy-file]` schema CSV; hierarchy paths
/// resolve relative to the schema file's directory.
std::vector<AttributeSchema> load_schema(const std::string& schema_path);

/// Per-attribute statistics over the whole table, fixed before any
/// partitioning so information-loss denominators do not drift per group.
struct DomainStats {
  struct Attr {
    std::int64_t lo = 0;          // numeric: observed min
    std::int64_t hi = 0;          // numeric: observed max
    std::int64_t range = 0;       // numeric: hi - lo
    std::int64_t domain_size = 0; // categorical: hierarchy leaf count
  };
  std::vector<Attr> attrs;
};

/// Microdata with per-cell sensitivity flags. Cells are stored as int64
/// codes: numeric cells hold the value itself, categorical cells hold the
/// pre-order leaf rank in the attribute's hierarchy. Immutable after load.
class Table {
 public:
  /// Data CSV has a header (`id` first), the mask CSV is headerless 0/1 of
  /// the same shape minus the id column, the schema file has one
  /// `name,kind,role[,hierarchy-file]` line per attribute. Hierarchy paths
  /// resolve relative to the schema file's directory.
  static Table load(const std::string& data_path, const std::string& mask_path,
                    const std::string& schema_path);

  /// Assemble from in-memory parts (synthetic data, tests). Runs the same
  /// validation as load.
  static Table from_parts(std::vector<AttributeSchema> schema,
                          std::vector<std::int64_t> ids,
                          std::vector<std::vector<std::int64_t>> cells,
                          std::vector<std::vector<std::uint8_t>> mask);

  int attr_count() const { return static_cast<int>(schema_.size()); }
  std::size_t row_count() const { return ids_.size(); }
  const std::vector<AttributeSchema>& schema() const { return schema_; }
  const AttributeSchema& attr(int a) const { return schema_[static_cast<std::size_t>(a)]; }
  int attr_index(const std::string& name) const;

  std::int64_t id_at(std::size_t row) const { return ids_[row]; }
  /// Row index of a tuple id; throws ValidationError if unknown.
  std::size_t row_of_id(std::int64_t id) const;
  bool has_id(std::int64_t id) const { return row_by_id_.count(id) > 0; }

  std::int64_t cell(std::size_t row, int a) const {
    return cells_[row][static_cast<std::size_t>(a)];
  }
  bool flagged(std::size_t row, int a) const {
    return mask_[row][static_cast<std::size_t>(a)] != 0;
  }
  const std::vector<std::vector<std::uint8_t>>& mask() const { return mask_; }

  /// Human-readable cell value (hierarchy label for categorical).
  std::string cell_text(std::size_t row, int a) const;

  /// Attribute indices (schema order) whose cell is unflagged for this row.
  std::vector<int> signature_of_row(std::size_t row) const;
  /// Spec-facing variant: sorted attribute names, addressed by tuple id.
  std::vector<std::string> qi_signature(std::int64_t tuple_id) const;

  struct Subset {
    std::vector<int> attrs;  // shared signature, schema order
    std::vector<std::size_t> rows;
  };
  /// Groups rows by QI signature. Subsets are ordered by the sorted
  /// attribute-name list of their signature; rows keep table order.
  std::vector<Subset> qi_partition() const;

  const DomainStats& domain() const { return domain_; }

  /// Same data under a different mask. Roles are re-derived from the new
  /// mask; column counts of flags decide qi / semi-sensitive / sensitive.
  Table with_mask(std::vector<std::vector<std::uint8_t>> new_mask) const;

 private:
  Table() = default;
  void finish_validation(const std::string& data_origin,
                         const std::string& mask_origin);
  void compute_domain();

  std::vector<AttributeSchema> schema_;
  std::vector<std::int64_t> ids_;
  std::vector<std::vector<std::int64_t>> cells_;
  std::vector<std::vector<std::uint8_t>> mask_;
  std::unordered_map<std::int64_t, std::size_t> row_by_id_;
  DomainStats domain_;
};

}  // namespace lgb
