#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lgb/exec.hpp"
#include "lgb/group.hpp"
#include "lgb/table.hpp"

namespace lgb {

struct Params {
  int k = 1;
  int l = 1;
  Mode mode = Mode::MDP;
  std::uint64_t seed = 0;

  bool operator==(const Params& o) const {
    return k == o.k && l == o.l && mode == o.mode && seed == o.seed;
  }
};

/// Anonymized release: per-tuple generalized QI cells plus bucket references
/// for every flagged cell, and the severed per-attribute buckets (value
/// multisets with the tuple linkage removed).
struct PublishedTable {
  struct Cell {
    int bid = 0;          // > 0: reference into the attribute's buckets
    GeneralizedValue g;   // meaningful only when bid == 0

    bool bucketed() const { return bid > 0; }
    bool operator==(const Cell& o) const { return bid == o.bid && g == o.g; }
  };
  struct Row {
    std::int64_t id = 0;
    int gid = 0;
    std::vector<Cell> cells;  // one per schema attribute
  };
  struct Bucket {
    int bid = 0;
    std::vector<std::int64_t> values;  // sorted multiset; no member order kept

    bool operator==(const Bucket& o) const { return bid == o.bid && values == o.values; }
  };

  std::vector<AttributeSchema> schema;
  DomainStats domain;                        // frozen from the source table
  std::vector<Row> rows;                     // ascending by id
  std::vector<std::vector<Bucket>> buckets;  // per attribute, BIDs ascending
  std::vector<LocalEquivalenceGroup> groups; // derivable from rows, kept handy
  Params params;

  int attr_index(const std::string& name) const;
  const Row& row_of_id(std::int64_t id) const;
  const Bucket& bucket_of(int attr, int bid) const;
};

/// Buckets the flagged cells of every attribute at diversity l, generalizes
/// the unflagged cells at anonymity k, then splices the two into one
/// release. The two protections never see each other's parameter.
PublishedTable anonymize(const Table& t, int k, int l, Mode mode,
                         std::uint64_t seed = 0, Exec exec = Exec::Serial);

/// Writes published.csv, one buckets_<attr>.csv per attribute, params.json,
/// plus schema.csv and hierarchy files so the directory is self-contained.
/// Intervals render as `[lo-hi]`, categories as labels, references as `B<j>`.
void serialize(const PublishedTable& pub, const std::string& dir);

/// Reads back a directory written by serialize (or a hand-written one with
/// the same shape). Cell codes, groups and params survive the trip exactly.
PublishedTable deserialize(const std::string& dir);

}  // namespace lgb
