#pragma once

#include <cstdint>
#include <string>

#include "lgb/table.hpp"

namespace lgb {

/// Deterministic census-like benchmark table: nine columns shaped like a
/// US-census extract (sex 2, age 73, relationship 13, marital-status 6,
/// race 9, education 11, hours-per-week 93, occupation 257 and salary 719
/// distinct values). Relationship, marital status, race, education and
/// hours are QI; age and occupation are semi-sensitive with a uniform
/// `density` share of flagged cells; salary is sensitive. The two-valued
/// sex column can never be l-diverse past l=2, so sex_semi=true (default)
/// keeps it semi-sensitive with its flags split exactly evenly between the
/// two values, and sex_semi=false publishes it as QI for runs that push l
/// higher. Columns reach their nominal distinct counts whenever the table
/// has at least that many rows.
Table census_table(std::size_t rows, std::uint64_t seed, bool sex_semi = true,
                   double density = 0.2);

/// Writes data.csv, mask.csv, schema.csv and one hierarchy_<attr>.csv per
/// categorical column, so the directory loads back with Table::load.
void save_table(const Table& t, const std::string& dir);

}  // namespace lgb
