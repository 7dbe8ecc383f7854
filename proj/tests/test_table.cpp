#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "lgb/errors.hpp"
#include "lgb/rng.hpp"
#include "lgb/table.hpp"
#include "helpers.hpp"

using lgb::Kind;
using lgb::Role;
using lgb::Rng;
using lgb::Table;
using lgb::ValidationError;

namespace {

Table load_clinic() {
  return Table::load(testutil::fixture("data/clinic/data.csv"),
                     testutil::fixture("data/clinic/mask.csv"),
                     testutil::fixture("data/clinic/schema.csv"));
}

std::vector<std::int64_t> ids_of(const Table& t, const std::vector<std::size_t>& rows) {
  std::vector<std::int64_t> out;
  for (auto r : rows) out.push_back(t.id_at(r));
  return out;
}

}  // namespace

TEST_CASE("clinic fixture loads with two semi-sensitive attributes") {
  auto t = load_clinic();
  CHECK(t.row_count() == 8);
  CHECK(t.attr_count() == 4);
  CHECK(t.attr(0).role == Role::SemiSensitive);  // age
  CHECK(t.attr(1).role == Role::QI);             // gender
  CHECK(t.attr(2).role == Role::SemiSensitive);  // zipcode
  CHECK(t.attr(3).role == Role::Sensitive);      // disease
  CHECK(t.attr(0).kind == Kind::Numeric);
  CHECK(t.attr(3).kind == Kind::Categorical);

  CHECK(t.cell(t.row_of_id(1004), 0) == 24);
  CHECK(t.cell_text(t.row_of_id(1001), 3) == "flu");
  CHECK(t.flagged(t.row_of_id(1001), 2));       // zip flagged for 1001
  CHECK_FALSE(t.flagged(t.row_of_id(1003), 2)); // zip public for 1003

  const auto& d = t.domain();
  CHECK(d.attrs[0].lo == 24);
  CHECK(d.attrs[0].hi == 47);
  CHECK(d.attrs[0].range == 23);
  CHECK(d.attrs[1].domain_size == 2);
  CHECK(d.attrs[3].domain_size == 5);
}

TEST_CASE("qi signatures follow the mask") {
  auto t = load_clinic();
  // 1002 keeps age public even though zip code and disease are private.
  auto sig = t.qi_signature(1002);
  CHECK(sig == std::vector<std::string>{"age", "gender"});
  auto sig3 = t.qi_signature(1003);
  CHECK(sig3 == std::vector<std::string>{"age", "gender", "zipcode"});
  CHECK_THROWS_AS(t.qi_signature(9999), ValidationError);
}

TEST_CASE("qi partition of the clinic fixture") {
  auto t = load_clinic();
  auto parts = t.qi_partition();
  REQUIRE(parts.size() == 3);
  // Canonical order sorts by the attribute-name lists of the signatures:
  // {age,gender} < {age,gender,zipcode} < {gender,zipcode}.
  CHECK(ids_of(t, parts[0].rows) == std::vector<std::int64_t>{1001, 1002});
  CHECK(ids_of(t, parts[1].rows) == std::vector<std::int64_t>{1003, 1006});
  CHECK(ids_of(t, parts[2].rows) == std::vector<std::int64_t>{1004, 1005, 1007, 1008});
  CHECK(parts[0].attrs == std::vector<int>{0, 1});
  CHECK(parts[1].attrs == std::vector<int>{0, 1, 2});
  CHECK(parts[2].attrs == std::vector<int>{1, 2});
}

TEST_CASE("all-clear and all-set mask rows") {
  testutil::TempDir tmp;
  auto data = tmp.file("d.csv", "id,a,b\n1,10,x\n2,20,y\n3,30,x\n");
  auto schema = tmp.file("s.csv", "a,numeric,qi\nb,categorical,qi\n");
  auto mask = tmp.file("m.csv", "0,0\n0,0\n0,0\n");
  auto t = Table::load(data, mask, schema);
  CHECK(t.qi_signature(1) == std::vector<std::string>{"a", "b"});
  CHECK(t.qi_partition().size() == 1);
  CHECK(t.qi_partition()[0].rows.size() == 3);

  auto schema2 = tmp.file("s2.csv", "a,numeric,semi-sensitive\nb,categorical,semi-sensitive\n");
  auto mask2 = tmp.file("m2.csv", "1,1\n0,0\n0,1\n");
  auto t2 = Table::load(data, mask2, schema2);
  CHECK(t2.qi_signature(1).empty());  // fully flagged row forms its own class
  auto parts = t2.qi_partition();
  REQUIRE(parts.size() == 3);
  CHECK(parts[0].attrs.empty());  // empty signature sorts first
}

TEST_CASE("role hints are validated against the mask") {
  testutil::TempDir tmp;
  auto data = tmp.file("d.csv", "id,a\n1,10\n2,20\n");
  // Fully flagged column accepted as sensitive, rejected as qi.
  auto mask_full = tmp.file("m1.csv", "1\n1\n");
  auto ok = Table::load(data, mask_full, tmp.file("s1.csv", "a,numeric,sensitive\n"));
  CHECK(ok.attr(0).role == Role::Sensitive);
  CHECK_THROWS_WITH_AS(Table::load(data, mask_full, tmp.file("s2.csv", "a,numeric,qi\n")),
                       doctest::Contains("contradicts role hint qi"), ValidationError);
  auto mask_none = tmp.file("m2.csv", "0\n0\n");
  CHECK_THROWS_WITH_AS(Table::load(data, mask_none, tmp.file("s3.csv", "a,numeric,sensitive\n")),
                       doctest::Contains("contradicts role hint sensitive"), ValidationError);
  CHECK_THROWS_AS(Table::load(data, mask_none, tmp.file("s4.csv", "a,numeric,semi-sensitive\n")),
                  ValidationError);
  auto mask_all = tmp.file("m3.csv", "1\n1\n");
  CHECK_THROWS_AS(Table::load(data, mask_all, tmp.file("s5.csv", "a,numeric,semi-sensitive\n")),
                  ValidationError);
}

TEST_CASE("load errors carry file coordinates") {
  testutil::TempDir tmp;
  auto schema = tmp.file("s.csv", "a,numeric,qi\nb,categorical,qi\n");
  auto mask = tmp.file("m.csv", "0,0\n0,0\n");

  auto bad_num = tmp.file("d1.csv", "id,a,b\n1,10,x\n2,2x,y\n");
  CHECK_THROWS_WITH_AS(Table::load(bad_num, mask, schema), doctest::Contains("d1.csv:3"),
                       ValidationError);

  auto bad_header = tmp.file("d2.csv", "id,a,c\n1,10,x\n2,20,y\n");
  CHECK_THROWS_WITH_AS(Table::load(bad_header, mask, schema), doctest::Contains("d2.csv:1"),
                       ValidationError);

  auto no_id = tmp.file("d3.csv", "key,a,b\n1,10,x\n2,20,y\n");
  CHECK_THROWS_AS(Table::load(no_id, mask, schema), ValidationError);

  auto dup_id = tmp.file("d4.csv", "id,a,b\n1,10,x\n1,20,y\n");
  CHECK_THROWS_WITH_AS(Table::load(dup_id, mask, schema), doctest::Contains("duplicate row id"),
                       ValidationError);

  auto neg_id = tmp.file("d5.csv", "id,a,b\n0,10,x\n2,20,y\n");
  CHECK_THROWS_AS(Table::load(neg_id, mask, schema), ValidationError);

  auto missing = tmp.file("d6.csv", "id,a,b\n1,,x\n2,20,y\n");
  CHECK_THROWS_WITH_AS(Table::load(missing, mask, schema), doctest::Contains("missing value"),
                       ValidationError);

  auto data = tmp.file("d.csv", "id,a,b\n1,10,x\n2,20,y\n");
  auto short_mask = tmp.file("m1.csv", "0,0\n");
  CHECK_THROWS_AS(Table::load(data, short_mask, schema), ValidationError);
  auto bad_mask = tmp.file("m2.csv", "0,2\n0,0\n");
  CHECK_THROWS_WITH_AS(Table::load(data, bad_mask, schema), doctest::Contains("m2.csv:1"),
                       ValidationError);

  // Value not a leaf of the declared hierarchy.
  auto hier = tmp.file("h.csv", "root,x\nroot,y\n");
  auto schema_h = tmp.file("sh.csv", "a,numeric,qi\nb,categorical,qi,h.csv\n");
  auto bad_cat = tmp.file("d7.csv", "id,a,b\n1,10,x\n2,20,z\n");
  CHECK_THROWS_WITH_AS(Table::load(bad_cat, mask, schema_h), doctest::Contains("d7.csv:3"),
                       ValidationError);
  // Internal node used as a cell value is also rejected.
  auto internal = tmp.file("d8.csv", "id,a,b\n1,10,x\n2,20,root\n");
  CHECK_THROWS_AS(Table::load(internal, mask, schema_h), ValidationError);
}

TEST_CASE("bucket-like labels are rejected on bucketizable columns") {
  testutil::TempDir tmp;
  auto data = tmp.file("d.csv", "id,a\n1,B2\n2,B7\n");
  auto mask = tmp.file("m.csv", "1\n1\n");
  auto schema = tmp.file("s.csv", "a,categorical,sensitive\n");
  CHECK_THROWS_WITH_AS(Table::load(data, mask, schema), doctest::Contains("collides"),
                       ValidationError);
  // Same labels are fine on a qi column, which never holds bucket references.
  auto mask0 = tmp.file("m0.csv", "0\n0\n");
  auto schema0 = tmp.file("s0.csv", "a,categorical,qi\n");
  CHECK(Table::load(data, mask0, schema0).row_count() == 2);
}

TEST_CASE("schema parsing errors") {
  testutil::TempDir tmp;
  auto data = tmp.file("d.csv", "id,a\n1,10\n");
  auto mask = tmp.file("m.csv", "0\n");
  CHECK_THROWS_AS(Table::load(data, mask, tmp.file("s1.csv", "a,numeric\n")), ValidationError);
  CHECK_THROWS_AS(Table::load(data, mask, tmp.file("s2.csv", "a,integer,qi\n")), ValidationError);
  CHECK_THROWS_AS(Table::load(data, mask, tmp.file("s3.csv", "a,numeric,public\n")), ValidationError);
  CHECK_THROWS_AS(Table::load(data, mask, tmp.file("s4.csv", "")), ValidationError);
  CHECK_THROWS_AS(Table::load(data, mask, tmp.file("s5.csv", "id,numeric,qi\n")), ValidationError);
  CHECK_THROWS_AS(Table::load(data, mask, tmp.file("s6.csv", "a,numeric,qi\na,numeric,qi\n")),
                  ValidationError);
  CHECK_THROWS_AS(Table::load(data, mask, tmp.file("s7.csv", "a,numeric,qi,h.csv\n")),
                  ValidationError);  // hierarchy on a numeric attribute
}

TEST_CASE("auto-generated flat hierarchy covers observed values in sorted order") {
  testutil::TempDir tmp;
  auto data = tmp.file("d.csv", "id,b\n1,pear\n2,apple\n3,pear\n");
  auto mask = tmp.file("m.csv", "0\n0\n0\n");
  auto schema = tmp.file("s.csv", "b,categorical,qi\n");
  auto t = Table::load(data, mask, schema);
  REQUIRE(t.attr(0).hierarchy != nullptr);
  CHECK(t.attr(0).hierarchy->leaf_count() == 2);
  CHECK(t.attr(0).hierarchy->leaf_rank("apple") == 0);
  CHECK(t.attr(0).hierarchy->leaf_rank("pear") == 1);
  CHECK(t.domain().attrs[0].domain_size == 2);
}

TEST_CASE("load is deterministic") {
  auto t1 = load_clinic();
  auto t2 = load_clinic();
  REQUIRE(t1.row_count() == t2.row_count());
  for (std::size_t r = 0; r < t1.row_count(); ++r) {
    CHECK(t1.id_at(r) == t2.id_at(r));
    for (int a = 0; a < t1.attr_count(); ++a) {
      CHECK(t1.cell(r, a) == t2.cell(r, a));
      CHECK(t1.flagged(r, a) == t2.flagged(r, a));
    }
  }
}

TEST_CASE("partition matches a pairwise signature oracle on random masks") {
  Rng rng(555);
  for (int iter = 0; iter < 10; ++iter) {
    std::size_t n = 5 + rng.below(40);
    int na = 2 + static_cast<int>(rng.below(4));
    std::vector<lgb::AttributeSchema> schema;
    for (int a = 0; a < na; ++a) {
      lgb::AttributeSchema s;
      s.name = "a" + std::to_string(a);
      s.kind = Kind::Numeric;
      s.role = Role::QI;
      schema.push_back(s);
    }
    std::vector<std::int64_t> ids;
    std::vector<std::vector<std::int64_t>> cells;
    std::vector<std::vector<std::uint8_t>> mask;
    for (std::size_t r = 0; r < n; ++r) {
      ids.push_back(static_cast<std::int64_t>(r) + 1);
      std::vector<std::int64_t> row;
      std::vector<std::uint8_t> flags;
      for (int a = 0; a < na; ++a) {
        row.push_back(rng.range(0, 99));
        flags.push_back(static_cast<std::uint8_t>(rng.below(2)));
      }
      cells.push_back(row);
      mask.push_back(flags);
    }
    // Roles derived from the random mask so the hints cannot contradict it.
    for (int a = 0; a < na; ++a) {
      std::size_t f = 0;
      for (std::size_t r = 0; r < n; ++r) f += mask[r][static_cast<std::size_t>(a)];
      schema[static_cast<std::size_t>(a)].role =
          f == 0 ? Role::QI : (f == n ? Role::Sensitive : Role::SemiSensitive);
    }
    auto t = Table::from_parts(schema, ids, cells, mask);
    auto parts = t.qi_partition();

    // Partition property: union covers all rows exactly once.
    std::set<std::size_t> seen;
    for (const auto& p : parts)
      for (auto r : p.rows) CHECK(seen.insert(r).second);
    CHECK(seen.size() == n);

    // Same subset iff identical signature, checked pairwise.
    std::vector<int> subset_of(n);
    for (std::size_t pi = 0; pi < parts.size(); ++pi)
      for (auto r : parts[pi].rows) subset_of[r] = static_cast<int>(pi);
    for (std::size_t r1 = 0; r1 < n; ++r1)
      for (std::size_t r2 = 0; r2 < n; ++r2) {
        bool same_sig = t.signature_of_row(r1) == t.signature_of_row(r2);
        CHECK(same_sig == (subset_of[r1] == subset_of[r2]));
      }
  }
}

TEST_CASE("with_mask rederives roles from the new flags") {
  auto t = load_clinic();
  std::vector<std::vector<std::uint8_t>> zeros(t.row_count(),
                                               std::vector<std::uint8_t>(4, 0));
  auto open = t.with_mask(zeros);
  for (int a = 0; a < open.attr_count(); ++a) CHECK(open.attr(a).role == Role::QI);
  CHECK(open.qi_partition().size() == 1);
  // Data itself is untouched.
  CHECK(open.cell(open.row_of_id(1004), 0) == 24);

  auto bad = zeros;
  bad.pop_back();
  CHECK_THROWS_AS(t.with_mask(bad), ValidationError);
}
