#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lgb/errors.hpp"
#include "lgb/publish.hpp"
#include "compare.hpp"
#include "helpers.hpp"
#include "tablegen.hpp"

using namespace lgb;

namespace {

Table load_clinic() {
  return Table::load(testutil::fixture("data/clinic/data.csv"),
                     testutil::fixture("data/clinic/mask.csv"),
                     testutil::fixture("data/clinic/schema.csv"));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> dir_files(const std::string& dir) {
  std::vector<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

TEST_CASE("anonymize splices buckets and groups into one release") {
  auto t = load_clinic();
  auto pub = anonymize(t, 2, 2, Mode::MDP);

  REQUIRE(pub.rows.size() == 8);
  CHECK(pub.params == Params{2, 2, Mode::MDP, 0});
  CHECK(pub.groups.size() == 4);

  // Row ids ascending, gids from the generalizer.
  std::vector<std::int64_t> ids;
  for (const auto& r : pub.rows) ids.push_back(r.id);
  CHECK(ids == std::vector<std::int64_t>{1001, 1002, 1003, 1004, 1005, 1006, 1007, 1008});
  CHECK(pub.row_of_id(1001).gid == 1);
  CHECK(pub.row_of_id(1003).gid == 2);
  CHECK(pub.row_of_id(1008).gid == 3);
  CHECK(pub.row_of_id(1007).gid == 4);

  // Every flagged source cell is a bucket reference, every unflagged one a
  // generalized value; no raw sensitive value survives in the rows.
  for (const auto& r : pub.rows) {
    auto row = t.row_of_id(r.id);
    for (int a = 0; a < t.attr_count(); ++a)
      CHECK(r.cells[static_cast<std::size_t>(a)].bucketed() == t.flagged(row, a));
  }

  int age = pub.attr_index("age");
  int zip = pub.attr_index("zipcode");
  int dis = pub.attr_index("disease");
  CHECK(pub.buckets[static_cast<std::size_t>(pub.attr_index("gender"))].empty());

  // Age pairs (24,29,31,34) split once at the median into two buckets.
  REQUIRE(pub.buckets[static_cast<std::size_t>(age)].size() == 2);
  CHECK(pub.buckets[static_cast<std::size_t>(age)][0].values ==
        std::vector<std::int64_t>{24, 29});
  CHECK(pub.buckets[static_cast<std::size_t>(age)][1].values ==
        std::vector<std::int64_t>{31, 34});
  CHECK(pub.row_of_id(1004).cells[static_cast<std::size_t>(age)].bid == 1);
  CHECK(pub.row_of_id(1007).cells[static_cast<std::size_t>(age)].bid == 1);
  CHECK(pub.row_of_id(1005).cells[static_cast<std::size_t>(age)].bid == 2);
  CHECK(pub.row_of_id(1008).cells[static_cast<std::size_t>(age)].bid == 2);

  REQUIRE(pub.buckets[static_cast<std::size_t>(zip)].size() == 1);
  CHECK(pub.buckets[static_cast<std::size_t>(zip)][0].values ==
        std::vector<std::int64_t>{13000, 14500});

  // Disease: the 8 values are not splittable at l=2 (the upper half of the
  // median split is too skewed), so one deal produces 4 buckets; the first
  // holds the flu/dyspepsia pair of tuples 1001 and 1002.
  REQUIRE(pub.buckets[static_cast<std::size_t>(dis)].size() == 4);
  auto leaf = [&](const char* s) {
    return static_cast<std::int64_t>(t.attr(dis).hierarchy->leaf_rank(s));
  };
  CHECK(pub.buckets[static_cast<std::size_t>(dis)][0].values ==
        std::vector<std::int64_t>{leaf("flu"), leaf("dyspepsia")});
  CHECK(pub.row_of_id(1001).cells[static_cast<std::size_t>(dis)].bid == 1);
  CHECK(pub.row_of_id(1002).cells[static_cast<std::size_t>(dis)].bid == 1);
  CHECK(pub.row_of_id(1006).cells[static_cast<std::size_t>(dis)].bid == 3);

  CHECK_THROWS_AS(anonymize(t, 0, 2, Mode::MDP), ValidationError);
  CHECK_THROWS_AS(anonymize(t, 2, 0, Mode::MDP), ValidationError);
  // zipcode has only two flagged cells; l=3 cannot be met there.
  CHECK_THROWS_WITH_AS(anonymize(t, 2, 3, Mode::MDP), doctest::Contains("zipcode"),
                       InfeasibleError);
}

TEST_CASE("a table without flags publishes groups only") {
  auto t = load_clinic().with_mask(
      std::vector<std::vector<std::uint8_t>>(8, std::vector<std::uint8_t>(4, 0)));
  auto pub = anonymize(t, 3, 2, Mode::NCP);
  for (const auto& per_attr : pub.buckets) CHECK(per_attr.empty());
  for (const auto& r : pub.rows)
    for (const auto& c : r.cells) CHECK(!c.bucketed());
}

TEST_CASE("serialized clinic release has the documented shape") {
  auto t = load_clinic();
  auto pub = anonymize(t, 2, 2, Mode::MDP);
  testutil::TempDir tmp;
  auto dir = tmp.sub("out");
  serialize(pub, dir);

  CHECK(dir_files(dir) == std::vector<std::string>{
                              "buckets_age.csv", "buckets_disease.csv",
                              "buckets_gender.csv", "buckets_zipcode.csv",
                              "disease_hierarchy.csv", "gender_hierarchy.csv",
                              "params.json", "published.csv", "schema.csv"});

  auto published = slurp(dir + "/published.csv");
  CHECK(published ==
        "id,gid,age,gender,zipcode,disease\n"
        "1001,1,[41-47],any,B1,B1\n"
        "1002,1,[41-47],any,B1,B1\n"
        "1003,2,[36-38],male,[12000-12800],B4\n"
        "1004,3,B1,male,[11000-11200],B3\n"
        "1005,4,B2,any,[11500-12500],B2\n"
        "1006,2,[36-38],male,[12000-12800],B3\n"
        "1007,4,B1,any,[11500-12500],B2\n"
        "1008,3,B2,male,[11000-11200],B4\n");

  CHECK(slurp(dir + "/buckets_age.csv") == "bid,value\n1,24\n1,29\n2,31\n2,34\n");
  CHECK(slurp(dir + "/buckets_gender.csv") == "bid,value\n");  // never flagged
  CHECK(slurp(dir + "/buckets_disease.csv") ==
        "bid,value\n"
        "1,flu\n1,dyspepsia\n"
        "2,flu\n2,dyspepsia\n"
        "3,pneumonia\n3,bronchitis\n"
        "4,bronchitis\n4,gastritis\n");

  CHECK(slurp(dir + "/schema.csv") ==
        "age,numeric,semi-sensitive\n"
        "gender,categorical,qi,gender_hierarchy.csv\n"
        "zipcode,numeric,semi-sensitive\n"
        "disease,categorical,sensitive,disease_hierarchy.csv\n");

  auto params = slurp(dir + "/params.json");
  CHECK(params.find("\"k\": 2") != std::string::npos);
  CHECK(params.find("\"mode\": \"mdp\"") != std::string::npos);
  CHECK(params.find("\"tool-version\"") != std::string::npos);
  CHECK(params.find("\"range\": 23") != std::string::npos);
}

TEST_CASE("serialize then deserialize is the identity") {
  auto t = load_clinic();
  for (Mode mode : {Mode::MDP, Mode::NCP}) {
    auto pub = anonymize(t, 2, 2, mode, 97);
    testutil::TempDir tmp;
    serialize(pub, tmp.sub("out"));
    auto back = deserialize(tmp.sub("out"));
    CHECK(testutil::pub_equal(pub, back));
  }

  Rng rng(5200);
  for (int it = 0; it < 6; ++it) {
    auto t2 = testutil::random_table(rng, 50 + rng.below(100), 2, 2, 3, 4);
    auto pub = anonymize(t2, 2, 1, it % 2 ? Mode::MDP : Mode::NCP, rng.next());
    testutil::TempDir tmp;
    serialize(pub, tmp.sub("out"));
    CHECK(testutil::pub_equal(pub, deserialize(tmp.sub("out"))));
  }
}

TEST_CASE("re-serializing a deserialized directory reproduces it byte for byte") {
  auto t = load_clinic();
  auto pub = anonymize(t, 2, 2, Mode::NCP, 7);
  testutil::TempDir tmp;
  serialize(pub, tmp.sub("a"));
  serialize(deserialize(tmp.sub("a")), tmp.sub("b"));
  auto names = dir_files(tmp.sub("a"));
  REQUIRE(names == dir_files(tmp.sub("b")));
  for (const auto& n : names)
    CHECK(slurp(tmp.sub("a") + "/" + n) == slurp(tmp.sub("b") + "/" + n));
}

TEST_CASE("fixture output matches the frozen golden directory") {
  auto t = load_clinic();
  auto pub = anonymize(t, 2, 2, Mode::MDP);
  testutil::TempDir tmp;
  serialize(pub, tmp.sub("out"));
  auto golden = testutil::fixture("tests/golden/clinic_k2_l2_mdp");
  auto names = dir_files(golden);
  REQUIRE(names == dir_files(tmp.sub("out")));
  for (const auto& n : names)
    CHECK(slurp(tmp.sub("out") + "/" + n) == slurp(golden + "/" + n));
}

TEST_CASE("groups ignore l and buckets ignore k") {
  auto t = load_clinic();
  auto a = anonymize(t, 2, 1, Mode::MDP);
  auto b = anonymize(t, 2, 2, Mode::MDP);
  CHECK(testutil::leg_equal(a.groups, b.groups));
  for (const auto& r : a.rows) {
    const auto& r2 = b.row_of_id(r.id);
    CHECK(r.gid == r2.gid);
  }

  auto c = anonymize(t, 1, 2, Mode::MDP);
  CHECK(testutil::buckets_equal(c.buckets, b.buckets));

  Rng rng(5300);
  auto t2 = testutil::random_table(rng, 120, 3, 0, 3, 10);
  CHECK(testutil::leg_equal(anonymize(t2, 3, 1, Mode::NCP).groups,
                            anonymize(t2, 3, 2, Mode::NCP).groups));
  CHECK(testutil::buckets_equal(anonymize(t2, 2, 2, Mode::NCP).buckets,
                                anonymize(t2, 5, 2, Mode::MDP).buckets));
}

TEST_CASE("buckets of one attribute ignore another attribute's mask") {
  auto t = load_clinic();
  auto mask = t.mask();
  // Unflag tuple 1003's disease cell; age and zipcode buckets must not move.
  mask[t.row_of_id(1003)][3] = 0;
  auto t2 = t.with_mask(mask);
  auto a = anonymize(t, 1, 2, Mode::MDP);
  auto b = anonymize(t2, 1, 2, Mode::MDP);
  CHECK(a.buckets[0] == b.buckets[0]);
  CHECK(a.buckets[2] == b.buckets[2]);
  CHECK(a.buckets[3].size() != b.buckets[3].size());
}

TEST_CASE("deserialize rejects broken directories") {
  auto t = load_clinic();
  auto pub = anonymize(t, 2, 2, Mode::MDP);

  auto corrupt = [&](const std::string& file, const std::string& from,
                     const std::string& to) {
    testutil::TempDir tmp;
    serialize(pub, tmp.sub("out"));
    auto path = tmp.sub("out") + "/" + file;
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    in.close();
    auto text = ss.str();
    auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, from.size(), to);
    std::ofstream(path, std::ios::trunc) << text;
    return deserialize(tmp.sub("out"));
  };

  CHECK_THROWS_AS(corrupt("published.csv", "B1,B1", "B1,B9"), ValidationError);
  CHECK_THROWS_AS(corrupt("published.csv", "1001,1", "1001,9"), ValidationError);
  CHECK_THROWS_AS(corrupt("published.csv", "[41-47],any,B1,B1\n1002,1,[41-47]",
                          "[41-47],any,B1,B1\n1002,1,[41-48]"),
                  ValidationError);
  CHECK_THROWS_AS(corrupt("published.csv", "[36-38]", "[38-36]"), ValidationError);
  CHECK_THROWS_AS(corrupt("published.csv", "any", "anybody"), ValidationError);
  CHECK_THROWS_AS(corrupt("buckets_disease.csv", "flu", "flue"), ValidationError);
  CHECK_THROWS_AS(corrupt("buckets_age.csv", "bid,value", "bucket,value"),
                  ValidationError);

  testutil::TempDir tmp;
  serialize(pub, tmp.sub("out"));
  std::filesystem::remove(tmp.sub("out") + "/params.json");
  CHECK_THROWS_AS(deserialize(tmp.sub("out")), ValidationError);
  CHECK_THROWS_AS(deserialize(tmp.sub("missing")), ValidationError);
}

TEST_CASE("hand-written directories may use plain numeric cells") {
  testutil::TempDir tmp;
  tmp.file("schema.csv", "age,numeric,qi\n");
  tmp.file("params.json",
           "{\"k\":1,\"l\":1,\"mode\":\"mdp\",\"seed\":0,"
           "\"domain\":{\"age\":{\"lo\":20,\"hi\":30,\"range\":10}}}\n");
  tmp.file("buckets_age.csv", "bid,value\n");
  tmp.file("published.csv", "id,gid,age\n1,1,25\n2,2,[20-30]\n");
  auto pub = deserialize(tmp.path.string());
  CHECK(pub.rows[0].cells[0].g == GeneralizedValue::interval(25, 25));
  CHECK(pub.rows[1].cells[0].g == GeneralizedValue::interval(20, 30));
  CHECK(pub.groups.size() == 2);
}
