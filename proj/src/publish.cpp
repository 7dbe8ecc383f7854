#include "lgb/publish.hpp"

#include <algorithm>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "lgb/bucketize.hpp"
#include "lgb/csv.hpp"
#include "lgb/errors.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace lgb {

namespace {

constexpr const char* kToolVersion = "0.1.0";

bool bucket_token(const std::string& s) {
  if (s.size() < 2 || s[0] != 'B') return false;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

std::string cell_text(const AttributeSchema& attr, const PublishedTable::Cell& c) {
  if (c.bucketed()) return "B" + std::to_string(c.bid);
  if (attr.kind == Kind::Numeric)
    return "[" + std::to_string(c.g.lo) + "-" + std::to_string(c.g.hi) + "]";
  return attr.hierarchy->node(c.g.node).label;
}

std::string value_text(const AttributeSchema& attr, std::int64_t v) {
  if (attr.kind == Kind::Numeric) return std::to_string(v);
  return attr.hierarchy->node(attr.hierarchy->leaf_node(static_cast<int>(v))).label;
}

PublishedTable::Cell parse_cell(const AttributeSchema& attr, const std::string& s,
                                const std::string& at) {
  PublishedTable::Cell c;
  if (attr.role != Role::QI && bucket_token(s)) {
    c.bid = static_cast<int>(csv::to_int(s.substr(1), at));
    return c;
  }
  if (attr.kind == Kind::Numeric) {
    if (!s.empty() && s.front() == '[' && s.back() == ']') {
      std::string body = s.substr(1, s.size() - 2);
      auto sep = body.find('-', 1);  // skip a leading sign on the low bound
      if (sep == std::string::npos)
        throw ValidationError(at + ": malformed interval '" + s + "'");
      c.g = GeneralizedValue::interval(csv::to_int(body.substr(0, sep), at),
                                       csv::to_int(body.substr(sep + 1), at));
    } else {
      std::int64_t v = csv::to_int(s, at);
      c.g = GeneralizedValue::interval(v, v);
    }
    if (c.g.lo > c.g.hi)
      throw ValidationError(at + ": interval '" + s + "' has lo > hi");
    return c;
  }
  int node = attr.hierarchy->index_of(s);
  if (node < 0)
    throw ValidationError(at + ": '" + s + "' is not in the hierarchy of '" +
                          attr.name + "'");
  c.g = GeneralizedValue::category(node);
  return c;
}

/// File name the attribute's hierarchy is stored under inside a published
/// directory: the original reference when it is a plain file name, otherwise
/// a canonical per-attribute one (auto-built flat hierarchies have no file).
std::string hierarchy_file(const AttributeSchema& attr) {
  if (!attr.hierarchy_ref.empty() &&
      attr.hierarchy_ref.find('/') == std::string::npos &&
      attr.hierarchy_ref.find('\\') == std::string::npos)
    return attr.hierarchy_ref;
  return "hierarchy_" + attr.name + ".csv";
}

}  // namespace

int PublishedTable::attr_index(const std::string& name) const {
  for (std::size_t a = 0; a < schema.size(); ++a)
    if (schema[a].name == name) return static_cast<int>(a);
  throw ValidationError("unknown attribute '" + name + "'");
}

const PublishedTable::Row& PublishedTable::row_of_id(std::int64_t id) const {
  for (const auto& r : rows)
    if (r.id == id) return r;
  throw ValidationError("unknown tuple id " + std::to_string(id));
}

const PublishedTable::Bucket& PublishedTable::bucket_of(int attr, int bid) const {
  for (const auto& b : buckets[static_cast<std::size_t>(attr)])
    if (b.bid == bid) return b;
  throw ValidationError("attribute '" + schema[static_cast<std::size_t>(attr)].name +
                        "' has no bucket B" + std::to_string(bid));
}

PublishedTable anonymize(const Table& t, int k, int l, Mode mode,
                         std::uint64_t seed, Exec exec) {
  if (k < 1) throw ValidationError("k must be at least 1");
  if (l < 1) throw ValidationError("l must be at least 1");

  PublishedTable pub;
  pub.schema = t.schema();
  pub.domain = t.domain();
  pub.params = Params{k, l, mode, seed};

  const int na = t.attr_count();
  pub.buckets.resize(static_cast<std::size_t>(na));

  std::vector<ValuePairSet> sets(static_cast<std::size_t>(na));
  for (int a = 0; a < na; ++a) {
    sets[static_cast<std::size_t>(a)].attr = t.attr(a).name;
    sets[static_cast<std::size_t>(a)].hierarchy = t.attr(a).hierarchy;
  }
  for (std::size_t r = 0; r < t.row_count(); ++r)
    for (int a = 0; a < na; ++a)
      if (t.flagged(r, a))
        sets[static_cast<std::size_t>(a)].pairs.push_back({t.id_at(r), t.cell(r, a)});

  // Each attribute buckets independently; l never reaches the generalizer.
  std::vector<std::vector<LocalBucket>> local(static_cast<std::size_t>(na));
#ifdef LGB_HAVE_OPENMP
  if (exec == Exec::Parallel) {
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (int a = 0; a < na; ++a) {
      try {
        if (!sets[static_cast<std::size_t>(a)].pairs.empty())
          local[static_cast<std::size_t>(a)] =
              local_bucketize(sets[static_cast<std::size_t>(a)], l);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
  } else
#endif
  {
    for (int a = 0; a < na; ++a)
      if (!sets[static_cast<std::size_t>(a)].pairs.empty())
        local[static_cast<std::size_t>(a)] =
            local_bucketize(sets[static_cast<std::size_t>(a)], l);
  }

  pub.groups = generalize_groups(t, k, mode, exec);

  std::unordered_map<std::int64_t, std::size_t> group_of;
  for (std::size_t gi = 0; gi < pub.groups.size(); ++gi)
    for (auto id : pub.groups[gi].member_ids) group_of[id] = gi;

  std::vector<std::unordered_map<std::int64_t, int>> bid_of(static_cast<std::size_t>(na));
  for (int a = 0; a < na; ++a) {
    for (const auto& b : local[static_cast<std::size_t>(a)]) {
      PublishedTable::Bucket out;
      out.bid = b.bid;
      for (const auto& m : b.members) {
        out.values.push_back(m.value);
        bid_of[static_cast<std::size_t>(a)][m.id] = b.bid;
      }
      std::sort(out.values.begin(), out.values.end());
      pub.buckets[static_cast<std::size_t>(a)].push_back(std::move(out));
    }
  }

  std::vector<std::size_t> order(t.row_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return t.id_at(x) < t.id_at(y); });

  for (auto r : order) {
    PublishedTable::Row row;
    row.id = t.id_at(r);
    const auto& g = pub.groups[group_of.at(row.id)];
    row.gid = g.gid;
    for (int a = 0; a < na; ++a) {
      PublishedTable::Cell c;
      if (t.flagged(r, a))
        c.bid = bid_of[static_cast<std::size_t>(a)].at(row.id);
      else
        c.g = *g.find(a);  // the signature covers every unflagged attribute
      row.cells.push_back(c);
    }
    pub.rows.push_back(std::move(row));
  }
  return pub;
}

void serialize(const PublishedTable& pub, const std::string& dir) {
  fs::path base(dir);
  std::error_code ec;
  fs::create_directories(base, ec);
  if (ec) throw ValidationError("cannot create directory " + dir + ": " + ec.message());

  const std::size_t na = pub.schema.size();

  std::vector<std::vector<std::string>> out;
  std::vector<std::string> header{"id", "gid"};
  for (const auto& a : pub.schema) header.push_back(a.name);
  out.push_back(std::move(header));
  for (const auto& r : pub.rows) {
    std::vector<std::string> line{std::to_string(r.id), std::to_string(r.gid)};
    for (std::size_t a = 0; a < na; ++a)
      line.push_back(cell_text(pub.schema[a], r.cells[a]));
    out.push_back(std::move(line));
  }
  csv::write_file((base / "published.csv").string(), out);

  for (std::size_t a = 0; a < na; ++a) {
    std::vector<std::vector<std::string>> bout{{"bid", "value"}};
    for (const auto& b : pub.buckets[a])
      for (auto v : b.values)
        bout.push_back({std::to_string(b.bid), value_text(pub.schema[a], v)});
    csv::write_file((base / ("buckets_" + pub.schema[a].name + ".csv")).string(), bout);
  }

  std::vector<std::vector<std::string>> sout;
  for (const auto& attr : pub.schema) {
    std::vector<std::string> line{attr.name, kind_name(attr.kind), role_name(attr.role)};
    if (attr.hierarchy) line.push_back(hierarchy_file(attr));
    sout.push_back(std::move(line));
  }
  csv::write_file((base / "schema.csv").string(), sout);

  std::unordered_set<std::string> written;
  for (const auto& attr : pub.schema) {
    if (!attr.hierarchy) continue;
    std::string name = hierarchy_file(attr);
    if (!written.insert(name).second) continue;
    std::vector<std::vector<std::string>> hout;
    for (const auto& [parent, child] : attr.hierarchy->edges())
      hout.push_back({parent, child});
    csv::write_file((base / name).string(), hout);
  }

  ordered_json j;
  j["k"] = pub.params.k;
  j["l"] = pub.params.l;
  j["mode"] = mode_name(pub.params.mode);
  j["seed"] = pub.params.seed;
  j["tool-version"] = kToolVersion;
  ordered_json dom;
  for (std::size_t a = 0; a < na; ++a) {
    const auto& d = pub.domain.attrs[a];
    if (pub.schema[a].kind == Kind::Numeric)
      dom[pub.schema[a].name] = {{"lo", d.lo}, {"hi", d.hi}, {"range", d.range}};
    else
      dom[pub.schema[a].name] = {{"domain_size", d.domain_size}};
  }
  j["domain"] = std::move(dom);

  std::ofstream jf(base / "params.json", std::ios::trunc);
  if (!jf) throw ValidationError("cannot write file: " + (base / "params.json").string());
  jf << j.dump(2) << '\n';
  if (!jf) throw ValidationError("write failed: " + (base / "params.json").string());
}

PublishedTable deserialize(const std::string& dir) {
  fs::path base(dir);
  PublishedTable pub;
  pub.schema = load_schema((base / "schema.csv").string());
  const std::size_t na = pub.schema.size();

  std::string ppath = (base / "params.json").string();
  std::ifstream jf(ppath);
  if (!jf) throw ValidationError("cannot open file: " + ppath);
  ordered_json j;
  try {
    j = ordered_json::parse(jf);
    pub.params.k = j.at("k").get<int>();
    pub.params.l = j.at("l").get<int>();
    pub.params.mode = parse_mode(j.at("mode").get<std::string>());
    pub.params.seed = j.at("seed").get<std::uint64_t>();
    const auto& dom = j.at("domain");
    for (const auto& attr : pub.schema) {
      DomainStats::Attr d;
      const auto& e = dom.at(attr.name);
      if (attr.kind == Kind::Numeric) {
        d.lo = e.at("lo").get<std::int64_t>();
        d.hi = e.at("hi").get<std::int64_t>();
        d.range = e.at("range").get<std::int64_t>();
      } else {
        d.domain_size = e.at("domain_size").get<std::int64_t>();
      }
      pub.domain.attrs.push_back(d);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(ppath + ": " + e.what());
  }

  pub.buckets.resize(na);
  for (std::size_t a = 0; a < na; ++a) {
    std::string bpath = (base / ("buckets_" + pub.schema[a].name + ".csv")).string();
    auto rows = csv::read_file(bpath);
    if (rows.empty() || rows[0] != std::vector<std::string>{"bid", "value"})
      throw ValidationError(bpath + ":1: expected header `bid,value`");
    std::map<int, std::vector<std::int64_t>> by_bid;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      std::string at = bpath + ":" + std::to_string(i + 1);
      if (rows[i].size() != 2) throw ValidationError(at + ": expected `bid,value`");
      int bid = static_cast<int>(csv::to_int(rows[i][0], at));
      if (bid < 1) throw ValidationError(at + ": bucket ids start at 1");
      std::int64_t v;
      if (pub.schema[a].kind == Kind::Numeric) {
        v = csv::to_int(rows[i][1], at);
      } else {
        try {
          v = pub.schema[a].hierarchy->leaf_rank(rows[i][1]);
        } catch (const ValidationError& e) {
          throw ValidationError(at + ": " + e.what());
        }
      }
      by_bid[bid].push_back(v);
    }
    for (auto& [bid, values] : by_bid) {
      std::sort(values.begin(), values.end());
      pub.buckets[a].push_back({bid, std::move(values)});
    }
  }

  std::string dpath = (base / "published.csv").string();
  auto rows = csv::read_file(dpath);
  if (rows.empty()) throw ValidationError(dpath + ": missing header");
  std::vector<std::string> want{"id", "gid"};
  for (const auto& attr : pub.schema) want.push_back(attr.name);
  if (rows[0] != want)
    throw ValidationError(dpath + ":1: header does not match the schema");

  std::unordered_set<std::int64_t> seen_ids;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::string at = dpath + ":" + std::to_string(i + 1);
    PublishedTable::Row row;
    row.id = csv::to_int(rows[i][0], at);
    if (!seen_ids.insert(row.id).second)
      throw ValidationError(at + ": duplicate tuple id " + std::to_string(row.id));
    row.gid = static_cast<int>(csv::to_int(rows[i][1], at));
    if (row.gid < 1) throw ValidationError(at + ": group ids start at 1");
    for (std::size_t a = 0; a < na; ++a) {
      auto c = parse_cell(pub.schema[a], rows[i][a + 2],
                          at + ", column '" + pub.schema[a].name + "'");
      if (c.bucketed()) pub.bucket_of(static_cast<int>(a), c.bid);  // must exist
      row.cells.push_back(c);
    }
    pub.rows.push_back(std::move(row));
  }

  // Groups are implicit in the rows: gid plus the non-bucketed cells.
  std::map<int, std::vector<const PublishedTable::Row*>> by_gid;
  for (const auto& r : pub.rows) by_gid[r.gid].push_back(&r);
  int expect = 1;
  for (const auto& [gid, members] : by_gid) {
    if (gid != expect++)
      throw ValidationError(dpath + ": group ids are not dense from 1 (missing " +
                            std::to_string(expect - 1) + ")");
    LocalEquivalenceGroup g;
    g.gid = gid;
    const auto& first = *members[0];
    for (std::size_t a = 0; a < na; ++a)
      if (!first.cells[a].bucketed()) {
        g.attrs.push_back(static_cast<int>(a));
        g.generalized.push_back(first.cells[a].g);
      }
    for (const auto* m : members) {
      g.member_ids.push_back(m->id);
      for (std::size_t a = 0; a < na; ++a) {
        bool in_sig = !first.cells[a].bucketed();
        if (m->cells[a].bucketed() == in_sig ||
            (in_sig && !(m->cells[a].g == first.cells[a].g)))
          throw ValidationError(dpath + ": tuples of group " + std::to_string(gid) +
                                " disagree on column '" + pub.schema[a].name + "'");
      }
    }
    std::sort(g.member_ids.begin(), g.member_ids.end());
    pub.groups.push_back(std::move(g));
  }
  return pub;
}

}  // namespace lgb
