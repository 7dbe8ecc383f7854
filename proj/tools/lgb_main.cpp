// Command line front end: anonymize / verify / evaluate / sweep / synth.
//
// Exit codes: 0 success (and verify: all checks pass), 1 failed verification
// or unexpected error, 2 infeasible parameters, 3 bad input or usage.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef LGB_HAVE_OPENMP
#include <omp.h>
#endif

#include "lgb/audit.hpp"
#include "lgb/csv.hpp"
#include "lgb/errors.hpp"
#include "lgb/metrics.hpp"
#include "lgb/publish.hpp"
#include "lgb/synth.hpp"

namespace {

using nlohmann::ordered_json;
using namespace lgb;

// LGB_WORKERS unset: parallel with the OpenMP default thread count.
// LGB_WORKERS=1 (or less): serial reference path. Larger values pin the
// OpenMP thread count. Results are identical either way; this only picks
// the execution engine.
Exec exec_from_env() {
  const char* w = std::getenv("LGB_WORKERS");
  if (!w || !*w) return Exec::Parallel;
  int n = std::atoi(w);
  if (n <= 1) return Exec::Serial;
#ifdef LGB_HAVE_OPENMP
  omp_set_num_threads(n);
#endif
  return Exec::Parallel;
}

Table load_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  fs::path base(dir);
  if (!fs::exists(base / "data.csv") || !fs::exists(base / "mask.csv") ||
      !fs::exists(base / "schema.csv"))
    throw ValidationError(dir + ": expected data.csv, mask.csv and schema.csv");
  return Table::load((base / "data.csv").string(), (base / "mask.csv").string(),
                     (base / "schema.csv").string());
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(12) << v;
  return ss.str();
}

// ---------------------------------------------------------------- anonymize

struct AnonArgs {
  std::string in;
  std::string out;
  int k = 1;
  int l = 1;
  std::string mode = "mdp";
  std::uint64_t seed = 0;
  double density = -1.0;  // < 0: keep the table's own mask
};

int run_anonymize(const AnonArgs& a) {
  Table t = load_dir(a.in);
  if (a.density >= 0.0) t = t.with_mask(density_mask(t, a.density, a.seed));
  PublishedTable pub = anonymize(t, a.k, a.l, parse_mode(a.mode), a.seed, exec_from_env());
  serialize(pub, a.out);

  Rational ncp = ncp_table(pub);
  std::cout << "rows: " << pub.rows.size() << "\n"
            << "groups: " << pub.groups.size() << "\n"
            << "c_dm: " << c_dm(pub.groups) << "\n"
            << "ncp: " << fmt(ncp.to_double()) << " (" << ncp.str() << ")\n";
  std::cout << "buckets:";
  for (std::size_t i = 0; i < pub.buckets.size(); ++i)
    if (!pub.buckets[i].empty())
      std::cout << " " << pub.schema[i].name << "=" << pub.buckets[i].size();
  std::cout << "\n"
            << "out: " << a.out << "\n";
  return 0;
}

// ------------------------------------------------------------------- verify

struct VerifyArgs {
  std::string pub_dir;
  std::string orig;
  std::string bk_file;
  int k = 0;  // 0: take from the release's params
  int l = 0;
};

ordered_json fraction_json(const Rational& r) {
  return ordered_json{{"fraction", r.str()}, {"value", r.to_double()}};
}

// External adversary knowledge: `attribute,value` CSV, one known cell per
// line. Values use the data.csv spelling (numbers, or leaf labels for
// categorical attributes).
BackgroundKnowledge load_bk(const PublishedTable& pub, const std::string& path) {
  auto rows = csv::read_file(path);
  if (rows.empty() || rows.front() != std::vector<std::string>{"attribute", "value"})
    throw ValidationError(path + ": expected header 'attribute,value'");
  std::map<int, std::int64_t> known;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    int a = pub.attr_index(rows[i][0]);
    const AttributeSchema& sc = pub.schema[static_cast<std::size_t>(a)];
    std::int64_t v = sc.kind == Kind::Numeric
                         ? csv::to_int(rows[i][1], path)
                         : sc.hierarchy->leaf_rank(rows[i][1]);
    if (!known.emplace(a, v).second)
      throw ValidationError(path + ": duplicate attribute '" + rows[i][0] + "'");
  }
  BackgroundKnowledge bk;
  for (auto [a, v] : known) {
    bk.attrs.push_back(a);
    bk.values.push_back(v);
  }
  return bk;
}

std::string raw_text(const AttributeSchema& sc, std::int64_t v) {
  if (sc.kind == Kind::Numeric) return std::to_string(v);
  return sc.hierarchy->node(sc.hierarchy->leaf_node(static_cast<int>(v))).label;
}

// Disclosure report for one probe: identity probability plus, for every
// bucketized attribute the adversary does not already know, the likeliest
// value and its probability.
ordered_json probe_json(const PublishedTable& pub, const BackgroundKnowledge& bk) {
  ordered_json rep;
  rep["matching_tuples"] = matching_tuples(pub, bk).size();
  rep["identity"] = fraction_json(identity_disclosure_prob(pub, bk));
  ordered_json per_attr = ordered_json::array();
  for (std::size_t a = 0; a < pub.buckets.size(); ++a) {
    if (pub.buckets[a].empty()) continue;
    if (std::find(bk.attrs.begin(), bk.attrs.end(), static_cast<int>(a)) !=
        bk.attrs.end())
      continue;
    std::set<std::int64_t> candidates;
    for (int bid : matching_buckets(pub, bk, static_cast<int>(a)))
      for (std::int64_t v : pub.bucket_of(static_cast<int>(a), bid).values)
        candidates.insert(v);
    Rational best(0);
    std::int64_t best_v = 0;
    for (std::int64_t v : candidates) {
      Rational p = value_disclosure_prob(pub, bk, static_cast<int>(a), v);
      if (p > best) {
        best = p;
        best_v = v;
      }
    }
    if (candidates.empty()) continue;
    auto entry = fraction_json(best);
    entry["attribute"] = pub.schema[a].name;
    entry["likeliest"] = raw_text(pub.schema[a], best_v);
    per_attr.push_back(entry);
  }
  rep["value_disclosure"] = per_attr;
  return rep;
}

int run_verify(const VerifyArgs& v) {
  PublishedTable pub = deserialize(v.pub_dir);
  int k = v.k > 0 ? v.k : pub.params.k;
  int l = v.l > 0 ? v.l : pub.params.l;

  Verdict vk = check_k(pub, k);
  Verdict vl = check_l(pub, l);

  ordered_json rep;
  rep["release"] = v.pub_dir;
  rep["rows"] = pub.rows.size();
  rep["k"] = ordered_json{{"param", k}, {"pass", vk.pass}, {"detail", vk.detail}};
  rep["l"] = ordered_json{{"param", l}, {"pass", vl.pass}, {"detail", vl.detail}};

  // Worst-case disclosure bounds readable off the release alone: the
  // smallest group bounds identity probability, the most repeated value in
  // any bucket bounds value probability. An adversary who knows a tuple's
  // QI values can never beat these.
  if (!pub.groups.empty()) {
    std::size_t min_group = pub.groups.front().member_ids.size();
    int min_gid = pub.groups.front().gid;
    for (const auto& g : pub.groups)
      if (g.member_ids.size() < min_group) {
        min_group = g.member_ids.size();
        min_gid = g.gid;
      }
    auto bound = fraction_json(Rational(1, static_cast<std::int64_t>(min_group)));
    bound["gid"] = min_gid;
    rep["identity_bound"] = bound;
  }
  {
    Rational worst(0);
    int worst_attr = -1, worst_bid = 0;
    for (std::size_t a = 0; a < pub.buckets.size(); ++a) {
      for (const auto& b : pub.buckets[a]) {
        std::size_t run = 1, best = 1;
        for (std::size_t i = 1; i < b.values.size(); ++i) {
          run = b.values[i] == b.values[i - 1] ? run + 1 : 1;
          best = std::max(best, run);
        }
        Rational f(static_cast<std::int64_t>(best),
                   static_cast<std::int64_t>(b.values.size()));
        if (worst_attr < 0 || f > worst) {
          worst = f;
          worst_attr = static_cast<int>(a);
          worst_bid = b.bid;
        }
      }
    }
    if (worst_attr >= 0) {
      auto bound = fraction_json(worst);
      bound["attribute"] = pub.schema[worst_attr].name;
      bound["bid"] = worst_bid;
      rep["value_bound"] = bound;
    }
  }

  if (!v.bk_file.empty())
    rep["probe"] = probe_json(pub, load_bk(pub, v.bk_file));

  // With the original table on hand, run the exact adversary: one
  // background-knowledge probe per tuple, worst case kept.
  if (!v.orig.empty()) {
    Table orig = load_dir(v.orig);
    SweepResult sw = adversary_sweep(orig, pub, exec_from_env());
    auto ident = fraction_json(sw.max_identity);
    ident["id"] = sw.identity_id;
    rep["adversary_identity"] = ident;
    auto val = fraction_json(sw.max_value);
    val["id"] = sw.value_id;
    val["attribute"] = sw.value_attr >= 0 ? pub.schema[sw.value_attr].name : "";
    rep["adversary_value"] = val;
  }

  bool pass = vk.pass && vl.pass;
  rep["pass"] = pass;
  std::cout << rep.dump(2) << "\n";
  return pass ? 0 : 1;
}

// ----------------------------------------------------------------- evaluate

struct EvalArgs {
  std::string pub_dir;
  std::string orig;
  std::string out;
  std::string density_label;
  int queries = 1000;
  std::uint64_t seed = 0;
};

int run_evaluate(const EvalArgs& e) {
  PublishedTable pub = deserialize(e.pub_dir);
  Table orig = load_dir(e.orig);
  if (pub.rows.size() != orig.row_count())
    throw ValidationError("row count mismatch: release has " +
                          std::to_string(pub.rows.size()) + ", original has " +
                          std::to_string(orig.row_count()));

  auto queries = gen_queries(orig.schema(), orig.domain(), e.queries, e.seed);
  WorkloadResult res = run_workload(pub, orig, queries, exec_from_env());

  std::vector<std::vector<std::string>> rows;
  rows.push_back({"k", "l", "mode", "density", "metric", "value"});
  auto emit = [&](const std::string& metric, const std::string& value) {
    rows.push_back({std::to_string(pub.params.k), std::to_string(pub.params.l),
                    mode_name(pub.params.mode), e.density_label, metric, value});
  };
  emit("c_dm", std::to_string(c_dm(pub.groups)));
  emit("ncp", fmt(ncp_table(pub).to_double()));
  emit("mean_r_error", fmt(res.mean_r_error));

  if (e.out.empty()) {
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i)
        std::cout << (i ? "," : "") << row[i];
      std::cout << "\n";
    }
  } else {
    csv::write_file(e.out, rows);
  }
  std::cerr << "queries: " << res.answers.size() << " defined: " << res.defined
            << "\n";
  return 0;
}

// -------------------------------------------------------------------- sweep

struct SweepArgs {
  std::string in;
  std::string out;
  std::vector<int> ks;
  std::vector<int> ls;
  std::vector<std::string> modes;
  std::vector<double> densities;
  int queries = 1000;
  std::uint64_t seed = 0;
};

// One CSV row per grid cell, appended as soon as the cell finishes so an
// interrupted sweep resumes where it stopped: rows already in --out are
// skipped on rerun. Infeasible cells are recorded with empty metric fields
// and the sweep moves on.
int run_sweep(const SweepArgs& s) {
  namespace fs = std::filesystem;
  const std::vector<std::string> header = {"k",      "l",    "mode", "density",
                                           "status", "c_dm", "ncp",  "mean_r_error"};

  Table base = load_dir(s.in);

  std::set<std::array<std::string, 4>> done;
  bool existed = fs::exists(s.out);
  if (existed) {
    auto rows = csv::read_file(s.out);
    if (rows.empty() || rows.front() != header)
      throw ValidationError(s.out + ": not a sweep output file");
    for (std::size_t i = 1; i < rows.size(); ++i)
      done.insert({rows[i][0], rows[i][1], rows[i][2], rows[i][3]});
  }
  std::ofstream out(s.out, std::ios::app);
  if (!out) throw ValidationError("cannot write file: " + s.out);
  if (!existed) {
    for (std::size_t i = 0; i < header.size(); ++i)
      out << (i ? "," : "") << header[i];
    out << "\n" << std::flush;
  }

  // Empty density list: a single pass over the table's own mask.
  std::vector<std::string> dlabels;
  std::vector<double> dvalues;
  if (s.densities.empty()) {
    dlabels.push_back("native");
    dvalues.push_back(-1.0);
  } else {
    for (double d : s.densities) {
      dlabels.push_back(fmt(d));
      dvalues.push_back(d);
    }
  }

  Exec exec = exec_from_env();
  std::vector<Query> queries;  // one workload for every cell, built on demand
  std::size_t written = 0, skipped = 0, infeasible = 0;

  for (int k : s.ks)
    for (int l : s.ls)
      for (std::size_t di = 0; di < dlabels.size(); ++di)
        for (const std::string& mode_s : s.modes) {
          Mode mode = parse_mode(mode_s);
          std::array<std::string, 4> key = {std::to_string(k), std::to_string(l),
                                            mode_name(mode), dlabels[di]};
          if (done.count(key)) {
            ++skipped;
            continue;
          }
          if (queries.empty())
            queries = gen_queries(base.schema(), base.domain(), s.queries, s.seed);
          std::vector<std::string> row(key.begin(), key.end());
          try {
            Table t = dvalues[di] < 0.0
                          ? base
                          : base.with_mask(density_mask(base, dvalues[di], s.seed));
            PublishedTable pub = anonymize(t, k, l, mode, s.seed, exec);
            WorkloadResult res = run_workload(pub, t, queries, exec);
            row.insert(row.end(), {"ok", std::to_string(c_dm(pub.groups)),
                                   fmt(ncp_table(pub).to_double()),
                                   fmt(res.mean_r_error)});
          } catch (const InfeasibleError& ex) {
            row.insert(row.end(), {"infeasible", "", "", ""});
            ++infeasible;
            std::cerr << "infeasible: k=" << k << " l=" << l << " mode=" << mode_s
                      << " density=" << dlabels[di] << ": " << ex.what() << "\n";
          }
          for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << row[i];
          out << "\n" << std::flush;
          ++written;
        }

  std::cout << "cells: " << written + skipped << " written: " << written
            << " skipped: " << skipped << " infeasible: " << infeasible
            << " out: " << s.out << "\n";
  return 0;
}

// -------------------------------------------------------------------- synth

struct SynthArgs {
  std::string out;
  std::size_t rows = 10000;
  std::uint64_t seed = 0;
  double density = 0.2;
  std::string sex_role = "semi";
};

int run_synth(const SynthArgs& s) {
  Table t = census_table(s.rows, s.seed, s.sex_role == "semi", s.density);
  save_table(t, s.out);
  std::cout << "rows: " << t.row_count() << " attrs: " << t.schema().size()
            << " out: " << s.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Microdata anonymization by local generalization and bucketization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "0.1.0");
  int rc = 0;

  AnonArgs an;
  auto* c_an = app.add_subcommand(
      "anonymize", "Anonymize a table directory into a published release");
  c_an->add_option("input", an.in, "directory with data.csv, mask.csv, schema.csv")
      ->required();
  c_an->add_option("--out", an.out, "output directory for the release")->required();
  c_an->add_option("--k", an.k, "group size floor for unflagged cells");
  c_an->add_option("--l", an.l, "distinct-value floor for bucketed cells");
  c_an->add_option("--mode", an.mode, "generalization strategy")
      ->check(CLI::IsMember({"mdp", "ncp"}));
  c_an->add_option("--seed", an.seed, "random seed");
  c_an->add_option("--density", an.density,
                   "re-flag this share of each semi-sensitive column first");
  c_an->callback([&] { rc = run_anonymize(an); });

  VerifyArgs ve;
  auto* c_ve = app.add_subcommand("verify", "Check a published release");
  c_ve->add_option("release", ve.pub_dir, "directory written by anonymize")
      ->required();
  c_ve->add_option("--k", ve.k, "anonymity to check (default: release params)");
  c_ve->add_option("--l", ve.l, "diversity to check (default: release params)");
  c_ve->add_option("--orig", ve.orig,
                   "original table directory for the exact adversary sweep");
  c_ve->add_option("--bk", ve.bk_file,
                   "attribute,value CSV of adversary knowledge to probe");
  c_ve->callback([&] { rc = run_verify(ve); });

  EvalArgs ev;
  auto* c_ev = app.add_subcommand(
      "evaluate", "Score a release with aggregate sum queries");
  c_ev->add_option("release", ev.pub_dir, "directory written by anonymize")
      ->required();
  c_ev->add_option("--orig", ev.orig, "original table directory")->required();
  c_ev->add_option("--queries", ev.queries, "number of random queries");
  c_ev->add_option("--seed", ev.seed, "query generator seed");
  c_ev->add_option("--out", ev.out, "CSV output path (default: stdout)");
  c_ev->add_option("--density-label", ev.density_label,
                   "free-form tag for the density CSV column");
  c_ev->callback([&] { rc = run_evaluate(ev); });

  SweepArgs sw;
  auto* c_sw = app.add_subcommand(
      "sweep", "Anonymize and evaluate over a parameter grid");
  c_sw->add_option("input", sw.in, "directory with data.csv, mask.csv, schema.csv")
      ->required();
  c_sw->add_option("--out", sw.out, "CSV accumulating one row per grid cell")
      ->required();
  c_sw->add_option("--k", sw.ks, "k values")->delimiter(',');
  c_sw->add_option("--l", sw.ls, "l values")->delimiter(',');
  c_sw->add_option("--mode", sw.modes, "modes (mdp, ncp)")
      ->delimiter(',')
      ->check(CLI::IsMember({"mdp", "ncp"}));
  c_sw->add_option("--density", sw.densities,
                   "semi-sensitive flag densities (default: table's own mask)")
      ->delimiter(',');
  c_sw->add_option("--queries", sw.queries, "number of random queries");
  c_sw->add_option("--seed", sw.seed, "seed for masks, grouping and queries");
  c_sw->callback([&] { rc = run_sweep(sw); });

  SynthArgs sy;
  auto* c_sy = app.add_subcommand("synth", "Generate a census-like table");
  c_sy->add_option("--out", sy.out, "output table directory")->required();
  c_sy->add_option("--rows", sy.rows, "row count");
  c_sy->add_option("--seed", sy.seed, "random seed");
  c_sy->add_option("--density", sy.density, "semi-sensitive flag share");
  c_sy->add_option("--sex-role", sy.sex_role, "publish sex as semi or qi")
      ->check(CLI::IsMember({"semi", "qi"}));
  c_sy->callback([&] { rc = run_synth(sy); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
