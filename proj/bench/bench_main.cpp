// Wall-clock comparison of the serial reference engine against the OpenMP
// engine on the three data-parallel stages: grouping+bucketization, the
// exhaustive adversary sweep, and query-workload answering. Each stage also
// cross-checks that both engines produced the same result, so a mismatch
// shows up here long before it matters.
//
// Usage: lgb_bench [rows] [seed]

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>

#ifdef LGB_HAVE_OPENMP
#include <omp.h>
#endif

#include "lgb/audit.hpp"
#include "lgb/metrics.hpp"
#include "lgb/publish.hpp"
#include "lgb/synth.hpp"

using namespace lgb;

namespace {

template <class F>
double ms(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

bool report(const char* stage, double serial_ms, double parallel_ms, bool match) {
  std::printf("%-28s %9.1f ms %9.1f ms %7.2fx  %s\n", stage, serial_ms, parallel_ms,
              serial_ms / parallel_ms, match ? "match" : "MISMATCH");
  return match;
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t rows = argc > 1 ? std::stoull(argv[1]) : 5000;
  std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 1;

#ifdef LGB_HAVE_OPENMP
  std::printf("rows: %zu  seed: %llu  threads: %d\n\n", rows,
              static_cast<unsigned long long>(seed), omp_get_max_threads());
#else
  std::printf("rows: %zu  seed: %llu  (built without OpenMP; both columns serial)\n\n",
              rows, static_cast<unsigned long long>(seed));
#endif
  std::printf("%-28s %12s %12s %8s\n", "stage", "serial", "parallel", "speedup");

  Table t = census_table(rows, seed);
  bool ok = true;

  PublishedTable pub_s, pub_p;
  for (Mode mode : {Mode::MDP, Mode::NCP}) {
    PublishedTable s, p;
    double ts = ms([&] { s = anonymize(t, 5, 2, mode, seed, Exec::Serial); });
    double tp = ms([&] { p = anonymize(t, 5, 2, mode, seed, Exec::Parallel); });
    bool match = c_dm(s.groups) == c_dm(p.groups) && ncp_table(s) == ncp_table(p) &&
                 s.rows.size() == p.rows.size();
    ok &= report(mode == Mode::MDP ? "anonymize mdp k=5 l=2" : "anonymize ncp k=5 l=2",
                 ts, tp, match);
    if (mode == Mode::MDP) {
      pub_s = std::move(s);
      pub_p = std::move(p);
    }
  }

  {
    SweepResult s, p;
    double ts = ms([&] { s = adversary_sweep(t, pub_s, Exec::Serial); });
    double tp = ms([&] { p = adversary_sweep(t, pub_p, Exec::Parallel); });
    bool match = s.max_identity == p.max_identity && s.max_value == p.max_value &&
                 s.identity_id == p.identity_id && s.value_id == p.value_id &&
                 s.value_attr == p.value_attr;
    ok &= report("adversary sweep", ts, tp, match);
  }

  {
    auto queries = gen_queries(t.schema(), t.domain(), 1000, seed);
    WorkloadResult s, p;
    double ts = ms([&] { s = run_workload(pub_s, t, queries, Exec::Serial); });
    double tp = ms([&] { p = run_workload(pub_p, t, queries, Exec::Parallel); });
    bool match = s.defined == p.defined && s.mean_r_error == p.mean_r_error;
    ok &= report("query workload n=1000", ts, tp, match);
  }

  return ok ? 0 : 1;
}
