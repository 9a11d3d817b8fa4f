// Times the OpenMP scan kernels against their serial reference on the same
// inputs and checks that both produce identical results.
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smetric/kernels.hpp"
#include "smetric/sequence.hpp"
#include "smetric/statistical.hpp"

namespace {

using namespace smetric;
using kernels::Exec;

double time_ms(int reps, const std::function<void()>& body) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    body();
    auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void report(const char* kernel, const char* family, double serial_ms, double parallel_ms,
            bool match) {
  std::printf("%-18s %-28s %10.2f %10.2f %8.2fx  %s\n", kernel, family, serial_ms,
              parallel_ms, serial_ms / parallel_ms, match ? "match" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel kernel timings"};
  std::uint64_t n_max = 1000000;
  int reps = 3;
  app.add_option("--n", n_max, "prefix length")->check(CLI::PositiveNumber);
  app.add_option("--reps", reps, "repetitions (best-of)")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  SMetric space = SMetric::norm_sum(NormKind::Euclidean);
  Schedules sched = Schedules::standard_up_to(n_max);
  std::vector<double> thresholds(sched.eps.begin(), sched.eps.end());
  Point origin{0, 0};
  bool all_match = true;

  std::printf("n_max=%llu reps=%d threads=%d\n\n",
              static_cast<unsigned long long>(n_max), reps, kernels::max_threads());
  std::printf("%-18s %-28s %10s %10s %9s\n", "kernel", "family", "serial ms",
              "parallel ms", "speedup");

  for (const char* expr : {"example3_1", "perturb(example3_1; 1/n)"}) {
    SequenceFamily fam = parse_family(expr);

    kernels::ScanResult s, p;
    double t_serial = time_ms(reps, [&] {
      s = kernels::scan_exceedances_serial(space, fam, origin, thresholds, sched.ns);
    });
    double t_parallel = time_ms(reps, [&] {
      p = kernels::scan_exceedances(space, fam, origin, thresholds, sched.ns,
                                    Exec::Parallel);
    });
    bool match = s.max_value == p.max_value && s.argmax == p.argmax;
    for (std::size_t t = 0; match && t < s.per_threshold.size(); ++t)
      match = s.per_threshold[t].counts_at == p.per_threshold[t].counts_at &&
              s.per_threshold[t].total == p.per_threshold[t].total;
    all_match = all_match && match;
    report("scan_exceedances", expr, t_serial, t_parallel, match);

    auto pairs = kernels::sample_pairs(n_max, 256, 4096, default_seed());
    kernels::PairScanResult ps, pp;
    t_serial = time_ms(reps, [&] {
      ps = kernels::scan_pairs_serial(space, fam, pairs, thresholds, n_max);
    });
    t_parallel = time_ms(reps, [&] {
      pp = kernels::scan_pairs(space, fam, pairs, thresholds, n_max, Exec::Parallel);
    });
    match = ps.max_value == pp.max_value && ps.max_n == pp.max_n && ps.max_m == pp.max_m;
    all_match = all_match && match;
    report("scan_pairs", expr, t_serial, t_parallel, match);
  }

  {
    SequenceFamily fam = parse_family("perturb(periodic((0,0),(3,4)); 1/n)");
    std::vector<Point> pts;
    pts.reserve(4096);
    for (std::uint64_t n = 1; n <= 4096; ++n) pts.push_back(fam.at(n));
    kernels::DiameterResult ds, dp;
    double t_serial =
        time_ms(reps, [&] { ds = kernels::pairwise_diameter(space, pts, Exec::Serial); });
    double t_parallel = time_ms(
        reps, [&] { dp = kernels::pairwise_diameter(space, pts, Exec::Parallel); });
    bool match = ds.value == dp.value && ds.i == dp.i && ds.j == dp.j;
    all_match = all_match && match;
    report("pairwise_diameter", "periodic+1/n (4096 pts)", t_serial, t_parallel, match);
  }

  return all_match ? 0 : 1;
}
