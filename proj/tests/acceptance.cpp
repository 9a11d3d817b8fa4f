// Acceptance gate: one [PASS]/[FAIL] line per criterion, exit 1 on any FAIL.
// Criteria with a wall-time budget fail when they run over it.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "smetric/config.hpp"
#include "smetric/verify.hpp"

using namespace smetric;

namespace {

const SMetric& space() {
  static SMetric s = SMetric::norm_sum(NormKind::Euclidean);
  return s;
}

std::uint64_t floor_sqrt(std::uint64_t n) {
  std::uint64_t k = 0;
  while ((k + 1) * (k + 1) <= n) ++k;
  return k;
}

bool is_square(std::uint64_t n) {
  std::uint64_t k = floor_sqrt(n);
  return k * k == n;
}

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int g_failures = 0;

void criterion(int id, const char* label, double budget_seconds,
               const std::function<void(Check&)>& body) {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_seconds > 0 && secs > budget_seconds)
    c.expect(false, "over budget: " + std::to_string(secs) + "s > " +
                        std::to_string(budget_seconds) + "s");
  if (!c.ok) ++g_failures;
  std::printf("[%s] %2d %s (%.2fs)%s%s\n", c.ok ? "PASS" : "FAIL", id, label, secs,
              c.ok ? "" : ": ", c.ok ? "" : c.detail.c_str());
  std::fflush(stdout);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const double kTwoRootTwo = 2.0 * std::sqrt(2.0);

void c1_square_spike_statistical_limit(Check& c) {
  SequenceFamily fam = parse_family("example3_1");
  Schedules sched = Schedules::standard();
  auto v = st_converges(space(), fam, Point{0.0, 0.0}, sched.eps, sched.ns,
                        kernels::Exec::Parallel, EvidenceMode::Full);
  c.expect(v.verdict == Verdict::Holds, "verdict is not Holds");
  const double expected[] = {0.031, 0.01, 0.00316, 0.001};
  for (const EpsDensity& ed : v.per_eps) {
    c.expect(ed.density.exact.has_value() && *ed.density.exact == 0.0,
             "density is not certified exactly zero");
    auto ratios = ed.density.ratios();
    c.expect(ratios.size() == 4, "expected four scheduled ratios");
    for (std::size_t i = 0; i < ratios.size() && i < 4; ++i) {
      c.expect(std::fabs(ratios[i] - expected[i]) <= 1e-9,
               "ratio at n=" + std::to_string(sched.ns[i]) + " is " +
                   std::to_string(ratios[i]));
      double oracle =
          double(floor_sqrt(sched.ns[i])) / double(sched.ns[i]);
      c.expect(ratios[i] == oracle, "ratio differs from the square-count oracle");
    }
  }
}

void c2_square_spike_negatives(Check& c) {
  SequenceFamily fam = parse_family("example3_1");
  Schedules sched = Schedules::standard();
  auto conv = is_convergent_prefix(space(), fam, Point{0.0, 0.0}, sched.eps, 1000000);
  c.expect(conv.verdict == Verdict::Fails, "prefix convergence did not fail");
  bool square_witness = false;
  for (const EpsEvidence& e : conv.per_eps)
    if (e.last_exceedance != 0 && is_square(e.last_exceedance)) square_witness = true;
  c.expect(square_witness, "no square-index convergence witness");

  auto bound = is_s_bounded_prefix(space(), fam, 1000000);
  c.expect(bound.verdict == Verdict::Fails, "boundedness did not fail");
  c.expect(bound.growth_witness.has_value(), "missing growth witness");
  if (bound.growth_witness)
    c.expect(is_square(bound.growth_witness->n) || is_square(bound.growth_witness->m),
             "growth witness is not a spike index");
}

void c3_parity_spike_rough_limits(Check& c) {
  SequenceFamily fam = parse_family("example4_1");
  Schedules sched = Schedules::standard();
  for (const Point& cand : {Point{0.0, 0.0}, Point{1.0, 1.0}}) {
    auto st = rough_st_converges(space(), fam, cand, kTwoRootTwo, sched.eps, sched.ns);
    c.expect(st.verdict == Verdict::Holds,
             "rough statistical convergence fails at " + format_candidate(cand));
    auto grid = default_roughness_grid(space(), fam, cand);
    c.expect(!grid.empty(), "empty roughness grid");
    for (double r : grid) {
      auto plain = rough_limit_check(space(), fam, cand, r, sched.eps, 1000000);
      c.expect(plain.verdict == Verdict::Fails,
               "rough (non-statistical) check holds at r=" + format_number(r));
    }
  }
}

std::vector<RoughLimitSet> g_c4_sets;

void c4_ball_characterization(Check& c) {
  SequenceFamily fam = parse_family("example3_1");
  Schedules sched = Schedules::standard();
  const double step = 0.05;
  for (double r : {0.5, 1.0, 2.0}) {
    GridOptions options;
    options.region = Region{Point{-r - 1, -r - 1}, Point{r + 1, r + 1}};
    options.step = step;
    options.prefer_exact_ball = false;
    RoughLimitSet set = estimate_rough_limit_set(space(), fam, r, options, sched);
    c.expect(!set.grid.empty(), "grid route produced no cells");
    const double shell = 2.0 * step + sched.eps.back() + 1e-9;
    std::size_t outside = 0;
    for (const auto& cell : set.grid) {
      double dist = 2.0 * norm_l2(cell.point);
      bool truth = dist <= r;
      bool predicted = cell.verdict == Verdict::Holds;
      if (predicted != truth && std::fabs(dist - r) > shell) ++outside;
    }
    c.expect(outside == 0, std::to_string(outside) +
                               " disagreements outside the boundary shell at r=" +
                               format_number(r));
    g_c4_sets.push_back(std::move(set));
  }
}

void c5_diameter_bounds(Check& c) {
  c.expect(!g_c4_sets.empty(), "criterion 4 produced no sets");
  for (const RoughLimitSet& set : g_c4_sets) {
    DiamBoundReport rep = diam_bound_check(set);
    c.expect(rep.pass, "diameter " + format_number(rep.diameter) + " exceeds " +
                           format_number(rep.bound));
  }
  // The parity family's set contains both paper members, which realize the
  // full 2*sqrt(2) spread.
  SequenceFamily fam = parse_family("example4_1");
  GridOptions options;
  options.region = Region{Point{-2.0, -2.0}, Point{3.0, 3.0}};
  options.step = 0.25;
  RoughLimitSet set =
      estimate_rough_limit_set(space(), fam, kTwoRootTwo, options, Schedules::standard());
  c.expect(diam_bound_check(set).pass, "parity set diameter exceeds the 3r bound");
  c.expect(set.diameter_estimate >= kTwoRootTwo - 1e-6,
           "parity set diameter " + format_number(set.diameter_estimate) +
               " falls short of 2*sqrt(2)");
}

void c6_implication_chain(Check& c) {
  Schedules sched = Schedules::smoke();
  const auto& eps = sched.eps;
  const auto& ns = sched.ns;
  const std::uint64_t n_max = ns.back();
  const auto& zoo = family_zoo();
  c.expect(zoo.size() >= 12, "zoo is too small");
  std::size_t violations = 0;
  std::string first;
  auto imply = [&](const std::string& fam, const char* what, Verdict from, Verdict to) {
    if (from == Verdict::Holds && to != Verdict::Holds) {
      ++violations;
      if (first.empty()) first = fam + ": " + what;
    }
  };
  for (const std::string& expr : zoo) {
    SequenceFamily fam = parse_family(expr);
    Point cand = fam.structure() && fam.structure()->known_st_limit
                     ? *fam.structure()->known_st_limit
                     : prefix_medoid(space(), fam, std::min<std::uint64_t>(n_max, 4096));
    auto conv = is_convergent_prefix(space(), fam, cand, eps, n_max);
    auto stconv = st_converges(space(), fam, cand, eps, ns);
    auto cauchy = is_cauchy_prefix(space(), fam, eps, n_max);
    auto stcauchy = st_cauchy(space(), fam, eps, ns);
    auto stbound = st_bounded(space(), fam, cand, ns);
    auto rough = rough_limit_check(space(), fam, cand, 1.0, eps, n_max);
    auto roughst = rough_st_converges(space(), fam, cand, 1.0, eps, ns);
    auto rough0 = rough_st_converges(space(), fam, cand, 0.0, eps, ns);
    imply(expr, "convergent => st-convergent", conv.verdict, stconv.verdict);
    imply(expr, "st-convergent => st-cauchy", stconv.verdict, stcauchy.verdict);
    imply(expr, "st-cauchy => st-bounded", stcauchy.verdict, stbound.verdict);
    imply(expr, "cauchy => st-cauchy", cauchy.verdict, stcauchy.verdict);
    imply(expr, "rough => rough-statistical", rough.verdict, roughst.verdict);
    if (rough0.verdict != stconv.verdict) {
      ++violations;
      if (first.empty()) first = expr + ": r=0 reduction";
    }
  }
  c.expect(violations == 0,
           std::to_string(violations) + " violations, first: " + first);
}

void c7_ae_modification(Check& c) {
  SequenceFamily fam = parse_family("example3_1");
  const std::uint64_t n_max = 10000;
  auto mod = ae_modification(space(), fam, Point{0.0, 0.0}, n_max);
  for (std::uint64_t m : mod.disagreement.members_up_to(n_max))
    c.expect(is_square(m), "disagreement outside the squares at n=" + std::to_string(m));
  c.expect(!mod.disagreement_ratios.empty(), "no disagreement ratios");
  for (auto [n, ratio] : mod.disagreement_ratios)
    c.expect(ratio <= double(floor_sqrt(n)) / double(n) + 1e-12,
             "ratio exceeds the square-count ratio at n=" + std::to_string(n));
  SequenceFamily repaired = mod.as_family("repaired");
  auto v = is_convergent_prefix(space(), repaired, Point{0.0, 0.0},
                                Schedules::smoke().eps, n_max);
  c.expect(v.verdict != Verdict::Fails, "modified sequence does not converge");

  auto indices = convergent_subsequence(space(), fam, Point{0.0, 0.0}, n_max);
  std::vector<std::uint64_t> expected;
  for (std::uint64_t n = 1; n <= n_max; ++n)
    if (!is_square(n)) expected.push_back(n);
  c.expect(indices == expected, "subsequence is not exactly the non-squares");
}

void c8_perturbation_suite(Check& c) {
  Schedules sched = Schedules::smoke();
  std::size_t disagreements = 0;
  std::string first;
  for (const std::string& expr : family_zoo()) {
    SequenceFamily fam = parse_family(expr);
    Point cand = fam.structure() && fam.structure()->known_st_limit
                     ? *fam.structure()->known_st_limit
                     : prefix_medoid(space(), fam, 4096);
    for (DecayKind decay : {DecayKind::OneOverN, DecayKind::GeometricHalf}) {
      PerturbationReport rep =
          perturbation_equivalence_check(space(), fam, cand, 1.0, decay, sched);
      if (!rep.pass) {
        ++disagreements;
        if (first.empty()) first = expr + " with " + to_string(decay);
      }
    }
  }
  c.expect(disagreements == 0,
           std::to_string(disagreements) + " disagreements, first: " + first);
}

void c9_limit_set_properties(Check& c) {
  Schedules sched = Schedules::standard();
  IndexSet nonsquares = IndexSet::complement(IndexSet::squares());

  std::vector<Point> c3 = {Point{0.0, 0.0}};
  auto sub3 = subsequence_limitset_check(space(), parse_family("example3_1"), c3, 1.0,
                                         nonsquares, Schedules::smoke());
  c.expect(sub3.pass, "subsequence check fails on the square-spike family");
  std::vector<Point> c4 = {Point{0.0, 0.0}, Point{1.0, 1.0}};
  auto sub4 = subsequence_limitset_check(space(), parse_family("example4_1"), c4,
                                         kTwoRootTwo, nonsquares, Schedules::smoke());
  c.expect(sub4.pass, "subsequence check fails on the parity family");

  auto ok = bounded_iff_nonempty_check(space(), parse_family("example3_1"), sched);
  c.expect(ok.pass && ok.bounded.verdict == Verdict::Holds && ok.limit_set_found,
           "bounded<=>nonempty round trip fails on the square-spike family");
  auto bad = bounded_iff_nonempty_check(space(), parse_family("drift(1,0)"), sched);
  c.expect(bad.pass && bad.bounded.verdict == Verdict::Fails && !bad.limit_set_found,
           "drift does not fail consistently");

  RoughLimitSet set;
  set.roughness = kTwoRootTwo;
  set.members = {Point{0.0, 0.0}, Point{1.0, 1.0}};
  set.diameter_estimate = space()(Point{0.0, 0.0}, Point{0.0, 0.0}, Point{1.0, 1.0});
  std::vector<Point> clusters = {Point{0.0, 0.0}, Point{1.0, 1.0}};
  auto cover =
      cluster_ball_cover_check(space(), parse_family("example4_1"), set, clusters, sched);
  c.expect(cover.pass, "cluster cover rejects the paper members");
  c.expect(std::fabs(cover.worst - kTwoRootTwo) <= 1e-9,
           "worst cover distance is not the boundary case");
  c.expect(cover.tolerance >= kTwoRootTwo && cover.tolerance <= kTwoRootTwo + 2e-6,
           "cover tolerance is not r + 1e-6");
}

void c10_axiom_verifier(Check& c) {
  auto sample = random_quadruples(2, 10000, -10.0, 10.0, default_seed());
  for (const SMetric& s : {SMetric::norm_sum(NormKind::Euclidean),
                           SMetric::norm_sum(NormKind::Taxicab),
                           SMetric::norm_sum(NormKind::Max),
                           SMetric::metric_sum(NormKind::Euclidean)}) {
    AxiomReport rep = check_axioms(s, sample);
    c.expect(rep.violations.empty(),
             s.name() + " has " + std::to_string(rep.violations.size()) + " violations");
    double worst = 0;
    for (const Quadruple& q : sample)
      worst = std::max(worst, symmetry_defect(s, q.x, q.y));
    c.expect(worst <= 2e-9, s.name() + " symmetry defect " + format_number(worst));
  }
}

void c11_verify_determinism(Check& c) {
#ifdef SMETRIC_CLI_PATH
  const std::string cli = SMETRIC_CLI_PATH;
  auto run = [&](const std::string& out_csv, const std::string& out_txt) {
    std::string cmd = "SMETRIC_SEED=42 \"" + cli + "\" verify --scale smoke --out " +
                      out_csv + " > " + out_txt + " 2>/dev/null";
    return std::system(cmd.c_str());
  };
  int rc1 = run("acceptance_verify_a.csv", "acceptance_verify_a.txt");
  int rc2 = run("acceptance_verify_b.csv", "acceptance_verify_b.txt");
  c.expect(rc1 == 0, "first verify run exited with " + std::to_string(rc1));
  c.expect(rc2 == 0, "second verify run exited with " + std::to_string(rc2));
  std::string a = read_file("acceptance_verify_a.csv");
  std::string b = read_file("acceptance_verify_b.csv");
  c.expect(!a.empty(), "first verify run wrote no CSV");
  c.expect(a == b, "CSV outputs differ between runs");
  c.expect(read_file("acceptance_verify_a.txt") == read_file("acceptance_verify_b.txt"),
           "property lines differ between runs");
#else
  c.expect(false, "SMETRIC_CLI_PATH is not defined");
#endif
}

}  // namespace

int main() {
  criterion(1, "square spikes statistically converge with exact ratios", 5.0,
            c1_square_spike_statistical_limit);
  criterion(2, "square spikes are neither convergent nor bounded", 5.0,
            c2_square_spike_negatives);
  criterion(3, "parity spikes: rough-statistical holds, rough fails", 10.0,
            c3_parity_spike_rough_limits);
  criterion(4, "grid membership matches the closed ball", 60.0, c4_ball_characterization);
  criterion(5, "limit set diameters respect the 3r bound", 0.0, c5_diameter_bounds);
  criterion(6, "implication chain has no violations on the zoo", 30.0,
            c6_implication_chain);
  criterion(7, "a.e. modification repairs the squares", 0.0, c7_ae_modification);
  criterion(8, "perturbations never change a verdict", 0.0, c8_perturbation_suite);
  criterion(9, "subsequence, bounded-iff-nonempty and cluster cover", 0.0,
            c9_limit_set_properties);
  criterion(10, "axioms and symmetry hold on ten thousand quadruples", 0.0,
            c10_axiom_verifier);
  criterion(11, "verify --scale smoke is byte-deterministic", 0.0, c11_verify_determinism);

  if (g_failures) {
    std::printf("%d criteria failed\n", g_failures);
    return 1;
  }
  std::printf("all 11 criteria passed\n");
  return 0;
}
