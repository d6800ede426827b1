// Acceptance suite: one line per criterion, [PASS]/[FAIL], nonzero exit on
// any failure. Every tolerance is pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kmxx/geometry.hpp"
#include "kmxx/harness.hpp"
#include "kmxx/instances.hpp"
#include "kmxx/instrumentation.hpp"
#include "kmxx/io.hpp"
#include "kmxx/oracle.hpp"
#include "kmxx/process.hpp"
#include "kmxx/rng.hpp"
#include "kmxx/seeding.hpp"
#include "kmxx/stats.hpp"

using namespace kmxx;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double secs(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int idx, bool pass, const std::string& what, double runtime,
            double limit = 0.0) {
  const bool in_time = limit <= 0.0 || runtime < limit;
  const bool ok = pass && in_time;
  if (!ok) ++g_failures;
  std::printf("[%s] %02d %s [%.1fs%s]\n", ok ? "PASS" : "FAIL", idx,
              what.c_str(), runtime,
              limit > 0.0 ? (" / limit " + fmt_double(limit) + "s").c_str() : "");
  std::fflush(stdout);
}

WeightedPointSet random_pointset(Mt& rng, int n, int d, bool unit) {
  std::vector<WeightedPoint> pts;
  for (int i = 0; i < n; ++i) {
    std::vector<double> coords(static_cast<std::size_t>(d));
    for (auto& c : coords) c = 2.0 * uniform01(rng) - 1.0;
    pts.push_back({SparseVec::from_dense(coords),
                   unit ? 1.0 : 0.1 + 2.0 * uniform01(rng)});
  }
  return WeightedPointSet(d, std::move(pts));
}

SparseVec random_vec(Mt& rng, int d, double spread) {
  std::vector<double> coords(static_cast<std::size_t>(d));
  for (auto& c : coords) c = spread * (2.0 * uniform01(rng) - 1.0);
  return SparseVec::from_dense(coords);
}

// 1: one-center shift identity and the uniform-choice doubling identity,
// within 1e-9 relative on 200 random instances, n <= 30, d <= 6.
void criterion_01() {
  const auto t0 = Clock::now();
  Mt rng(101);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + static_cast<int>(uniform01(rng) * 29);
    const int d = 1 + static_cast<int>(uniform01(rng) * 6);
    {
      const auto X = random_pointset(rng, n, d, false);
      const auto opt = centroid_and_opt1(X);
      CenterSet C(d);
      const SparseVec c = random_vec(rng, d, 2.0);
      C.add(c);
      const double lhs = total_cost(X, C);
      const double rhs = opt.cost + X.total_weight() * sqdist(c, opt.centroid);
      worst = std::max(worst, std::fabs(lhs - rhs) / std::max(lhs, 1e-300));
    }
    {
      const auto X = random_pointset(rng, n, d, true);
      std::vector<int> all(X.size());
      for (std::size_t i = 0; i < X.size(); ++i) all[i] = static_cast<int>(i);
      const double e = expected_uniform_cost(X, all);
      const double twice = 2.0 * centroid_and_opt1(X).cost;
      worst = std::max(worst, std::fabs(e - twice) / std::max(twice, 1e-300));
    }
  }
  report(1, worst <= 1e-9,
         "shift + doubling identities on 200 instances (worst rel err " +
             fmt_double(worst) + ")",
         secs(t0), 5.0);
}

// 2: cost-proportional one-draw expectation at most five times the
// one-center optimum; 1000 random cluster/center pairs, zero violations.
void criterion_02() {
  const auto t0 = Clock::now();
  Mt rng(102);
  int violations = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = 2 + static_cast<int>(uniform01(rng) * 19);
    const int d = 1 + static_cast<int>(uniform01(rng) * 5);
    const auto X = random_pointset(rng, n, d, rep % 2 == 0);
    std::vector<int> K(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) K[i] = static_cast<int>(i);
    CenterSet C(d);
    const int nc = 1 + static_cast<int>(uniform01(rng) * 3);
    for (int c = 0; c < nc; ++c) C.add(random_vec(rng, d, 4.0));
    const double opt1 = centroid_and_opt1(X).cost;
    double e;
    try {
      e = expected_d2_cost(X, K, C);
    } catch (const Error&) {
      continue;  // degenerate pair (all points covered)
    }
    const double ratio = opt1 > 0.0 ? e / opt1 : 0.0;
    worst = std::max(worst, ratio);
    violations += e > 5.0 * opt1 * (1 + 1e-12);
  }
  report(2, violations == 0,
         "one-draw expectation within 5x of the one-center optimum, 1000 "
         "pairs (worst ratio " + fmt_double(worst) + ")",
         secs(t0), 10.0);
}

// 3: partition optimum <= member-restricted optimum <= twice the partition
// optimum on 100 random instances, n <= 10, k <= 4.
void criterion_03() {
  const auto t0 = Clock::now();
  Mt rng(103);
  int bad = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 4 + static_cast<int>(uniform01(rng) * 7);
    const int k = 1 + static_cast<int>(uniform01(rng) * 4);
    const auto X = random_pointset(rng, n, 2, rep % 3 == 0);
    const double ps = opt_subset(X, std::min(k, n)).opt_cost;
    const double pp = opt_partition(X, std::min(k, n)).opt_cost;
    if (!(pp <= ps * (1 + 1e-12) && ps <= 2.0 * pp * (1 + 1e-12))) ++bad;
  }
  report(3, bad == 0, "enumeration bracket on 100 instances", secs(t0), 60.0);
}

// 4: seeded runs stay within 8(ln k + 2) of the exact partition optimum in
// the mean over 500 trials, 50 instances (n <= 12, k <= 4), zero exceptions.
void criterion_04() {
  const auto t0 = Clock::now();
  Mt rng(104);
  int exceptions = 0;
  double worst_margin = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 6 + static_cast<int>(uniform01(rng) * 7);
    const int k = 2 + static_cast<int>(uniform01(rng) * 3);
    const auto X = random_pointset(rng, n, 2, rep % 2 == 0);
    const double opt = opt_partition(X, k).opt_cost;
    double sum = 0.0;
    for (int tr = 0; tr < 500; ++tr) {
      const auto r = seed_kmeanspp(X, k, mix_seed(1040 + rep, tr));
      sum += r.trace.steps.back().cost_after;
    }
    const double mean_ratio = (sum / 500.0) / opt;
    const double bound = 8.0 * (std::log(static_cast<double>(k)) + 2.0);
    worst_margin = std::max(worst_margin, mean_ratio / bound);
    exceptions += mean_ratio > bound;
  }
  report(4, exceptions == 0,
         "seeding mean ratio within 8(ln k + 2) of the exact optimum, 50 "
         "instances x 500 trials (worst bound fraction " +
             fmt_double(worst_margin) + ")",
         secs(t0), 300.0);
}

// 5: the grab-b rule on the prescribed-hub axis instance (k=100, l=2):
// the decoy event "b taken within the first k/2 steps" has Wilson lower
// bound at least 1/80, and every such trial ends at ratio >= 5.
void criterion_05() {
  const auto t0 = Clock::now();
  const int k = 100, l = 2, trials = 5000;
  const auto inst = gen_appendix_a(k, l);
  const Rule rule = make_rule("appendix-a", inst);
  const double floor_ratio =
      std::pow(static_cast<double>(k), 1.0 - 1.0 / l) / 2.0;  // = 5
  long events = 0;
  bool structural_ok = true;
  for (int tr = 0; tr < trials; ++tr) {
    const auto r = seed_with_rule(inst.X, inst.k, l, rule, mix_seed(105, tr),
                                  inst.prescribed);
    bool b_early = false;
    for (const auto& rec : r.trace.steps) {
      if (rec.step > k / 2) break;
      if (rec.candidates[static_cast<std::size_t>(rec.chosen_slot)] ==
          inst.roles.at("b")) {
        b_early = true;
        break;
      }
    }
    if (b_early) {
      ++events;
      const double ratio =
          r.trace.steps.back().cost_after / inst.ground_truth_cost;
      structural_ok = structural_ok && ratio >= floor_ratio * (1 - 1e-9);
    }
  }
  const auto wi = wilson(events, trials);
  report(5, wi.low >= 1.0 / 80.0 && structural_ok,
         "decoy-b event on the axis instance: freq " +
             fmt_double(events / static_cast<double>(trials)) +
             ", Wilson low " + fmt_double(wi.low) + " >= 0.0125; ratio floor " +
             fmt_double(floor_ratio) + " held in all event trials",
         secs(t0), 600.0);
}

// 6: the grab-d/b rule on the heavy-hub star (k=100, l = ceil(3 ln k)):
// conditioned on b being taken, the final ratio is at least k in every
// trial; the unconditional b frequency is reported with its interval.
void criterion_06() {
  const auto t0 = Clock::now();
  const int k = 100, trials = 5000;
  const int l = static_cast<int>(std::ceil(3.0 * std::log(k)));
  const auto inst = gen_fig1(k);
  const Rule rule = make_rule("fig1", inst);
  long b_sel = 0, cond_ok = 0;
  for (int tr = 0; tr < trials; ++tr) {
    const auto r = seed_with_rule(inst.X, inst.k, l, rule, mix_seed(106, tr));
    bool b = false;
    for (const auto& rec : r.trace.steps)
      if (rec.candidates[static_cast<std::size_t>(rec.chosen_slot)] ==
          inst.roles.at("b")) {
        b = true;
        break;
      }
    if (b) {
      ++b_sel;
      const double ratio =
          r.trace.steps.back().cost_after / inst.ground_truth_cost;
      cond_ok += ratio >= static_cast<double>(k) * (1 - 1e-9);
    }
  }
  const auto wi = wilson(b_sel, trials);
  report(6, b_sel > 0 && cond_ok == b_sel,
         "star instance, l=" + std::to_string(l) + ": ratio >= k in " +
             std::to_string(cond_ok) + "/" + std::to_string(b_sel) +
             " b-trials; unconditional b freq " +
             fmt_double(b_sel / static_cast<double>(trials)) + " (Wilson " +
             fmt_double(wi.low) + ".." + fmt_double(wi.high) + ")",
         secs(t0));
}

// 7: layered hard instance at (k=1000, l=4) with the phase-count divisor
// overridden to 1: the clock-weight bracket and the per-layer drop ordering
// checks inside the generator must pass; 200 greedy trials are report-only.
void criterion_07() {
  const auto t0 = Clock::now();
  bool built = false;
  std::string note;
  std::vector<double> ratios;
  try {
    GreedyLbConstants c;
    c.t_scale = 1.0;
    const auto inst = gen_greedy_lb(1000, 4, c);
    built = true;
    greedy_lb_structural_checks(inst);  // re-assert on the built artifact
    const int trials = 200;
    ratios.resize(trials);
    parallel_for(trials, 4, [&](int tr) {
      const auto r = seed_greedy(inst.X, inst.k, 4, mix_seed(107, tr),
                                 inst.prescribed);
      ratios[static_cast<std::size_t>(tr)] =
          r.trace.steps.back().cost_after / inst.ground_truth_cost;
    });
    note = "t=" + inst.metadata.at("params").at("t").dump() +
           "; ratio quantiles p05/p50/p95 = " +
           fmt_double(quantile(ratios, 0.05)) + "/" +
           fmt_double(quantile(ratios, 0.50)) + "/" +
           fmt_double(quantile(ratios, 0.95)) + " (report-only)";
  } catch (const std::exception& e) {
    note = e.what();
  }
  report(7, built,
         "layered instance structural checks at k=1000, l=4, divisor 1; " + note,
         secs(t0));
}

// 8: hits on reference clusters grow strictly with the candidate count at
// three sigma: mixture of 16 unit clusters, 1600 points, 2000 trials per l.
void criterion_08() {
  const auto t0 = Clock::now();
  const auto inst = gen_gaussian_mixture(16, 100, 4, 500.0, 808);
  RunConfig base;
  const auto part = reference_partition(inst, base);
  const auto opt1 = cluster_opt1(inst.X, *part);
  const int trials = 2000;
  std::vector<double> means, ses;
  bool cap_ok = true;
  for (int l : {1, 2, 4, 8}) {
    std::vector<double> per_trial(trials);
    for (int tr = 0; tr < trials; ++tr) {
      const auto r =
          seed_greedy(inst.X, inst.k, l, mix_seed(1080 + l, tr));
      const auto tm = measure_trial(inst.X, r.trace, *part, opt1);
      long h = 0;
      for (long x : tm.hit_per_cluster) h += x;
      cap_ok = cap_ok && h <= static_cast<long>(l) * inst.k &&
               std::isfinite(static_cast<double>(h));
      per_trial[static_cast<std::size_t>(tr)] =
          static_cast<double>(h) / static_cast<double>(inst.k);
    }
    means.push_back(mean(per_trial));
    ses.push_back(sample_sd(per_trial) / std::sqrt(static_cast<double>(trials)));
  }
  bool increasing = true;
  for (std::size_t i = 1; i < means.size(); ++i) {
    const double gap = means[i] - means[i - 1];
    const double se = std::sqrt(ses[i] * ses[i] + ses[i - 1] * ses[i - 1]);
    increasing = increasing && gap > 3.0 * se;
  }
  report(8, increasing && cap_ok,
         "cluster-hit growth in the candidate count: means " +
             fmt_double(means[0]) + " < " + fmt_double(means[1]) + " < " +
             fmt_double(means[2]) + " < " + fmt_double(means[3]) +
             " at 3 sigma; trivial cap held",
         secs(t0));
}

// 9: one-sample removal process, k=50, weights 1..50: the mean average
// surviving weight never increases between rounds beyond 3 sigma.
void criterion_09() {
  const auto t0 = Clock::now();
  const int k = 50, trials = 10000;
  std::vector<double> w(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) w[static_cast<std::size_t>(i)] = i + 1.0;
  const Adversary adv = adversary_identity();
  // paired per-trial differences between consecutive rounds
  std::vector<double> dsum(static_cast<std::size_t>(k - 1), 0.0);
  std::vector<double> dsq(static_cast<std::size_t>(k - 1), 0.0);
  for (int tr = 0; tr < trials; ++tr) {
    const auto t = run_process_trial(w, 1, adv, mix_seed(109, tr));
    for (int i = 0; i + 1 < k; ++i) {
      const double d = t.avg[static_cast<std::size_t>(i + 1)] -
                       t.avg[static_cast<std::size_t>(i)];
      dsum[static_cast<std::size_t>(i)] += d;
      dsq[static_cast<std::size_t>(i)] += d * d;
    }
  }
  bool ok = true;
  double worst_z = -1e9;
  for (int i = 0; i + 1 < k; ++i) {
    const double m = dsum[static_cast<std::size_t>(i)] / trials;
    const double var =
        (dsq[static_cast<std::size_t>(i)] - trials * m * m) / (trials - 1);
    const double se = std::sqrt(std::max(var, 1e-300) / trials);
    worst_z = std::max(worst_z, m / se);
    ok = ok && m <= 3.0 * se;
  }
  report(9, ok,
         "single-sample process drift nonincreasing at every round (worst z " +
             fmt_double(worst_z) + ")",
         secs(t0), 120.0);
}

// 10: protect-heaviest adversary on 7 unit elements plus one of weight 8,
// l = k = 8: the heavy element's removal-round distribution matches the
// exact recursion within 2 sigma per round, and the measured drift reaches
// half of k relative to the starting average.
void criterion_10() {
  const auto t0 = Clock::now();
  const int k = 8, trials = 100000;
  std::vector<double> w(static_cast<std::size_t>(k), 1.0);
  w.back() = k;
  const int heavy = k - 1;
  // exact removal-round distribution: while the heavy survives with r
  // lights, it is removed only when all k samples hit it
  std::vector<double> dp(static_cast<std::size_t>(k), 0.0);
  {
    double alive = 1.0;
    for (int j = 0; j < k; ++j) {
      const int lights = k - 1 - j;
      const double pj =
          lights <= 0
              ? 1.0
              : std::pow(static_cast<double>(k) / (k + lights), k);
      dp[static_cast<std::size_t>(j)] = alive * pj;
      alive *= 1.0 - pj;
    }
  }
  std::vector<long> counts(static_cast<std::size_t>(k), 0);
  const Adversary adv = adversary_protect_heaviest();
  for (int tr = 0; tr < trials; ++tr) {
    const auto t = run_process_trial(w, k, adv, mix_seed(110, tr));
    for (std::size_t r = 0; r < t.removed.size(); ++r)
      if (t.removed[r] == heavy) {
        ++counts[r];
        break;
      }
  }
  bool dist_ok = true;
  double worst_z = 0.0;
  for (int r = 0; r < k; ++r) {
    const double p = dp[static_cast<std::size_t>(r)];
    const double f =
        counts[static_cast<std::size_t>(r)] / static_cast<double>(trials);
    const double sd = std::sqrt(std::max(p * (1 - p), 1e-12) / trials);
    worst_z = std::max(worst_z, std::fabs(f - p) / sd);
    dist_ok = dist_ok && std::fabs(f - p) <= 2.0 * sd;
  }
  const double g = estimate_g(k, k, "protect-heaviest", 1100, 20000);
  report(10, dist_ok && g >= 0.5 * k,
         "heavy-element survival matches the exact recursion (worst z " +
             fmt_double(worst_z) + "); measured drift " + fmt_double(g) +
             " >= " + fmt_double(0.5 * k),
         secs(t0));
}

// 11: byte-identical reruns of every subcommand with a fixed seed,
// including one versus eight workers.
void criterion_11() {
  const auto t0 = Clock::now();
  bool ok = true;
  const std::string inst_path = "/tmp/kmxx_acc_inst.json";
  std::ostringstream sink;  // swallow the subcommands' stdout chatter
  auto run_cli = [&](std::vector<const char*> argv) {
    argv.insert(argv.begin(), "kmxx");
    auto* old = std::cout.rdbuf(sink.rdbuf());
    const int rc = cli_main(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(old);
    return rc == 0;
  };
  // gen twice
  ok = ok && run_cli({"gen", "gaussian", "--k", "4", "--ppc", "12", "--d", "2",
                      "--separation", "30", "--seed", "9", "--out",
                      inst_path.c_str()});
  const std::string gen1 = read_file(inst_path);
  ok = ok && run_cli({"gen", "gaussian", "--k", "4", "--ppc", "12", "--d", "2",
                      "--separation", "30", "--seed", "9", "--out",
                      inst_path.c_str()});
  ok = ok && read_file(inst_path) == gen1;
  // run with 1 worker, rerun, then 8 workers
  const std::string csv_path = "/tmp/kmxx_acc_run.csv";
  ok = ok && run_cli({"run", "--instance", inst_path.c_str(), "--alg", "greedy",
                      "--l", "3", "--trials", "24", "--seed", "31", "--out-csv",
                      csv_path.c_str()});
  const std::string run1 = read_file(csv_path);
  ok = ok && run_cli({"run", "--instance", inst_path.c_str(), "--alg", "greedy",
                      "--l", "3", "--trials", "24", "--seed", "31", "--out-csv",
                      csv_path.c_str()});
  ok = ok && read_file(csv_path) == run1;
  ok = ok && run_cli({"run", "--instance", inst_path.c_str(), "--alg", "greedy",
                      "--l", "3", "--trials", "24", "--seed", "31", "--workers",
                      "8", "--out-csv", csv_path.c_str()});
  ok = ok && read_file(csv_path) == run1;
  // process twice
  const std::string p_path = "/tmp/kmxx_acc_proc.csv";
  ok = ok && run_cli({"process", "--k", "8", "--l", "4", "--adversary",
                      "protect-heaviest", "--trials", "100", "--seed", "3",
                      "--out-csv", p_path.c_str()});
  const std::string proc1 = read_file(p_path);
  ok = ok && run_cli({"process", "--k", "8", "--l", "4", "--adversary",
                      "protect-heaviest", "--trials", "100", "--seed", "3",
                      "--out-csv", p_path.c_str()});
  ok = ok && read_file(p_path) == proc1;
  // oracle twice
  const std::string o_path = "/tmp/kmxx_acc_oracle.json";
  ok = ok && run_cli({"oracle", "--instance", inst_path.c_str(), "--method",
                      "subset", "--k", "4", "--out", o_path.c_str()});
  const std::string orc1 = read_file(o_path);
  ok = ok && run_cli({"oracle", "--instance", inst_path.c_str(), "--method",
                      "subset", "--k", "4", "--out", o_path.c_str()});
  ok = ok && read_file(o_path) == orc1;
  // verify exits 0
  ok = ok && run_cli({"verify", "--instance", inst_path.c_str()});
  report(11, ok, "byte-identical reruns across subcommands and 1 vs 8 workers",
         secs(t0));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion_01();
  criterion_02();
  criterion_03();
  criterion_04();
  criterion_05();
  criterion_06();
  criterion_07();
  criterion_08();
  criterion_09();
  criterion_10();
  criterion_11();
  std::printf("%s: %d of 11 criteria failed [total %.1fs]\n",
              g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              g_failures, secs(t0));
  return g_failures == 0 ? 0 : 1;
}
