#include "kmxx/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "kmxx/io.hpp"
#include "kmxx/oracle.hpp"
#include "kmxx/process.hpp"
#include "kmxx/stats.hpp"

#include "CLI11.hpp"

namespace kmxx {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct AlgSpec {
  enum Kind { KMeansPP, Greedy, Named, Uniform } kind = KMeansPP;
  std::string rule_name;
};

AlgSpec parse_algorithm(const std::string& s) {
  if (s == "kmeanspp") return {AlgSpec::KMeansPP, ""};
  if (s == "greedy") return {AlgSpec::Greedy, ""};
  if (s == "uniform-baseline") return {AlgSpec::Uniform, ""};
  if (s.rfind("rule:", 0) == 0) return {AlgSpec::Named, s.substr(5)};
  throw Error("unknown algorithm: " + s);
}

std::string csv_cell(double v) {
  return std::isnan(v) ? std::string() : fmt_double(v);
}

}  // namespace

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto body = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int nthreads = std::min(workers, count);
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int w = 0; w < nthreads; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::optional<OptimalPartition> reference_partition(const Instance& inst,
                                                    const RunConfig& cfg) {
  const std::string mode = cfg.reference;
  if (mode == "none") return std::nullopt;
  if ((mode == "auto" || mode == "ground-truth") && inst.ground_truth) {
    OptimalPartition part =
        partition_from_centers(inst.X, *inst.ground_truth, "ground-truth");
    part.opt_cost = inst.ground_truth_cost;
    return part;
  }
  if (mode == "ground-truth")
    throw Error("reference: instance has no ground truth");
  const int n = static_cast<int>(inst.X.size());
  const int k_total = inst.k + static_cast<int>(inst.prescribed.size());
  if (mode == "auto" || mode == "exact") {
    if (partition_count(n, std::min(k_total, n)) <= 2'000'000) {
      const ExactOptResult r = opt_partition(inst.X, k_total);
      return partition_from_labels(inst.X, r.labels, r.opt_cost, "exact");
    }
    if (mode == "exact") throw Error("reference: exact enumeration over budget");
  }
  // best-of-50 refined seeding, labeled heuristic
  double best_cost = std::numeric_limits<double>::infinity();
  std::optional<CenterSet> best;
  for (int r = 0; r < 50; ++r) {
    const auto seeded = seed_kmeanspp(inst.X, inst.k,
                                      mix_seed(cfg.seed ^ 0x5245464ULL, r),
                                      inst.prescribed);
    const auto refined = lloyd_refine(inst.X, seeded.centers, 100, 1e-9);
    if (refined.cost_history.back() < best_cost) {
      best_cost = refined.cost_history.back();
      best = refined.centers;
    }
  }
  OptimalPartition part = partition_from_centers(inst.X, *best, "heuristic");
  part.opt_cost = best_cost;
  return part;
}

AggregateReport run_experiment(const Instance& inst, const RunConfig& cfg) {
  if (cfg.trials < 1) throw Error("run: need at least one trial");
  const auto t0 = std::chrono::steady_clock::now();
  const AlgSpec alg = parse_algorithm(cfg.algorithm);
  Rule rule;
  int n_candidates = cfg.n_candidates;
  switch (alg.kind) {
    case AlgSpec::KMeansPP:
      rule = greedy_rule();
      n_candidates = 1;
      break;
    case AlgSpec::Greedy:
      rule = greedy_rule();
      break;
    case AlgSpec::Named:
      rule = make_rule(alg.rule_name, inst);
      break;
    case AlgSpec::Uniform:
      n_candidates = 1;
      break;
  }

  const auto part = reference_partition(inst, cfg);
  std::vector<double> opt1;
  if (part) opt1 = cluster_opt1(inst.X, *part);

  std::vector<std::string> tracked_roles;
  for (const auto& [name, idx] : inst.roles) {
    (void)idx;
    tracked_roles.push_back(name);
  }

  AggregateReport rep;
  rep.trials.resize(static_cast<std::size_t>(cfg.trials));
  if (part) {
    rep.reference_source = part->source;
    rep.reference_cost = part->opt_cost;
  }

  parallel_for(cfg.trials, cfg.workers, [&](int tr) {
    const std::uint64_t tseed = mix_seed(cfg.seed, static_cast<std::uint64_t>(tr));
    SeedResult sr = [&] {
      switch (alg.kind) {
        case AlgSpec::Uniform:
          return seed_uniform(inst.X, inst.k, tseed, inst.prescribed);
        default:
          return seed_with_rule(inst.X, inst.k, n_candidates, rule, tseed,
                                inst.prescribed);
      }
    }();

    TrialResult res;
    res.trial = tr;
    res.final_cost = sr.trace.steps.back().cost_after;
    res.lloyd_cost = kNan;
    if (cfg.lloyd.enabled) {
      const auto refined = lloyd_refine(inst.X, sr.centers, cfg.lloyd.max_iters,
                                        cfg.lloyd.tol);
      res.lloyd_cost = refined.cost_history.back();
    }
    const double used_cost =
        cfg.lloyd.enabled ? res.lloyd_cost : res.final_cost;
    res.ratio = kNan;
    if (part) {
      res.ratio = part->opt_cost > 0.0
                      ? used_cost / part->opt_cost
                      : (used_cost == 0.0 ? 1.0
                                          : std::numeric_limits<double>::infinity());
      const TrialMeasures tm =
          measure_trial(inst.X, sr.trace, *part, opt1, cfg.solved_factor);
      res.good_steps = tm.good_steps;
      res.bad_steps = tm.bad_steps;
      for (long h : tm.hit_per_cluster) {
        res.hit_total += h;
        res.hit_max_cluster = std::max(res.hit_max_cluster, h);
      }
    }
    for (const auto& name : tracked_roles) {
      const int target = inst.roles.at(name);
      int step = -1;
      for (const auto& rec : sr.trace.steps) {
        if (rec.candidates[static_cast<std::size_t>(rec.chosen_slot)] == target) {
          step = rec.step;
          break;
        }
      }
      res.role_steps[name] = step;
    }
    rep.trials[static_cast<std::size_t>(tr)] = std::move(res);
  });

  std::vector<double> costs, ratios;
  costs.reserve(rep.trials.size());
  for (const auto& t : rep.trials) {
    const double used = cfg.lloyd.enabled ? t.lloyd_cost : t.final_cost;
    costs.push_back(used);
    if (!std::isnan(t.ratio)) ratios.push_back(t.ratio);
    if (cfg.bad_ratio_threshold && !std::isnan(t.ratio) &&
        t.ratio >= *cfg.bad_ratio_threshold)
      ++rep.bad_events;
  }
  rep.mean_cost = mean(costs);
  rep.sd_cost = sample_sd(costs);
  rep.q05 = quantile(costs, 0.05);
  rep.q25 = quantile(costs, 0.25);
  rep.q50 = quantile(costs, 0.50);
  rep.q75 = quantile(costs, 0.75);
  rep.q95 = quantile(costs, 0.95);
  if (!ratios.empty()) {
    rep.mean_ratio = mean(ratios);
    rep.sd_ratio = sample_sd(ratios);
  } else {
    rep.mean_ratio = rep.sd_ratio = kNan;
  }
  if (cfg.bad_ratio_threshold) {
    rep.bad_event_freq =
        static_cast<double>(rep.bad_events) / static_cast<double>(cfg.trials);
    const WilsonInterval wi = wilson(rep.bad_events, cfg.trials);
    rep.bad_event_wilson_low = wi.low;
    rep.bad_event_wilson_high = wi.high;
  }
  rep.runtime_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

std::string run_csv(const Instance& inst, const AggregateReport& rep) {
  std::ostringstream out;
  out << "# schema=kmxx.run_trials.v1\n";
  out << "trial,final_cost,lloyd_cost,ratio,good_steps,bad_steps,hit_total,"
         "hit_max_cluster";
  std::vector<std::string> roles;
  for (const auto& [name, idx] : inst.roles) {
    (void)idx;
    roles.push_back(name);
    out << ",sel_step_" << name;
  }
  out << "\n";
  for (const auto& t : rep.trials) {
    out << t.trial << "," << csv_cell(t.final_cost) << ","
        << csv_cell(t.lloyd_cost) << "," << csv_cell(t.ratio) << ","
        << t.good_steps << "," << t.bad_steps << "," << t.hit_total << ","
        << t.hit_max_cluster;
    for (const auto& name : roles) out << "," << t.role_steps.at(name);
    out << "\n";
  }
  return out.str();
}

nlohmann::json run_summary(const Instance& inst, const RunConfig& cfg,
                           const AggregateReport& rep) {
  nlohmann::json j;
  j["schema"] = "kmxx.run_summary.v1";
  j["config"] = {{"algorithm", cfg.algorithm},
                 {"n_candidates", cfg.n_candidates},
                 {"trials", cfg.trials},
                 {"seed", cfg.seed},
                 {"workers", cfg.workers},
                 {"lloyd", cfg.lloyd.enabled},
                 {"solved_factor", cfg.solved_factor},
                 {"reference", cfg.reference}};
  j["instance"] = {{"generator", inst.metadata.value("generator", std::string())},
                   {"n", inst.X.size()},
                   {"dim", inst.X.dim()},
                   {"k", inst.k}};
  j["reference"] = {{"source", rep.reference_source},
                    {"cost", rep.reference_cost}};
  j["cost"] = {{"mean", rep.mean_cost}, {"sd", rep.sd_cost},
               {"q05", rep.q05},        {"q25", rep.q25},
               {"q50", rep.q50},        {"q75", rep.q75},
               {"q95", rep.q95}};
  if (!std::isnan(rep.mean_ratio))
    j["ratio"] = {{"mean", rep.mean_ratio}, {"sd", rep.sd_ratio}};
  if (cfg.bad_ratio_threshold)
    j["bad_event"] = {{"threshold", *cfg.bad_ratio_threshold},
                      {"count", rep.bad_events},
                      {"freq", rep.bad_event_freq},
                      {"wilson_low", rep.bad_event_wilson_low},
                      {"wilson_high", rep.bad_event_wilson_high}};
  j["runtime_sec"] = rep.runtime_sec;
  return j;
}

std::string process_csv(const ProcessConfig& cfg) {
  std::vector<double> w = cfg.weights;
  if (w.empty()) {
    w.assign(static_cast<std::size_t>(cfg.k), 1.0);
    if (cfg.adversary == "protect-heaviest")
      w.back() = static_cast<double>(cfg.k);
  }
  const Adversary adv = make_adversary(cfg.adversary);
  std::ostringstream out;
  out << "# schema=kmxx.process.v1\n";
  out << "trial,round,avg,max_weight,removed_id\n";
  for (int tr = 0; tr < cfg.trials; ++tr) {
    const ProcessTrial t = run_process_trial(w, cfg.l, adv, mix_seed(cfg.seed, tr));
    for (std::size_t r = 0; r < t.avg.size(); ++r)
      out << tr << "," << r << "," << fmt_double(t.avg[r]) << ","
          << fmt_double(t.max_w[r]) << "," << t.removed[r] << "\n";
  }
  return out.str();
}

// --------------------------------------------------------------------------
// verify
// --------------------------------------------------------------------------

namespace {

struct CheckLog {
  bool ok = true;
  bool quiet;
  explicit CheckLog(bool q) : quiet(q) {}
  void check(bool pass, const std::string& what) {
    ok = ok && pass;
    if (!quiet || !pass)
      std::cout << (pass ? "[ok]   " : "[FAIL] ") << what << "\n";
  }
};

bool rel_close(double a, double b, double tol) {
  const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
  return std::fabs(a - b) / scale <= tol || a == b;
}

}  // namespace

bool verify_instance(const Instance& inst, bool quiet) {
  CheckLog log(quiet);
  log.check(static_cast<std::size_t>(inst.k) + inst.prescribed.size() <=
                inst.X.size(),
            "k + prescribed within point count");
  bool weights_ok = true;
  for (const auto& p : inst.X.points()) weights_ok = weights_ok && p.weight >= 0.0;
  log.check(weights_ok, "weights nonnegative");

  if (inst.ground_truth) {
    const double recomputed =
        inst.ground_truth_kind == "partition"
            ? [&] {
                const auto part = partition_from_centers(
                    inst.X, *inst.ground_truth, "ground-truth");
                double c = 0.0;
                for (const auto& cl : part.clusters) {
                  if (cl.members.empty()) continue;
                  double w = 0.0;
                  for (int m : cl.members)
                    w += inst.X[static_cast<std::size_t>(m)].weight;
                  if (w > 0.0) c += centroid_and_opt1(inst.X, cl.members).cost;
                }
                return c;
              }()
            : total_cost(inst.X, *inst.ground_truth);
    log.check(rel_close(recomputed, inst.ground_truth_cost, 1e-9),
              "ground-truth cost recomputes (" + fmt_double(recomputed) + ")");
  }

  const std::string gen = inst.metadata.value("generator", std::string());
  if (gen == "fig1") {
    const int k = inst.metadata.at("params").at("k").get<int>();
    const double kd = static_cast<double>(k);
    auto leave_out = [&](int omit) {
      std::vector<int> centers;
      for (std::size_t i = 0; i < inst.X.size(); ++i)
        if (static_cast<int>(i) != omit) centers.push_back(static_cast<int>(i));
      return total_cost(inst.X, CenterSet::from_points(inst.X, centers));
    };
    log.check(rel_close(leave_out(inst.roles.at("b")), 1.0, 1e-9),
              "leaving out b costs 1");
    log.check(rel_close(leave_out(1), kd * kd, 1e-9),
              "leaving out a dummy costs k^2");
    log.check(rel_close(leave_out(inst.roles.at("c")), kd, 1e-9),
              "leaving out c costs k");
    double others = 0.0;
    for (std::size_t i = 1; i < inst.X.size(); ++i) others += inst.X[i].weight;
    log.check(inst.X[0].weight >= 1e5 * others, "hub weight dominates");
  } else if (gen == "appendix-a") {
    const int k = inst.metadata.at("params").at("k").get<int>();
    const double kd = static_cast<double>(k);
    const auto& b = inst.X[static_cast<std::size_t>(inst.roles.at("b"))].coords;
    const auto& c = inst.X[static_cast<std::size_t>(inst.roles.at("c"))].coords;
    const auto& d = inst.X[static_cast<std::size_t>(inst.roles.at("d"))].coords;
    log.check(rel_close(std::sqrt(sqdist(b, d)), kd, 1e-9), "|b - d| = k");
    log.check(rel_close(std::sqrt(sqdist(b, c)), 1.0, 1e-9), "|b - c| = 1");
    bool axes_ok = true;
    for (int i = 1; i <= k - 1 && axes_ok; ++i)
      for (int j = i + 1; j <= k - 1 && axes_ok; ++j)
        axes_ok = rel_close(
            sqdist(inst.X[static_cast<std::size_t>(i)].coords,
                   inst.X[static_cast<std::size_t>(j)].coords),
            2.0 * kd * kd, 1e-9);
    log.check(axes_ok, "axis points pairwise k*sqrt(2) apart");
    log.check(rel_close(inst.ground_truth_cost, 1.0, 1e-9),
              "reference optimum costs 1");
  } else if (gen == "greedy-lb") {
    try {
      greedy_lb_structural_checks(inst);
      log.check(true, "layered structure (weight bracket, separations, orderings)");
    } catch (const Error& e) {
      log.check(false, e.what());
    }
  } else if (gen == "gaussian") {
    const double sep =
        inst.metadata.at("params").at("separation").get<double>();
    bool sep_ok = true;
    const auto& ref = *inst.ground_truth;
    for (std::size_t i = 0; i < ref.size() && sep_ok; ++i)
      for (std::size_t j = i + 1; j < ref.size() && sep_ok; ++j)
        sep_ok = sqdist(ref.coords(i), ref.coords(j)) >= sep * sep * (1.0 - 1e-12);
    log.check(sep_ok, "cluster means separated");
  }
  return log.ok;
}

// --------------------------------------------------------------------------
// CLI
// --------------------------------------------------------------------------

namespace {

int cmd_gen_main(CLI::App* app) {
  const std::string generator = app->get_option("generator")->as<std::string>();
  const std::string out = app->get_option("--out")->as<std::string>();
  const int k = app->get_option("--k")->as<int>();
  const int l = app->get_option("--l")->as<int>();

  Instance inst = [&]() -> Instance {
    if (generator == "fig1") return gen_fig1(k);
    if (generator == "appendix-a") return gen_appendix_a(k, l);
    if (generator == "greedy-lb") {
      GreedyLbConstants c;
      c.t_scale = app->get_option("--ct")->as<double>();
      if (app->count("--t-override"))
        c.t_override = app->get_option("--t-override")->as<int>();
      if (app->count("--wc")) c.w_c = app->get_option("--wc")->as<double>();
      if (app->count("--wb-scale"))
        c.w_b_scale = app->get_option("--wb-scale")->as<double>();
      return gen_greedy_lb(k, l, c);
    }
    if (generator == "gaussian") {
      return gen_gaussian_mixture(
          k, app->get_option("--ppc")->as<int>(),
          app->get_option("--d")->as<int>(),
          app->get_option("--separation")->as<double>(),
          app->get_option("--seed")->as<std::uint64_t>());
    }
    throw Error("unknown generator: " + generator);
  }();

  if (app->count("--lift"))
    inst = lift_prescribed(inst, app->get_option("--lift")->as<double>());
  if (app->count("--multiplicity"))
    inst = weights_to_multiplicity(
        inst, app->get_option("--multiplicity")->as<double>());

  save_instance(inst, out);
  std::cout << "wrote " << out << " (n=" << inst.X.size() << ", dim="
            << inst.X.dim() << ", k=" << inst.k
            << ", ground_truth_cost=" << fmt_double(inst.ground_truth_cost)
            << ")\n";
  return 0;
}

void apply_config_json(const nlohmann::json& j, RunConfig& cfg,
                       std::string& instance_path) {
  if (j.contains("instance")) instance_path = j.at("instance").get<std::string>();
  if (j.contains("algorithm")) cfg.algorithm = j.at("algorithm").get<std::string>();
  if (j.contains("l")) cfg.n_candidates = j.at("l").get<int>();
  if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
  if (j.contains("lloyd")) cfg.lloyd.enabled = j.at("lloyd").get<bool>();
  if (j.contains("lloyd_max_iters"))
    cfg.lloyd.max_iters = j.at("lloyd_max_iters").get<int>();
  if (j.contains("lloyd_tol")) cfg.lloyd.tol = j.at("lloyd_tol").get<double>();
  if (j.contains("solved_factor"))
    cfg.solved_factor = j.at("solved_factor").get<double>();
  if (j.contains("bad_ratio"))
    cfg.bad_ratio_threshold = j.at("bad_ratio").get<double>();
  if (j.contains("reference")) cfg.reference = j.at("reference").get<std::string>();
  if (j.contains("out_csv")) cfg.out_csv = j.at("out_csv").get<std::string>();
  if (j.contains("out_summary"))
    cfg.out_summary = j.at("out_summary").get<std::string>();
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"k-means seeding benchmark harness"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate an instance file");
  std::string gen_name, gen_out = "instance.json";
  int gen_k = 16, gen_l = 2, gen_ppc = 50, gen_d = 2, gen_tov = 0;
  double gen_ct = 1000.0, gen_sep = 10.0, gen_lift = 0.0, gen_mult = 0.0;
  double gen_wc = 0.1, gen_wb = 1.0;
  std::uint64_t gen_seed = 1;
  gen->add_option("generator", gen_name,
                  "fig1 | appendix-a | greedy-lb | gaussian")->required();
  gen->add_option("--k", gen_k, "target center count / cluster count");
  gen->add_option("--l", gen_l, "candidate count the instance is tuned for");
  gen->add_option("--ct", gen_ct, "phase-count divisor constant (greedy-lb)");
  gen->add_option("--t-override", gen_tov, "explicit phase count (greedy-lb)");
  gen->add_option("--wc", gen_wc, "weight of c (greedy-lb)");
  gen->add_option("--wb-scale", gen_wb, "numerator of w(b) (greedy-lb)");
  gen->add_option("--ppc", gen_ppc, "points per cluster (gaussian)");
  gen->add_option("--d", gen_d, "dimension (gaussian)");
  gen->add_option("--separation", gen_sep, "minimum mean distance (gaussian)");
  gen->add_option("--seed", gen_seed, "generator seed (gaussian)");
  gen->add_option("--lift", gen_lift, "lift prescribed centers by this weight factor");
  gen->add_option("--multiplicity", gen_mult, "replace weights by copies at this scale");
  gen->add_option("--out", gen_out, "output path")->capture_default_str();

  // run
  auto* run = app.add_subcommand("run", "run seeding trials on an instance");
  std::string run_instance, run_config;
  RunConfig rc;
  run->add_option("--instance", run_instance, "instance file");
  run->add_option("--config", run_config, "JSON config file (flags override)");
  run->add_option("--alg", rc.algorithm,
                  "kmeanspp | greedy | rule:<name> | uniform-baseline");
  run->add_option("--l", rc.n_candidates, "candidates per step");
  run->add_option("--trials", rc.trials, "number of trials");
  run->add_option("--seed", rc.seed, "base seed");
  run->add_option("--workers", rc.workers, "worker threads");
  bool run_lloyd = false;
  run->add_flag("--lloyd", run_lloyd, "refine each trial's seed");
  run->add_option("--lloyd-max-iters", rc.lloyd.max_iters, "refinement iteration cap");
  run->add_option("--lloyd-tol", rc.lloyd.tol, "relative improvement stop");
  run->add_option("--solved-factor", rc.solved_factor, "solved-cluster factor");
  double run_bad_ratio = 0.0;
  run->add_option("--bad-ratio", run_bad_ratio, "count trials with ratio >= this");
  run->add_option("--reference", rc.reference,
                  "auto | ground-truth | exact | heuristic | none");
  run->add_option("--out-csv", rc.out_csv, "per-trial CSV path");
  run->add_option("--out-summary", rc.out_summary, "summary JSON path");

  // oracle
  auto* orc = app.add_subcommand("oracle", "exact small-instance optimum");
  std::string orc_instance, orc_method = "subset", orc_out;
  int orc_k = 0;
  std::uint64_t orc_budget = 2'000'000;
  orc->add_option("--instance", orc_instance, "instance file")->required();
  orc->add_option("--k", orc_k, "centers (default: instance k + prescribed)");
  orc->add_option("--method", orc_method, "subset | partition");
  orc->add_option("--budget", orc_budget, "enumeration budget");
  orc->add_option("--out", orc_out, "JSON output path");

  // process
  auto* prc = app.add_subcommand("process", "adversarial sampling process");
  ProcessConfig pc;
  std::string prc_weights;
  prc->add_option("--k", pc.k, "element count");
  prc->add_option("--l", pc.l, "samples per round");
  prc->add_option("--adversary", pc.adversary, "identity | protect-heaviest");
  prc->add_option("--trials", pc.trials, "trials");
  prc->add_option("--seed", pc.seed, "base seed");
  prc->add_option("--weights", prc_weights, "comma-separated initial weights");
  prc->add_option("--out-csv", pc.out_csv, "CSV output path");

  // verify
  auto* ver = app.add_subcommand("verify", "run the invariant suite on an instance");
  std::string ver_instance;
  ver->add_option("--instance", ver_instance, "instance file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (gen->parsed()) return cmd_gen_main(gen);

    if (run->parsed()) {
      if (!run_config.empty()) {
        RunConfig from_file;
        std::string inst_from_file;
        apply_config_json(nlohmann::json::parse(read_file(run_config)),
                          from_file, inst_from_file);
        // explicit flags take precedence over the config file
        if (!run->count("--alg")) rc.algorithm = from_file.algorithm;
        if (!run->count("--l")) rc.n_candidates = from_file.n_candidates;
        if (!run->count("--trials")) rc.trials = from_file.trials;
        if (!run->count("--seed")) rc.seed = from_file.seed;
        if (!run->count("--workers")) rc.workers = from_file.workers;
        if (!run->count("--lloyd")) rc.lloyd = from_file.lloyd;
        if (!run->count("--solved-factor"))
          rc.solved_factor = from_file.solved_factor;
        if (!run->count("--bad-ratio"))
          rc.bad_ratio_threshold = from_file.bad_ratio_threshold;
        if (!run->count("--reference")) rc.reference = from_file.reference;
        if (!run->count("--out-csv")) rc.out_csv = from_file.out_csv;
        if (!run->count("--out-summary")) rc.out_summary = from_file.out_summary;
        if (run_instance.empty()) run_instance = inst_from_file;
      }
      if (run_lloyd) rc.lloyd.enabled = true;
      if (run->count("--bad-ratio")) rc.bad_ratio_threshold = run_bad_ratio;
      if (run_instance.empty()) throw Error("run: --instance required");
      const Instance inst = load_instance(run_instance);
      const AggregateReport rep = run_experiment(inst, rc);
      if (!rc.out_csv.empty()) write_file(rc.out_csv, run_csv(inst, rep));
      const nlohmann::json summary = run_summary(inst, rc, rep);
      if (!rc.out_summary.empty())
        write_file(rc.out_summary, summary.dump(1) + "\n");
      std::cout << summary.dump(1) << "\n";
      return 0;
    }

    if (orc->parsed()) {
      const Instance inst = load_instance(orc_instance);
      const int k = orc_k > 0 ? orc_k
                              : inst.k + static_cast<int>(inst.prescribed.size());
      const ExactOptResult r = orc_method == "partition"
                                   ? opt_partition(inst.X, k, orc_budget)
                                   : opt_subset(inst.X, k, orc_budget);
      nlohmann::json j = {{"schema", "kmxx.oracle.v1"},
                          {"method", r.method},
                          {"k", k},
                          {"opt_cost", r.opt_cost}};
      if (!r.centers.empty()) j["centers"] = r.centers;
      if (!orc_out.empty()) write_file(orc_out, j.dump(1) + "\n");
      std::cout << j.dump(1) << "\n";
      return 0;
    }

    if (prc->parsed()) {
      if (!prc_weights.empty()) {
        std::istringstream ss(prc_weights);
        std::string cell;
        while (std::getline(ss, cell, ','))
          pc.weights.push_back(parse_double(cell));
      }
      const std::string csv = process_csv(pc);
      if (!pc.out_csv.empty())
        write_file(pc.out_csv, csv);
      else
        std::cout << csv;
      return 0;
    }

    if (ver->parsed()) {
      const Instance inst = load_instance(ver_instance);
      return verify_instance(inst) ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace kmxx
