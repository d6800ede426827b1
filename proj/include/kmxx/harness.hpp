#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kmxx/instances.hpp"
#include "kmxx/instrumentation.hpp"
#include "kmxx/seeding.hpp"

#include "json.hpp"

namespace kmxx {

struct LloydOptions {
  bool enabled = false;
  int max_iters = 100;
  double tol = 1e-9;
};

struct RunConfig {
  std::string algorithm = "kmeanspp";  // kmeanspp | greedy | rule:<name> | uniform-baseline
  int n_candidates = 1;
  int trials = 1;
  std::uint64_t seed = 1;
  int workers = 1;
  LloydOptions lloyd;
  double solved_factor = kSolvedFactor;
  std::optional<double> bad_ratio_threshold;  // trial is a bad event when ratio >= this
  std::string reference = "auto";  // auto | ground-truth | exact | heuristic | none
  std::string out_csv;
  std::string out_summary;
};

struct TrialResult {
  int trial = 0;
  double final_cost = 0.0;
  double lloyd_cost = 0.0;  // NaN when refinement is off
  double ratio = 0.0;       // NaN when no reference
  long good_steps = 0;
  long bad_steps = 0;
  long hit_total = 0;
  long hit_max_cluster = 0;
  std::map<std::string, int> role_steps;  // step that took the role point, -1 never
};

struct AggregateReport {
  std::vector<TrialResult> trials;
  std::string reference_source;  // "", "ground-truth", "exact", "heuristic"
  double reference_cost = 0.0;
  double mean_cost = 0.0, sd_cost = 0.0;
  double q05 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q95 = 0.0;
  double mean_ratio = 0.0, sd_ratio = 0.0;
  long bad_events = 0;
  double bad_event_freq = 0.0;
  double bad_event_wilson_low = 0.0, bad_event_wilson_high = 1.0;
  double runtime_sec = 0.0;  // reported in the summary only, never in CSV
};

// Picks the reference clustering per config: instance ground truth when
// present, exact enumeration when affordable, best-of-50 refined seeding
// otherwise (labeled heuristic).
std::optional<OptimalPartition> reference_partition(const Instance& inst,
                                                    const RunConfig& cfg);

AggregateReport run_experiment(const Instance& inst, const RunConfig& cfg);

std::string run_csv(const Instance& inst, const AggregateReport& rep);
nlohmann::json run_summary(const Instance& inst, const RunConfig& cfg,
                           const AggregateReport& rep);

struct ProcessConfig {
  int k = 8;
  int l = 1;
  std::string adversary = "identity";
  std::vector<double> weights;  // empty: family default
  int trials = 1000;
  std::uint64_t seed = 1;
  std::string out_csv;
};

std::string process_csv(const ProcessConfig& cfg);

// Invariant suite over an instance file; prints one line per check.
bool verify_instance(const Instance& inst, bool quiet = false);

// Deterministic worker pool: fn(i) for i in [0, count), any worker count.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

int cli_main(int argc, const char* const* argv);

}  // namespace kmxx
