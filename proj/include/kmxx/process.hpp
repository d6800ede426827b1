#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kmxx/geometry.hpp"
#include "kmxx/rng.hpp"

namespace kmxx {

// k-round element-removal game: each round samples some elements with
// probability proportional to weight, an adversary removes one of the
// sampled elements and may then shrink the survivors' weights.
struct ProcessState {
  std::vector<int> ids;         // surviving element ids, ascending
  std::vector<double> weights;  // parallel to ids
  int round = 0;
  std::vector<double> avg_series;  // average surviving weight per round start
};

struct Adversary {
  std::string name;
  // number of samples this round, in [1, l]
  std::function<int(const ProcessState&, int l)> sample_count;
  // element id to remove, among the sampled ids
  std::function<int(const ProcessState&, std::span<const int> sampled)> removal;
  // new weights for the survivors (post-removal, same order); must be
  // elementwise within [0, old]; empty means unchanged
  std::function<std::vector<double>(const ProcessState&)> shrink;
};

Adversary adversary_identity();
Adversary adversary_protect_heaviest();
Adversary make_adversary(const std::string& name);

struct ProcessTrial {
  std::vector<double> avg;       // AVG_i for i = 0..k-1
  std::vector<double> max_w;     // max surviving weight per round start
  std::vector<int> removed;      // removed element id per round
};

ProcessTrial run_process_trial(std::span<const double> initial_weights, int l,
                               const Adversary& adv, std::uint64_t seed);

struct ProcessStats {
  std::size_t trials = 0;
  std::vector<double> mean_avg;   // per round
  std::vector<double> max_avg;    // per round, max over trials
  std::vector<double> sd_avg;     // per round, sample standard deviation
  double max_drift = 0.0;         // max over rounds/trials of AVG_i / AVG_0
};

ProcessStats run_process(std::span<const double> initial_weights, int l,
                         const Adversary& adv, std::uint64_t seed, int trials);

// Empirical lower bound on the worst-case drift of the average element
// weight: max over rounds and trials of AVG_i / AVG_0. Families carry their
// canonical initial weights: "identity" plays on uniform weights,
// "protect-heaviest" on k-1 unit elements plus one of weight k. Explicit
// weights override the family default.
double estimate_g(int k, int l, const std::string& adversary_family,
                  std::uint64_t seed, int trials,
                  std::span<const double> initial_weights = {});

}  // namespace kmxx
