#include "kmxx/process.hpp"

#include <algorithm>
#include <cmath>

namespace kmxx {

Adversary adversary_identity() {
  Adversary a;
  a.name = "identity";
  a.sample_count = [](const ProcessState&, int l) { return l; };
  a.removal = [](const ProcessState&, std::span<const int> sampled) {
    return sampled[0];
  };
  a.shrink = nullptr;
  return a;
}

Adversary adversary_protect_heaviest() {
  Adversary a;
  a.name = "protect-heaviest";
  a.sample_count = [](const ProcessState&, int l) { return l; };
  a.removal = [](const ProcessState& st, std::span<const int> sampled) {
    // remove the lightest sampled element, ties to the lowest id
    int best = -1;
    double bestw = 0.0;
    for (int id : sampled) {
      const auto it = std::lower_bound(st.ids.begin(), st.ids.end(), id);
      const double w = st.weights[static_cast<std::size_t>(it - st.ids.begin())];
      if (best < 0 || w < bestw || (w == bestw && id < best)) {
        best = id;
        bestw = w;
      }
    }
    return best;
  };
  a.shrink = nullptr;
  return a;
}

Adversary make_adversary(const std::string& name) {
  if (name == "identity") return adversary_identity();
  if (name == "protect-heaviest") return adversary_protect_heaviest();
  throw Error("unknown adversary: " + name);
}

ProcessTrial run_process_trial(std::span<const double> initial_weights, int l,
                               const Adversary& adv, std::uint64_t seed) {
  const int k = static_cast<int>(initial_weights.size());
  if (k < 1) throw Error("process: need at least one element");
  if (l < 1) throw Error("process: need l >= 1");
  bool any_positive = false;
  for (double w : initial_weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw Error("process: weights must be finite and nonnegative");
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) throw Error("process: need a positive weight");

  ProcessState st;
  st.ids.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) st.ids[static_cast<std::size_t>(i)] = i;
  st.weights.assign(initial_weights.begin(), initial_weights.end());

  Mt rng(seed);
  ProcessTrial out;
  std::vector<double> cums;
  std::vector<int> sampled;

  for (int round = 0; round < k; ++round) {
    st.round = round;
    double total = 0.0;
    double maxw = 0.0;
    for (double w : st.weights) {
      total += w;
      maxw = std::max(maxw, w);
    }
    const double avg = total / static_cast<double>(k - round);
    st.avg_series.push_back(avg);
    out.avg.push_back(avg);
    out.max_w.push_back(maxw);

    int li = adv.sample_count ? adv.sample_count(st, l) : l;
    if (li < 1 || li > l) throw Error("process: adversary sample count out of range");

    cums.resize(st.weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < st.weights.size(); ++i) {
      acc += st.weights[i];
      cums[i] = acc;
    }
    sampled.clear();
    for (int s = 0; s < li; ++s) {
      const double u = uniform01(rng);
      std::size_t idx;
      if (acc > 0.0) {
        const double target = u * acc;
        auto it = std::upper_bound(cums.begin(), cums.end(), target);
        if (it == cums.end()) {
          idx = cums.size() - 1;
          while (idx > 0 && !(cums[idx - 1] < acc)) --idx;
        } else {
          idx = static_cast<std::size_t>(it - cums.begin());
        }
      } else {
        // all weights zero: uniform over survivors
        idx = std::min(static_cast<std::size_t>(u * static_cast<double>(st.ids.size())),
                       st.ids.size() - 1);
      }
      sampled.push_back(st.ids[idx]);
    }

    const int removed = adv.removal(st, sampled);
    if (std::find(sampled.begin(), sampled.end(), removed) == sampled.end())
      throw Error("process: adversary removed an unsampled element");
    out.removed.push_back(removed);
    const auto rit = std::lower_bound(st.ids.begin(), st.ids.end(), removed);
    const auto rpos = static_cast<std::size_t>(rit - st.ids.begin());
    st.ids.erase(st.ids.begin() + static_cast<std::ptrdiff_t>(rpos));
    st.weights.erase(st.weights.begin() + static_cast<std::ptrdiff_t>(rpos));

    if (adv.shrink) {
      std::vector<double> fresh = adv.shrink(st);
      if (!fresh.empty()) {
        if (fresh.size() != st.weights.size())
          throw Error("process: adversary weight vector has wrong size");
        for (std::size_t i = 0; i < fresh.size(); ++i) {
          if (!(fresh[i] >= 0.0) || fresh[i] > st.weights[i])
            throw Error("process: adversary increased a weight");
        }
        st.weights = std::move(fresh);
      }
    }
  }
  return out;
}

ProcessStats run_process(std::span<const double> initial_weights, int l,
                         const Adversary& adv, std::uint64_t seed, int trials) {
  if (trials < 1) throw Error("process: need at least one trial");
  const std::size_t k = initial_weights.size();
  ProcessStats st;
  st.trials = static_cast<std::size_t>(trials);
  st.mean_avg.assign(k, 0.0);
  st.max_avg.assign(k, 0.0);
  st.sd_avg.assign(k, 0.0);
  std::vector<double> sumsq(k, 0.0);
  double avg0 = 0.0;
  for (double w : initial_weights) avg0 += w;
  avg0 /= static_cast<double>(k);

  for (int tr = 0; tr < trials; ++tr) {
    const ProcessTrial t =
        run_process_trial(initial_weights, l, adv, mix_seed(seed, tr));
    for (std::size_t i = 0; i < k; ++i) {
      st.mean_avg[i] += t.avg[i];
      sumsq[i] += t.avg[i] * t.avg[i];
      st.max_avg[i] = std::max(st.max_avg[i], t.avg[i]);
      if (avg0 > 0.0) st.max_drift = std::max(st.max_drift, t.avg[i] / avg0);
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    st.mean_avg[i] /= static_cast<double>(trials);
    const double var =
        (sumsq[i] - static_cast<double>(trials) * st.mean_avg[i] * st.mean_avg[i]) /
        std::max(1.0, static_cast<double>(trials - 1));
    st.sd_avg[i] = std::sqrt(std::max(0.0, var));
  }
  return st;
}

double estimate_g(int k, int l, const std::string& adversary_family,
                  std::uint64_t seed, int trials,
                  std::span<const double> initial_weights) {
  const Adversary adv = make_adversary(adversary_family);
  std::vector<double> w;
  if (initial_weights.empty()) {
    w.assign(static_cast<std::size_t>(k), 1.0);
    if (adversary_family == "protect-heaviest")
      w.back() = static_cast<double>(k);
  } else {
    w.assign(initial_weights.begin(), initial_weights.end());
  }
  const ProcessStats st = run_process(w, l, adv, seed, trials);
  return st.max_drift;
}

}  // namespace kmxx
