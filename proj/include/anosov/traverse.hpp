#pragma once

// Sharded depth-first traversal of a ball in the word metric, carrying the
// Cartan data of each element, and the Anosov gap report built on it.

#include "anosov/cartan.hpp"
#include "anosov/group.hpp"
#include "anosov/representation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace anosov {

struct TraverseOptions {
  int max_len = 8;
  int threads = 1;
  Budget* budget = nullptr;
  int levels = -1;  // compound levels to track; -1 means d-1
};

/// Runs one accumulator per shard (first letter). on_element(acc, word,
/// tracker, depth) sees every nontrivial element of length <= max_len;
/// tracker.log_norms(depth) / tracker.cartan(depth) describe it. The result
/// vector is indexed by shard, so merging it in order is independent of the
/// thread count.
template <class Acc, class Make, class OnElement>
std::vector<Acc> traverse_shards(const Representation& rep, const TraverseOptions& opt, Make make,
                                 OnElement on_element) {
  const GroupSpec& spec = rep.spec();
  const int shards = spec.letters();
  std::vector<Acc> out;
  out.reserve(static_cast<std::size_t>(shards));
  for (int s = 0; s < shards; ++s) out.push_back(make());
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex fail_mu;
  auto worker = [&]() {
    try {
      CartanTracker tracker(rep, opt.max_len, opt.levels);
      for (int s = next++; s < shards; s = next++) {
        Acc& acc = out[static_cast<std::size_t>(s)];
        walk_shard(
            spec, static_cast<Letter>(s), opt.max_len,
            [&](const Word& w) {
              const int depth = static_cast<int>(w.size());
              tracker.push(depth, w.back());
              return on_element(acc, w, static_cast<const CartanTracker&>(tracker), depth);
            },
            opt.budget);
        std::lock_guard<std::mutex> lock(fail_mu);
        if (failure) return;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(fail_mu);
      if (!failure) failure = std::current_exception();
      next = shards;
    }
  };
  const int nthreads = std::max(1, std::min(opt.threads, shards));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

struct GapShell {
  int length = 0;
  std::uint64_t count = 0;
  double min_gap = 0;        // min of log(s_p/s_{p+1}) over the shell
  double min_rate = 0;       // min_gap / length
  double mean_rate = 0;      // mean of log(s_p/s_{p+1}) / length
};

struct GapReport {
  int p = 1;
  std::vector<GapShell> shells;
  double mu_hat = 0;   // slope of the shell minima over the upper half of lengths
  double c_hat = 0;    // smallest c with min_gap(n) >= mu_hat n - c on every shell
  bool anosov = false; // mu_hat > 0 and the last min rates do not decrease to 0
};

GapReport anosov_gap_report(const Representation& rep, int p, int max_len, int threads = 1,
                            Budget* budget = nullptr);

}  // namespace anosov
