#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace hfv {

// Fast/slow worker pool and the workload ratio applied when partitioning.
struct WorkerSpec {
  int G = 1;          // fast workers
  int C = 0;          // slow workers
  double r_gc = 1.0;  // fast-vs-slow per-cell throughput
  double W = 1.0;     // cells per fast worker for each cell per slow worker

  int workers() const { return G + C; }

  void validate() const {
    if (G < 0 || C < 0) throw std::invalid_argument("workers: G and C must be non-negative");
    if (G + C < 1) throw std::invalid_argument("workers: need at least one worker");
    if (!(r_gc >= 1.0)) throw std::invalid_argument("workers: r_gc must be >= 1");
    if (!(W > 0.0)) throw std::invalid_argument("workers: W must be positive");
  }
};

struct Slab {
  int worker = 0;
  bool fast = true;
  int i_begin = 0;
  int width = 0;
};

// Slabs ordered left to right; fast workers take the leftmost slabs.
struct Partition {
  int n_l = 0;
  std::vector<Slab> slabs;

  std::vector<int> widths() const {
    std::vector<int> w;
    for (const auto& s : slabs) w.push_back(s.width);
    return w;
  }
};

// Widths proportional to W (fast) and 1 (slow), integerised by largest
// remainder; ties go to the leftmost slab. A slab whose share rounds to zero
// takes one column from the widest slab.
inline Partition partition_weighted(int n_l, const WorkerSpec& spec) {
  spec.validate();
  const int n = spec.workers();
  if (n_l < n)
    throw std::invalid_argument("partition: " + std::to_string(n_l) + " columns cannot cover " + std::to_string(n) +
                                " workers");
  std::vector<double> weight(static_cast<std::size_t>(n), 1.0);
  for (int k = 0; k < spec.G; ++k) weight[static_cast<std::size_t>(k)] = spec.W;
  const double total = std::accumulate(weight.begin(), weight.end(), 0.0);

  std::vector<int> width(static_cast<std::size_t>(n));
  std::vector<double> frac(static_cast<std::size_t>(n));
  int assigned = 0;
  for (std::size_t k = 0; k < width.size(); ++k) {
    const double ideal = n_l * weight[k] / total;
    // snap values within rounding noise of an integer
    const double snapped = std::abs(ideal - std::round(ideal)) < 1e-9 ? std::round(ideal) : ideal;
    width[k] = static_cast<int>(std::floor(snapped));
    frac[k] = snapped - width[k];
    assigned += width[k];
  }
  std::vector<std::size_t> order(width.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (int r = 0; r < n_l - assigned; ++r) ++width[order[static_cast<std::size_t>(r)]];

  for (std::size_t k = 0; k < width.size(); ++k) {
    if (width[k] > 0) continue;
    auto widest = std::max_element(width.begin(), width.end());
    --*widest;
    width[k] = 1;
  }

  Partition p;
  p.n_l = n_l;
  int begin = 0;
  for (int k = 0; k < n; ++k) {
    p.slabs.push_back({k, k < spec.G, begin, width[static_cast<std::size_t>(k)]});
    begin += width[static_cast<std::size_t>(k)];
  }
  return p;
}

}  // namespace hfv
