#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace hotspot::bo {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct BoHistory {
  std::vector<Eigen::VectorXd> xs;
  std::vector<double> ys;

  int best_index() const;
};

// Sequential Bayesian optimization (maximization) over a box: n_init Halton
// initial points, then n_iter rounds of a Matern-5/2 GP surrogate on the
// normalized cube with expected-improvement acquisition, maximized over a
// quasi-random candidate set plus local pattern-search refinement. Fully
// deterministic under (bounds, n_init, n_iter, seed).
BoHistory bo_maximize(const Objective& f, const std::vector<std::pair<double, double>>& bounds,
                      int n_init, int n_iter, std::uint64_t seed);

// Halton point (base-prime radical inverse per dimension) on the unit cube.
Eigen::VectorXd halton_point(std::uint64_t index, int dim);

}  // namespace hotspot::bo
