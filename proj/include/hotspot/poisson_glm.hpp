#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace hotspot::glm {

struct RowMeta {
  double period_start = 0.0;
  std::int64_t flat_id = 0;
};

// Row per (cell, period); kde and rff blocks may each have zero columns for
// the ablated variants, never both.
struct DesignMatrix {
  Eigen::MatrixXd kde;     // n x p
  Eigen::MatrixXd rff;     // n x 2d
  Eigen::VectorXd counts;  // n, non-negative integers
  std::vector<RowMeta> meta;

  Eigen::Index rows() const { return counts.size(); }
  void validate() const;
};

struct ModelParams {
  Eigen::VectorXd gamma;  // KDE lag coefficients
  Eigen::VectorXd beta;   // RFF weights
  double l1_weight = 0.0;  // "a" in the objective
  double l2_weight = 0.0;  // "b" in the objective
};

struct FitReport {
  double objective_value = 0.0;  // penalized, in the standardized column scale
  int epochs = 0;
  bool converged = false;
  double grad_max_norm = 0.0;  // composite (prox-adjusted) gradient at exit
  bool eta_clamped = false;    // some linear predictor exceeded +30 during the fit
  std::vector<double> objective_trace;  // accepted steps, non-decreasing
};

struct OptimizerConfig {
  int max_epochs = 200;
  double grad_tol_per_row = 1e-6;  // convergence when max|grad| <= tol * n
  // Optional warm start (gamma, beta); zeros otherwise.
  std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> init;
};

// Linear predictors eta_i = kde_i . gamma + rff_i . beta.
Eigen::VectorXd linear_predictor(const ModelParams& params, const DesignMatrix& design);

// Penalized Poisson log-likelihood, constant log(o_i!) terms dropped:
//   sum_i [o_i eta_i - exp(eta_i)] - a (|beta|_1 + |gamma|_1)
//                                  - b (|beta|_2^2 + |gamma|_2^2).
// exp arguments are clamped at +30; callers can detect the clamp via fit's
// report or check eta themselves.
double objective(const ModelParams& params, const DesignMatrix& design);

// Ascent direction: X^T (o - exp(eta)) - 2 b theta - a sign(theta), with
// sign(0) = 0. Returned as (d_gamma, d_beta).
std::pair<Eigen::VectorXd, Eigen::VectorXd> gradient(const ModelParams& params,
                                                     const DesignMatrix& design);

// Deterministic full-batch proximal gradient ascent with backtracking line
// search; the l1 term enters through soft-thresholding. KDE columns are
// standardized to unit sample standard deviation internally (constant columns
// are left alone) and the returned coefficients are unstandardized.
std::pair<ModelParams, FitReport> fit(const DesignMatrix& design, double l1_weight,
                                      double l2_weight, const OptimizerConfig& config = {});

// exp(min(eta, 30)) per row.
Eigen::VectorXd predict(const ModelParams& params, const DesignMatrix& design);

}  // namespace hotspot::glm
