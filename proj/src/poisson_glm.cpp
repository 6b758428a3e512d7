#include "hotspot/poisson_glm.hpp"

#include <algorithm>
#include <cmath>

#include "hotspot/errors.hpp"

namespace hotspot::glm {

namespace {

constexpr double kEtaClamp = 30.0;

Eigen::VectorXd clamped_exp(const Eigen::VectorXd& eta, bool* clamped) {
  Eigen::VectorXd out(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    if (eta(i) > kEtaClamp) {
      out(i) = std::exp(kEtaClamp);
      if (clamped) *clamped = true;
    } else {
      out(i) = std::exp(eta(i));
    }
  }
  return out;
}

double soft_threshold(double x, double tau) {
  if (x > tau) return x - tau;
  if (x < -tau) return x + tau;
  return 0.0;
}

}  // namespace

void DesignMatrix::validate() const {
  const Eigen::Index n = counts.size();
  if (n == 0) throw ValidationError("design matrix has no rows");
  if (kde.size() > 0 && kde.rows() != n) {
    throw ValidationError("KDE block row count does not match counts");
  }
  if (rff.size() > 0 && rff.rows() != n) {
    throw ValidationError("RFF block row count does not match counts");
  }
  if (kde.cols() + rff.cols() == 0) throw ValidationError("design matrix has no columns");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(counts(i) >= 0.0) || !std::isfinite(counts(i))) {
      throw ValidationError("counts must be finite and non-negative");
    }
  }
  if (!meta.empty() && static_cast<Eigen::Index>(meta.size()) != n) {
    throw ValidationError("row metadata size does not match counts");
  }
}

Eigen::VectorXd linear_predictor(const ModelParams& params, const DesignMatrix& design) {
  const Eigen::Index n = design.rows();
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
  if (design.kde.cols() > 0) {
    if (params.gamma.size() != design.kde.cols()) {
      throw ValidationError("gamma size does not match KDE block");
    }
    eta += design.kde * params.gamma;
  } else if (params.gamma.size() != 0) {
    throw ValidationError("gamma supplied but design has no KDE block");
  }
  if (design.rff.cols() > 0) {
    if (params.beta.size() != design.rff.cols()) {
      throw ValidationError("beta size does not match RFF block");
    }
    eta += design.rff * params.beta;
  } else if (params.beta.size() != 0) {
    throw ValidationError("beta supplied but design has no RFF block");
  }
  return eta;
}

double objective(const ModelParams& params, const DesignMatrix& design) {
  design.validate();
  const Eigen::VectorXd eta = linear_predictor(params, design);
  const Eigen::VectorXd mu = clamped_exp(eta, nullptr);
  const double loglik = design.counts.dot(eta) - mu.sum();
  const double l1 = params.gamma.lpNorm<1>() + params.beta.lpNorm<1>();
  const double l2 = params.gamma.squaredNorm() + params.beta.squaredNorm();
  return loglik - params.l1_weight * l1 - params.l2_weight * l2;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gradient(const ModelParams& params,
                                                     const DesignMatrix& design) {
  design.validate();
  const Eigen::VectorXd eta = linear_predictor(params, design);
  Eigen::VectorXd residual(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    // d/d eta of exp(min(eta, clamp)) vanishes above the clamp.
    residual(i) = design.counts(i) - (eta(i) > kEtaClamp ? 0.0 : std::exp(eta(i)));
  }
  const auto sub_l1 = [&](const Eigen::VectorXd& theta) {
    return theta.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
  };
  Eigen::VectorXd d_gamma(design.kde.cols());
  if (design.kde.cols() > 0) {
    d_gamma = design.kde.transpose() * residual - 2.0 * params.l2_weight * params.gamma -
              params.l1_weight * sub_l1(params.gamma);
  }
  Eigen::VectorXd d_beta(design.rff.cols());
  if (design.rff.cols() > 0) {
    d_beta = design.rff.transpose() * residual - 2.0 * params.l2_weight * params.beta -
             params.l1_weight * sub_l1(params.beta);
  }
  return {d_gamma, d_beta};
}

std::pair<ModelParams, FitReport> fit(const DesignMatrix& design, double l1_weight,
                                      double l2_weight, const OptimizerConfig& config) {
  design.validate();
  if (l1_weight < 0.0 || l2_weight < 0.0) {
    throw ValidationError("penalty weights must be non-negative");
  }
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.kde.cols();
  const Eigen::Index q = design.rff.cols();

  // Standardize KDE columns to unit sample standard deviation so one (a, b)
  // pair penalizes both blocks comparably; RFF columns are already bounded.
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (n > 1) {
      const double mean = design.kde.col(j).mean();
      const double ss = (design.kde.col(j).array() - mean).square().sum();
      const double sd = std::sqrt(ss / static_cast<double>(n - 1));
      if (sd > 1e-12) scale(j) = sd;
    }
  }
  DesignMatrix scaled;
  scaled.kde = design.kde;
  for (Eigen::Index j = 0; j < p; ++j) scaled.kde.col(j) /= scale(j);
  scaled.rff = design.rff;
  scaled.counts = design.counts;

  const Eigen::Index dim = p + q;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
  if (config.init) {
    const auto& [g0, b0] = *config.init;
    if (g0.size() != p || b0.size() != q) {
      throw ValidationError("warm start dimensions do not match the design");
    }
    theta.head(p) = g0.cwiseProduct(scale);  // user space -> scaled space
    theta.tail(q) = b0;
  }

  bool eta_clamped = false;
  const auto eval = [&](const Eigen::VectorXd& th, Eigen::VectorXd* eta_out) {
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
    if (p > 0) eta += scaled.kde * th.head(p);
    if (q > 0) eta += scaled.rff * th.tail(q);
    const Eigen::VectorXd mu = clamped_exp(eta, &eta_clamped);
    const double loglik = scaled.counts.dot(eta) - mu.sum();
    const double value = loglik - l1_weight * th.lpNorm<1>() - l2_weight * th.squaredNorm();
    if (eta_out) *eta_out = std::move(eta);
    return value;
  };
  const auto smooth_grad = [&](const Eigen::VectorXd& eta, const Eigen::VectorXd& th) {
    Eigen::VectorXd residual(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      residual(i) = scaled.counts(i) - (eta(i) > kEtaClamp ? 0.0 : std::exp(eta(i)));
    }
    Eigen::VectorXd g(dim);
    if (p > 0) g.head(p) = scaled.kde.transpose() * residual;
    if (q > 0) g.tail(q) = scaled.rff.transpose() * residual;
    g -= 2.0 * l2_weight * th;
    return g;
  };
  const auto composite_norm = [&](const Eigen::VectorXd& g, const Eigen::VectorXd& th) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < dim; ++j) {
      double v;
      if (th(j) > 0.0) {
        v = std::abs(g(j) - l1_weight);
      } else if (th(j) < 0.0) {
        v = std::abs(g(j) + l1_weight);
      } else {
        v = std::max(std::abs(g(j)) - l1_weight, 0.0);
      }
      worst = std::max(worst, v);
    }
    return worst;
  };

  // Smooth part alone (log-likelihood and the l2 term); the l1 term is
  // handled by the proximal step.
  const auto smooth_value = [&](const Eigen::VectorXd& th, const Eigen::VectorXd& eta_th) {
    Eigen::VectorXd mu = clamped_exp(eta_th, &eta_clamped);
    return scaled.counts.dot(eta_th) - mu.sum() - l2_weight * th.squaredNorm();
  };
  const auto eta_of = [&](const Eigen::VectorXd& th) {
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
    if (p > 0) eta += scaled.kde * th.head(p);
    if (q > 0) eta += scaled.rff * th.tail(q);
    return eta;
  };

  const double tol = config.grad_tol_per_row * static_cast<double>(n);
  FitReport report;
  Eigen::VectorXd eta = eta_of(theta);
  double value = eval(theta, &eta);
  if (!std::isfinite(value)) throw NumericalError("objective non-finite at the initial point");
  report.objective_trace.push_back(value);

  // Monotone accelerated proximal ascent: the prox step runs from the
  // extrapolated point y with a backtracked step size, the iterate keeps the
  // better of the candidate and the previous point, and the momentum restarts
  // whenever the candidate fails to improve.
  Eigen::VectorXd theta_prev = theta;
  Eigen::VectorXd y = theta;
  double t_momentum = 1.0;
  double step = 1.0;
  double grad_norm = 0.0;
  int epoch = 0;
  for (; epoch < config.max_epochs; ++epoch) {
    {
      const Eigen::VectorXd g_theta = smooth_grad(eta, theta);
      grad_norm = composite_norm(g_theta, theta);
      if (grad_norm <= tol) {
        report.converged = true;
        break;
      }
    }
    const Eigen::VectorXd eta_y = eta_of(y);
    const double f_y = smooth_value(y, eta_y);
    Eigen::VectorXd residual(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      residual(i) = scaled.counts(i) - (eta_y(i) > kEtaClamp ? 0.0 : std::exp(eta_y(i)));
    }
    Eigen::VectorXd g(dim);
    if (p > 0) g.head(p) = scaled.kde.transpose() * residual;
    if (q > 0) g.tail(q) = scaled.rff.transpose() * residual;
    g -= 2.0 * l2_weight * y;

    Eigen::VectorXd z(dim);
    bool step_ok = false;
    while (step >= 1e-18) {
      for (Eigen::Index j = 0; j < dim; ++j) {
        z(j) = soft_threshold(y(j) + step * g(j), step * l1_weight);
      }
      const Eigen::VectorXd eta_z = eta_of(z);
      const double f_z = smooth_value(z, eta_z);
      if (!std::isfinite(f_z)) throw NumericalError("objective became non-finite during the fit");
      const Eigen::VectorXd dz = z - y;
      // Majorization check for the quadratic model at step size `step`.
      if (f_z >= f_y + g.dot(dz) - dz.squaredNorm() / (2.0 * step) - 1e-12 * std::abs(f_y)) {
        step_ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!step_ok) break;  // no representable step satisfies the model

    const double value_z = eval(z, nullptr);
    theta_prev = theta;
    const bool improved = value_z >= value;
    if (improved) {
      theta = z;
      eta = eta_of(theta);
      value = value_z;
      report.objective_trace.push_back(value);
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
      y = theta + (t_momentum / t_next) * (z - theta) +
          ((t_momentum - 1.0) / t_next) * (theta - theta_prev);
      t_momentum = t_next;
    } else {
      // Restart the momentum from the incumbent.
      y = theta;
      t_momentum = 1.0;
    }
    step = std::min(step * 1.25, 1e12);
  }
  if (!report.converged) {
    const Eigen::VectorXd g = smooth_grad(eta, theta);
    grad_norm = composite_norm(g, theta);
    report.converged = grad_norm <= tol;
  }
  report.epochs = epoch;
  report.objective_value = value;
  report.grad_max_norm = grad_norm;
  report.eta_clamped = eta_clamped;

  ModelParams params;
  params.gamma = theta.head(p).cwiseQuotient(scale);  // scaled -> user space
  params.beta = theta.tail(q);
  params.l1_weight = l1_weight;
  params.l2_weight = l2_weight;
  return {std::move(params), std::move(report)};
}

Eigen::VectorXd predict(const ModelParams& params, const DesignMatrix& design) {
  Eigen::VectorXd eta = linear_predictor(params, design);
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    eta(i) = std::exp(std::min(eta(i), kEtaClamp));
  }
  return eta;
}

}  // namespace hotspot::glm
