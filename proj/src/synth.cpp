#include "hotspot/synth.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "hotspot/errors.hpp"
#include "hotspot/rng.hpp"

namespace hotspot::synth {

void SynthSpec::validate() const {
  region.validate();
  if (!(horizon_days > 0.0)) throw ValidationError("synthetic horizon must be positive");
  if (uniform_rate < 0.0) throw ValidationError("uniform rate must be non-negative");
  for (const auto& b : bumps) {
    if (b.peak_rate < 0.0 || !(b.scale_ft > 0.0)) {
      throw ValidationError("bump rates must be non-negative with positive scale");
    }
  }
  if (!(hawkes_branching >= 0.0) || hawkes_branching >= 1.0) {
    throw ValidationError("Hawkes branching ratio must lie in [0, 1) (subcritical)");
  }
  if (!(trigger_spatial_ft > 0.0) || !(trigger_temporal_days > 0.0)) {
    throw ValidationError("trigger scales must be positive");
  }
}

double IntensityField::operator()(double x, double y, double /*t*/) const {
  double v = uniform_rate;
  for (const auto& b : bumps) {
    const double dx = x - b.center_x;
    const double dy = y - b.center_y;
    v += b.peak_rate * std::exp(-(dx * dx + dy * dy) / (2.0 * b.scale_ft * b.scale_ft));
  }
  return v;
}

double IntensityField::peak_bound() const {
  double v = uniform_rate;
  for (const auto& b : bumps) v += b.peak_rate;
  return v;
}

namespace {

std::vector<events::EventRecord> sample_background(const SynthSpec& spec,
                                                   const IntensityField& field, Rng& rng) {
  const double volume = spec.region.bbox_area_sqft() * spec.horizon_days;
  const double bound = field.peak_bound();
  std::vector<events::EventRecord> out;
  if (bound <= 0.0) return out;
  const long n_candidates = rng.poisson(bound * volume);
  out.reserve(static_cast<size_t>(n_candidates / 2));
  for (long i = 0; i < n_candidates; ++i) {
    events::EventRecord ev;
    ev.category = "synthetic";
    ev.x_ft = rng.uniform(spec.region.min_x, spec.region.max_x);
    ev.y_ft = rng.uniform(spec.region.min_y, spec.region.max_y);
    ev.t_days = rng.uniform(0.0, spec.horizon_days);
    const double accept = field(ev.x_ft, ev.y_ft, ev.t_days) / bound;
    if (rng.uniform() < accept) out.push_back(std::move(ev));
  }
  return out;
}

}  // namespace

std::pair<std::vector<events::EventRecord>, IntensityField> simulate_poisson(
    const SynthSpec& spec) {
  spec.validate();
  IntensityField field{spec.uniform_rate, spec.bumps};
  Rng rng(derive_seed(spec.seed, "synth-background"));
  return {sample_background(spec, field, rng), std::move(field)};
}

HawkesRealization simulate_hawkes_detailed(const SynthSpec& spec) {
  spec.validate();
  IntensityField field{spec.uniform_rate, spec.bumps};
  Rng rng(derive_seed(spec.seed, "synth-background"));
  HawkesRealization out;
  out.events = sample_background(spec, field, rng);
  out.n_immigrants = static_cast<std::int64_t>(out.events.size());
  out.parent_index.assign(out.events.size(), -1);

  Rng trig(derive_seed(spec.seed, "synth-trigger"));
  std::deque<std::int64_t> frontier(out.events.size());
  for (size_t i = 0; i < out.events.size(); ++i) frontier[i] = static_cast<std::int64_t>(i);
  while (!frontier.empty()) {
    const std::int64_t parent = frontier.front();
    frontier.pop_front();
    const events::EventRecord parent_ev = out.events[static_cast<size_t>(parent)];
    const long n_kids = trig.poisson(spec.hawkes_branching);
    for (long k = 0; k < n_kids; ++k) {
      events::EventRecord kid;
      kid.category = "synthetic";
      kid.t_days = parent_ev.t_days + trig.exponential(spec.trigger_temporal_days);
      kid.x_ft = parent_ev.x_ft + spec.trigger_spatial_ft * trig.normal();
      kid.y_ft = parent_ev.y_ft + spec.trigger_spatial_ft * trig.normal();
      if (kid.t_days > spec.horizon_days) continue;
      if (kid.x_ft < spec.region.min_x || kid.x_ft > spec.region.max_x ||
          kid.y_ft < spec.region.min_y || kid.y_ft > spec.region.max_y) {
        continue;
      }
      out.events.push_back(std::move(kid));
      out.parent_index.push_back(parent);
      frontier.push_back(static_cast<std::int64_t>(out.events.size()) - 1);
    }
  }
  return out;
}

std::vector<events::EventRecord> simulate_hawkes(const SynthSpec& spec) {
  std::vector<events::EventRecord> all = simulate_hawkes_detailed(spec).events;
  std::sort(all.begin(), all.end(), [](const events::EventRecord& lhs,
                                       const events::EventRecord& rhs) {
    if (lhs.t_days != rhs.t_days) return lhs.t_days < rhs.t_days;
    if (lhs.x_ft != rhs.x_ft) return lhs.x_ft < rhs.x_ft;
    return lhs.y_ft < rhs.y_ft;
  });
  return all;
}

double RffGroundTruth::log_intensity(double x, double y, double t) const {
  // Allocation-free single-point feature product; hot path of the thinning loop.
  const Eigen::Index d = freqs.omegas.rows();
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  double f = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    const double proj =
        freqs.omegas(k, 0) * x + freqs.omegas(k, 1) * y + freqs.omegas(k, 2) * t;
    f += beta(k) * std::cos(proj) + beta(d + k) * std::sin(proj);
  }
  return offset + scale * f;
}

double RffGroundTruth::intensity(double x, double y, double t) const {
  return std::exp(log_intensity(x, y, t));
}

std::pair<std::vector<events::EventRecord>, RffGroundTruth> simulate_poisson_rff(
    const geom::StudyRegion& region, double horizon_days, const rff::RffConfig& config,
    double coef_scale, double target_total, std::uint64_t seed) {
  region.validate();
  if (!(horizon_days > 0.0)) throw ValidationError("synthetic horizon must be positive");
  if (!(target_total > 0.0)) throw ValidationError("target event count must be positive");

  RffGroundTruth truth;
  rff::RffConfig cfg = config;
  cfg.seed = derive_seed(seed, "synth-rff-freqs");
  truth.freqs = rff::sample_frequencies(cfg);
  Rng coef_rng(derive_seed(seed, "synth-rff-beta"));
  const int dim = 2 * cfg.n_frequencies;
  truth.beta.resize(dim);
  // Feature rows have unit norm, so N(0, coef_scale^2) coefficients give the
  // log-intensity variance coef_scale^2 regardless of d.
  for (int j = 0; j < dim; ++j) truth.beta(j) = coef_scale * coef_rng.normal();

  // Calibrate the offset by deterministic Monte Carlo so the expected total
  // integral of exp(log-intensity) is close to target_total.
  Rng cal_rng(derive_seed(seed, "synth-rff-calibration"));
  const int n_cal = 4096;
  Eigen::MatrixXd cal_points(n_cal, 3);
  for (int i = 0; i < n_cal; ++i) {
    cal_points(i, 0) = cal_rng.uniform(region.min_x, region.max_x);
    cal_points(i, 1) = cal_rng.uniform(region.min_y, region.max_y);
    cal_points(i, 2) = cal_rng.uniform(0.0, horizon_days);
  }
  const Eigen::MatrixXd cal_phi = rff::featurize(cal_points, truth.freqs);
  const Eigen::VectorXd cal_f = cal_phi * truth.beta;
  const double mean_exp = cal_f.array().exp().mean();
  const double volume = region.bbox_area_sqft() * horizon_days;
  truth.offset = std::log(target_total / (mean_exp * volume));

  // Rigorous thinning bound from per-frequency sinusoid amplitudes:
  // |Phi . beta| <= (1/sqrt(d)) * sum_k sqrt(beta_cos_k^2 + beta_sin_k^2).
  double amplitude_sum = 0.0;
  for (int k = 0; k < cfg.n_frequencies; ++k) {
    amplitude_sum = amplitude_sum + std::hypot(truth.beta(k), truth.beta(cfg.n_frequencies + k));
  }
  const double bound =
      std::exp(truth.offset + amplitude_sum / std::sqrt(cfg.n_frequencies));
  Rng rng(derive_seed(seed, "synth-rff-events"));
  const long n_candidates = rng.poisson(bound * volume);
  std::vector<events::EventRecord> out;
  out.reserve(static_cast<size_t>(std::min<long>(n_candidates, 4 * (long)target_total)));
  for (long i = 0; i < n_candidates; ++i) {
    events::EventRecord ev;
    ev.category = "synthetic";
    ev.x_ft = rng.uniform(region.min_x, region.max_x);
    ev.y_ft = rng.uniform(region.min_y, region.max_y);
    ev.t_days = rng.uniform(0.0, horizon_days);
    const double accept = truth.intensity(ev.x_ft, ev.y_ft, ev.t_days) / bound;
    if (rng.uniform() < accept) out.push_back(std::move(ev));
  }
  return {std::move(out), std::move(truth)};
}

}  // namespace hotspot::synth
