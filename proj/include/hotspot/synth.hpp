#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hotspot/events.hpp"
#include "hotspot/geometry.hpp"
#include "hotspot/rff_features.hpp"

namespace hotspot::synth {

struct GaussianBump {
  double peak_rate = 0.0;  // events per sq ft per day at the center
  double center_x = 0.0;
  double center_y = 0.0;
  double scale_ft = 0.0;
};

struct SynthSpec {
  geom::StudyRegion region;
  double horizon_days = 0.0;
  double uniform_rate = 0.0;  // events per sq ft per day added everywhere
  std::vector<GaussianBump> bumps;
  // Self-excitation: expected offspring per event, Gaussian spatial and
  // exponential temporal displacement.
  double hawkes_branching = 0.0;  // theta_b, must stay below 1
  double trigger_spatial_ft = 100.0;
  double trigger_temporal_days = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Ground-truth background intensity evaluator (time-homogeneous).
struct IntensityField {
  double uniform_rate = 0.0;
  std::vector<GaussianBump> bumps;

  double operator()(double x, double y, double /*t*/) const;
  double peak_bound() const;  // upper bound used for thinning
};

// Thinning sampler for the inhomogeneous Poisson background. Events carry
// category "synthetic" and continuous t_days in [0, horizon).
std::pair<std::vector<events::EventRecord>, IntensityField> simulate_poisson(
    const SynthSpec& spec);

// Branching construction: immigrants from the background (identical stream to
// simulate_poisson for the same seed), offspring counts Poisson(theta_b),
// displacements Gaussian in space and exponential in time. Offspring outside
// the region or past the horizon are discarded along with their descendants.
std::vector<events::EventRecord> simulate_hawkes(const SynthSpec& spec);

// Same construction with the branching structure kept: parent_index[i] is -1
// for immigrants, otherwise the index of the triggering event. Events appear
// in generative order (immigrants first, then offspring as spawned).
struct HawkesRealization {
  std::vector<events::EventRecord> events;
  std::vector<std::int64_t> parent_index;
  std::int64_t n_immigrants = 0;
};

HawkesRealization simulate_hawkes_detailed(const SynthSpec& spec);

// Ground truth drawn from the model's own feature span: log-intensity
// offset + Phi(x, y, t) . beta with beta ~ N(0, coef_scale^2 / sqrt(d)).
// The offset is calibrated so the expected total event count is roughly
// target_total; thinning uses the rigorous bound exp(offset + |beta|_1/sqrt(d)).
struct RffGroundTruth {
  rff::FrequencyMatrix freqs;
  Eigen::VectorXd beta;
  double offset = 0.0;

  double log_intensity(double x, double y, double t) const;
  double intensity(double x, double y, double t) const;
};

std::pair<std::vector<events::EventRecord>, RffGroundTruth> simulate_poisson_rff(
    const geom::StudyRegion& region, double horizon_days, const rff::RffConfig& config,
    double coef_scale, double target_total, std::uint64_t seed);

}  // namespace hotspot::synth
