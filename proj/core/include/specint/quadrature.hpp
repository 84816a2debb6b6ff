#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "specint/autodiff.hpp"
#include "specint/rng.hpp"

namespace specint {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

/// Monte Carlo sampling regime. Training draws fresh points every forward
/// pass (the stochastic augmentation that regularizes the operator); eval
/// uses one fixed point set per run so predictions are reproducible.
struct MCConfig {
  int n_train = 2000;
  int n_eval = 5000;
  Interval domain{0.0, 1.0};
  std::uint64_t rng_seed = 0;

  enum class Resample { PerForwardPass, Fixed };
  Resample resample = Resample::PerForwardPass;
};

/// n i.i.d. uniform draws on [lo, hi), sorted ascending (the interpolation
/// consumer requires ordered queries).
std::vector<double> sample_uniform(int n, Interval domain, Rng& rng);

/// The fixed evaluation point set implied by an MCConfig (n_eval points
/// from the config's own seed, independent of any training stream).
std::vector<double> eval_points(const MCConfig& mc);

/// Estimator core: (hi - lo) * mean over the point axis. `values` is
/// [n] (-> scalar) or [n x C] (-> [C]), one row per sampled point.
/// Gradient flows through every integrand evaluation.
NodePtr mc_estimate(const NodePtr& values, Interval domain);

/// Integrate a pointwise integrand: called once per sampled point, each
/// call returning a scalar or rank-1 [C] node. Rows are stacked and fed to
/// mc_estimate, so this path and the batched path share one estimator.
using PointIntegrand = std::function<NodePtr(double)>;
NodePtr mc_integrate(const PointIntegrand& integrand, const std::vector<double>& points,
                     Interval domain);

/// Non-differentiable convenience with identical arithmetic (left-to-right
/// sum, single division, scale by length); used by convergence studies.
double mc_integrate_plain(const std::function<double(double)>& f,
                          const std::vector<double>& points, Interval domain);

}  // namespace specint
