#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "specint/autodiff.hpp"
#include "specint/quadrature.hpp"
#include "specint/rng.hpp"
#include "specint/spectrum.hpp"

namespace specint {

/// Encoder output: a latent function on the compressed interval [0,1]
/// (uniform grid, L' < n points, d channels) plus the evaluation point
/// sigma_e the operator output is read off at. Both stay on the tape.
struct LatentFunction {
  std::vector<double> grid;  // L' uniform points on [0,1]
  NodePtr values;            // [L' x d]
  NodePtr sigma;             // rank-0, in (0,1) by construction (sigmoid)
};

/// Piecewise-linear interpolation of the latent values at sorted query
/// points, clamped to the end values outside the grid hull. Differentiable
/// w.r.t. the grid values.
NodePtr interpolate(const NodePtr& values, const std::vector<double>& grid,
                    const std::vector<double>& queries);

struct EncoderConfig {
  std::size_t kernel_width = 9;
  std::size_t stride = 0;  // 0: auto, max(1, floor(n/72)) targeting L' of 64-80
  std::size_t latent_channels = 1;
  std::string nonlinearity = "tanh";
  // "per_sample": sigma_e = sigmoid(affine(mean-pooled latent));
  // "shared": one learned constant for the whole dataset.
  std::string sigma_mode = "per_sample";
};

std::size_t conv_output_len(std::size_t n, std::size_t k, std::size_t stride);
std::size_t auto_stride(std::size_t n);

/// Single linear convolutional layer plus nonlinearity; compresses a
/// spectrum of n points to a latent function on [0,1], and a sigma head
/// producing the evaluation point.
class EncoderNet {
 public:
  EncoderNet(const EncoderConfig& cfg, std::size_t n_points, Rng& init_rng);

  LatentFunction encode(const Spectrum& s) const;

  std::size_t latent_len() const { return latent_len_; }
  std::size_t channels() const { return cfg_.latent_channels; }
  ParamRegistry& registry() { return reg_; }
  const EncoderConfig& config() const { return cfg_; }
  std::size_t input_len() const { return n_points_; }

 private:
  EncoderConfig cfg_;
  std::size_t n_points_ = 0;
  std::size_t stride_ = 1;
  std::size_t latent_len_ = 0;
  ParamRegistry reg_;
  std::vector<NodePtr> kernels_;  // one [K] kernel per latent channel
  std::vector<NodePtr> biases_;   // scalar per channel
  NodePtr sigma_w_;               // [d x 1]
  NodePtr sigma_b_;               // scalar
  NodePtr sigma_shared_;          // scalar, used when sigma_mode == "shared"
};

struct KernelConfig {
  std::vector<std::size_t> hidden = {64, 64};
  std::string nonlinearity = "tanh";
};

/// The Urysohn kernel G: a feed-forward net mapping rows
/// (u(omega), sigma, omega) of width d+2 to C outputs, so the integral
/// directly yields the C class logits. Weights and biases are initialized
/// uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
class UrysohnKernelNet {
 public:
  UrysohnKernelNet(const KernelConfig& cfg, std::size_t in_dim, std::size_t n_classes,
                   Rng& init_rng);

  NodePtr forward(const NodePtr& features) const;  // [m x in_dim] -> [m x C]

  std::size_t in_dim() const { return in_dim_; }
  std::size_t n_classes() const { return n_classes_; }
  ParamRegistry& registry() { return reg_; }

 private:
  KernelConfig cfg_;
  std::size_t in_dim_ = 0;
  std::size_t n_classes_ = 0;
  ParamRegistry reg_;
  std::vector<NodePtr> weights_;
  std::vector<NodePtr> biases_;
};

/// Kernel evaluation as a function of the feature rows; the model wraps
/// its net here, and tests can substitute hand-built kernels.
using KernelFn = std::function<NodePtr(const NodePtr& /*[m x (d+2)]*/)>;

/// T(u)(sigma) = integral over [0,1] of G(u(omega), sigma, omega) domega,
/// estimated on the given sampled points: interpolate u at the points,
/// append the sigma and omega columns, evaluate G row-wise, and apply the
/// (b-a)*mean estimator. Differentiable w.r.t. kernel, encoder, and sigma.
NodePtr apply_operator(const LatentFunction& u, const NodePtr& sigma,
                       const KernelFn& kernel, const std::vector<double>& points,
                       Interval domain);

struct OperatorConfig {
  EncoderConfig encoder;
  KernelConfig kernel;
  MCConfig mc;
};

/// The full neural integral operator classifier.
class IntegralOperatorModel {
 public:
  IntegralOperatorModel(const OperatorConfig& cfg, std::size_t n_points,
                        std::size_t n_classes, std::uint64_t init_seed);

  /// Class logits for one spectrum under a given MC point set.
  NodePtr logits(const Spectrum& s, const std::vector<double>& points) const;

  /// Eval-regime logits: n_eval points from the config's fixed seed.
  Array eval_logits(const Spectrum& s) const;

  /// Argmax under the eval regime; ties break toward the lowest index.
  int predict(const Spectrum& s) const;

  std::vector<Parameter> parameters();
  void zero_grad();

  EncoderNet& encoder() { return encoder_; }
  UrysohnKernelNet& kernel() { return kernel_; }
  const OperatorConfig& config() const { return cfg_; }
  MCConfig& mc() { return cfg_.mc; }
  std::size_t n_classes() const { return n_classes_; }
  std::size_t n_points() const { return n_points_; }

 private:
  OperatorConfig cfg_;
  std::size_t n_points_ = 0;
  std::size_t n_classes_ = 0;
  EncoderNet encoder_;
  UrysohnKernelNet kernel_;
  mutable std::vector<double> eval_points_;  // built lazily from cfg_.mc
  mutable std::uint64_t eval_points_seed_ = ~0ull;
};

}  // namespace specint
