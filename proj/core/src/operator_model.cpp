#include "specint/operator_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace specint {

std::size_t conv_output_len(std::size_t n, std::size_t k, std::size_t stride) {
  return (n - k) / stride + 1;
}

std::size_t auto_stride(std::size_t n) {
  return std::max<std::size_t>(1, n / 72);
}

// ---------------------------------------------------------------------------
// interpolation

NodePtr interpolate(const NodePtr& values, const std::vector<double>& grid,
                    const std::vector<double>& queries) {
  const Array& V = values->value;
  if (V.rank() != 2 || V.dim(0) != grid.size())
    throw std::invalid_argument("interpolate: values " + shape_str(V.shape()) +
                                " do not match grid of length " +
                                std::to_string(grid.size()));
  if (grid.size() < 2) throw std::invalid_argument("interpolate: need at least 2 grid points");
  if (queries.empty()) throw std::invalid_argument("interpolate: empty query list");

  const std::size_t L = grid.size(), d = V.dim(1), m = queries.size();

  // Queries are sorted, so one forward sweep finds every bracketing cell.
  auto idx = std::make_shared<std::vector<std::size_t>>(m);
  auto wgt = std::make_shared<std::vector<double>>(m);
  std::size_t cell = 0;
  for (std::size_t q = 0; q < m; ++q) {
    const double x = queries[q];
    if (x <= grid.front()) {
      (*idx)[q] = 0;
      (*wgt)[q] = 0.0;
      continue;
    }
    if (x >= grid.back()) {
      (*idx)[q] = L - 2;
      (*wgt)[q] = 1.0;
      continue;
    }
    while (cell + 2 < L && grid[cell + 1] < x) ++cell;
    (*idx)[q] = cell;
    (*wgt)[q] = (x - grid[cell]) / (grid[cell + 1] - grid[cell]);
  }

  Array out({m, d});
  for (std::size_t q = 0; q < m; ++q) {
    const std::size_t i = (*idx)[q];
    const double w = (*wgt)[q];
    for (std::size_t c = 0; c < d; ++c)
      out.at(q, c) = (1.0 - w) * V.at(i, c) + w * V.at(i + 1, c);
  }

  return make_op(std::move(out), {values}, [idx, wgt, d](const Node& self) {
    auto& pv = *self.parents[0];
    if (!pv.requires_grad) return;
    const std::size_t m = idx->size();
    for (std::size_t q = 0; q < m; ++q) {
      const std::size_t i = (*idx)[q];
      const double w = (*wgt)[q];
      for (std::size_t c = 0; c < d; ++c) {
        const double g = self.grad[q * d + c];
        pv.grad[i * d + c] += (1.0 - w) * g;
        pv.grad[(i + 1) * d + c] += w * g;
      }
    }
  });
}

// ---------------------------------------------------------------------------
// encoder

namespace {

Array uniform_init(Shape shape, double bound, Rng& rng) {
  Array a(std::move(shape));
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = rng.uniform(-bound, bound);
  return a;
}

}  // namespace

EncoderNet::EncoderNet(const EncoderConfig& cfg, std::size_t n_points, Rng& init_rng)
    : cfg_(cfg), n_points_(n_points) {
  if (n_points < cfg.kernel_width)
    throw std::invalid_argument("EncoderNet: spectrum length " + std::to_string(n_points) +
                                " shorter than conv kernel " +
                                std::to_string(cfg.kernel_width));
  stride_ = cfg.stride == 0 ? auto_stride(n_points) : cfg.stride;
  latent_len_ = conv_output_len(n_points, cfg.kernel_width, stride_);
  if (latent_len_ < 8)
    throw std::invalid_argument("EncoderNet: latent length " + std::to_string(latent_len_) +
                                " below minimum 8; reduce stride");
  if (latent_len_ >= n_points)
    throw std::invalid_argument("EncoderNet: latent length must compress the input");
  if (cfg.latent_channels < 1)
    throw std::invalid_argument("EncoderNet: need at least one latent channel");

  const double bound = 1.0 / std::sqrt(static_cast<double>(cfg.kernel_width));
  for (std::size_t c = 0; c < cfg.latent_channels; ++c) {
    kernels_.push_back(reg_.add_param("conv.kernel" + std::to_string(c),
                                      uniform_init({cfg.kernel_width}, bound, init_rng)));
    biases_.push_back(reg_.add_param("conv.bias" + std::to_string(c),
                                     uniform_init({}, bound, init_rng)));
  }
  const double sbound = 1.0 / std::sqrt(static_cast<double>(cfg.latent_channels));
  sigma_w_ = reg_.add_param("sigma.weight",
                            uniform_init({cfg.latent_channels, 1}, sbound, init_rng));
  sigma_b_ = reg_.add_param("sigma.bias", uniform_init({}, sbound, init_rng));
  if (cfg.sigma_mode == "shared") {
    sigma_shared_ = reg_.add_param("sigma.shared", Array::scalar(0.0));
  } else if (cfg.sigma_mode != "per_sample") {
    throw std::invalid_argument("EncoderNet: unknown sigma_mode '" + cfg.sigma_mode + "'");
  }
}

LatentFunction EncoderNet::encode(const Spectrum& s) const {
  if (s.n_points() != n_points_)
    throw std::invalid_argument("EncoderNet: spectrum has " + std::to_string(s.n_points()) +
                                " points, expected " + std::to_string(n_points_));
  NodePtr x = constant(Array({1, n_points_}, s.intensities));

  std::vector<NodePtr> channels;
  channels.reserve(kernels_.size());
  for (std::size_t c = 0; c < kernels_.size(); ++c) {
    NodePtr conv = conv1d(x, kernels_[c], stride_, biases_[c]);
    conv = activation(cfg_.nonlinearity, conv);
    channels.push_back(reshape(conv, {latent_len_, 1}));
  }
  NodePtr values = channels.size() == 1 ? channels[0] : concat(channels, 1);

  LatentFunction u;
  u.grid.resize(latent_len_);
  for (std::size_t i = 0; i < latent_len_; ++i)
    u.grid[i] = static_cast<double>(i) / static_cast<double>(latent_len_ - 1);
  u.values = values;

  if (cfg_.sigma_mode == "shared") {
    u.sigma = sigmoid(sigma_shared_);
  } else {
    NodePtr pooled = reshape(mean_axis0(values), {1, cfg_.latent_channels});
    NodePtr pre = add(matmul(pooled, sigma_w_), sigma_b_);
    u.sigma = reshape(sigmoid(pre), Shape{});
  }
  return u;
}

// ---------------------------------------------------------------------------
// kernel net

UrysohnKernelNet::UrysohnKernelNet(const KernelConfig& cfg, std::size_t in_dim,
                                   std::size_t n_classes, Rng& init_rng)
    : cfg_(cfg), in_dim_(in_dim), n_classes_(n_classes) {
  if (n_classes < 2) throw std::invalid_argument("UrysohnKernelNet: need C >= 2");
  std::vector<std::size_t> widths;
  widths.push_back(in_dim);
  widths.insert(widths.end(), cfg.hidden.begin(), cfg.hidden.end());
  widths.push_back(n_classes);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(widths[l]));
    weights_.push_back(reg_.add_param("layer" + std::to_string(l) + ".weight",
                                      uniform_init({widths[l], widths[l + 1]}, bound, init_rng)));
    biases_.push_back(reg_.add_param("layer" + std::to_string(l) + ".bias",
                                     uniform_init({widths[l + 1]}, bound, init_rng)));
  }
}

NodePtr UrysohnKernelNet::forward(const NodePtr& features) const {
  if (features->value.rank() != 2 || features->value.dim(1) != in_dim_)
    throw std::invalid_argument("UrysohnKernelNet: features " +
                                shape_str(features->value.shape()) + " need width " +
                                std::to_string(in_dim_));
  NodePtr h = features;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    h = add(matmul(h, weights_[l]), biases_[l]);
    if (l + 1 < weights_.size()) h = activation(cfg_.nonlinearity, h);
  }
  return h;
}

// ---------------------------------------------------------------------------
// operator application

NodePtr apply_operator(const LatentFunction& u, const NodePtr& sigma,
                       const KernelFn& kernel, const std::vector<double>& points,
                       Interval domain) {
  if (points.empty()) throw std::invalid_argument("apply_operator: empty point list");
  if (points.front() < domain.lo || points.back() > domain.hi)
    throw std::invalid_argument("apply_operator: sampled points leave the domain");
  const double sv = sigma->value.scalar_value();
  if (sv < domain.lo || sv > domain.hi)
    throw std::invalid_argument("apply_operator: sigma outside the domain");

  const std::size_t m = points.size();
  NodePtr interp = interpolate(u.values, u.grid, points);      // [m x d]
  NodePtr sigma_col = reshape(tile_scalar(sigma, m), {m, 1});  // [m x 1]
  NodePtr omega_col = constant(Array({m, 1}, points));         // [m x 1]
  NodePtr features = concat({interp, sigma_col, omega_col}, 1);
  NodePtr rows = kernel(features);                             // [m x C]
  return mc_estimate(rows, domain);
}

// ---------------------------------------------------------------------------
// full model

IntegralOperatorModel::IntegralOperatorModel(const OperatorConfig& cfg,
                                             std::size_t n_points, std::size_t n_classes,
                                             std::uint64_t init_seed)
    : cfg_(cfg),
      n_points_(n_points),
      n_classes_(n_classes),
      encoder_([&] {
        Rng r = Rng::derive(init_seed, stream::kModelInit);
        return EncoderNet(cfg.encoder, n_points, r);
      }()),
      kernel_([&] {
        // Separate stream so encoder and kernel inits do not interleave.
        Rng r = Rng::derive(init_seed + 1, stream::kModelInit);
        return UrysohnKernelNet(cfg.kernel, cfg.encoder.latent_channels + 2, n_classes, r);
      }()) {}

NodePtr IntegralOperatorModel::logits(const Spectrum& s,
                                      const std::vector<double>& points) const {
  LatentFunction u = encoder_.encode(s);
  return apply_operator(u, u.sigma,
                        [this](const NodePtr& f) { return kernel_.forward(f); }, points,
                        cfg_.mc.domain);
}

Array IntegralOperatorModel::eval_logits(const Spectrum& s) const {
  // Cache the fixed eval point set; rebuilt if the MC regime is reseeded.
  if (eval_points_.size() != static_cast<std::size_t>(cfg_.mc.n_eval) ||
      eval_points_seed_ != cfg_.mc.rng_seed) {
    eval_points_ = eval_points(cfg_.mc);
    eval_points_seed_ = cfg_.mc.rng_seed;
  }
  return logits(s, eval_points_)->value;
}

int IntegralOperatorModel::predict(const Spectrum& s) const {
  return argmax_lowest(eval_logits(s));
}

std::vector<Parameter> IntegralOperatorModel::parameters() {
  std::vector<Parameter> all = encoder_.registry().params();
  const auto& kp = kernel_.registry().params();
  all.insert(all.end(), kp.begin(), kp.end());
  return all;
}

void IntegralOperatorModel::zero_grad() {
  encoder_.registry().zero_grad();
  kernel_.registry().zero_grad();
}

}  // namespace specint
