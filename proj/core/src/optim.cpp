#include "specint/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace specint {

void Sgd::step(std::vector<Parameter>& params) {
  for (auto& p : params) {
    if (!p.trainable) continue;
    Array& val = p.node->value;
    const Array& g = p.node->grad;
    for (std::size_t i = 0; i < val.size(); ++i) val[i] -= lr_ * g[i];
  }
}

void Adam::step(std::vector<Parameter>& params) {
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.push_back(Array::zeros_like(p.node->value));
      v_.push_back(Array::zeros_like(p.node->value));
    }
  }
  if (m_.size() != params.size())
    throw std::logic_error("Adam: parameter list changed between steps");
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    auto& p = params[pi];
    if (!p.trainable) continue;
    Array& val = p.node->value;
    const Array& g = p.node->grad;
    Array& m = m_[pi];
    Array& v = v_[pi];
    for (std::size_t i = 0; i < val.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      val[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

std::unique_ptr<Optimizer> make_optimizer(const std::string& name, double lr) {
  if (name == "adam") return std::make_unique<Adam>(lr);
  if (name == "sgd") return std::make_unique<Sgd>(lr);
  throw std::invalid_argument("make_optimizer: unknown optimizer '" + name + "'");
}

}  // namespace specint
