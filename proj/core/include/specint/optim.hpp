#pragma once

#include <memory>
#include <string>
#include <vector>

#include "specint/autodiff.hpp"

namespace specint {

class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual void step(std::vector<Parameter>& params) = 0;
};

/// Plain gradient descent: p -= lr * g.
class Sgd : public Optimizer {
 public:
  explicit Sgd(double lr) : lr_(lr) {}
  void step(std::vector<Parameter>& params) override;

 private:
  double lr_;
};

/// Adaptive moment estimation with bias correction. State (first and
/// second moments, step counter) is lazily initialized per parameter on
/// the first step.
class Adam : public Optimizer {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
  void step(std::vector<Parameter>& params) override;

 private:
  double lr_, beta1_, beta2_, eps_;
  std::vector<Array> m_, v_;
  long t_ = 0;
};

/// "adam" | "sgd". The choice of optimizer is a repo default; gradient
/// descent is all the training procedure assumes.
std::unique_ptr<Optimizer> make_optimizer(const std::string& name, double lr);

}  // namespace specint
