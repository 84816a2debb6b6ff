#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "specint/array.hpp"
#include "specint/autodiff.hpp"
#include "specint/rng.hpp"
#include "specint/spectrum.hpp"

namespace specint {

/// Anything trainable by the gradient loop: the integral operator and the
/// neural baselines implement this. Training calls train_logits with a
/// fresh RNG stream each forward pass (models that integrate draw their
/// Monte Carlo points from it); evaluation is a pure function of the model
/// parameters and the spectrum.
class NeuralClassifier {
 public:
  virtual ~NeuralClassifier() = default;
  virtual NodePtr train_logits(const Spectrum& s, Rng& mc_rng) = 0;
  virtual Array eval_logits(const Spectrum& s) const = 0;
  virtual int predict(const Spectrum& s) const = 0;
  virtual std::vector<Parameter> parameters() = 0;
  virtual void zero_grad() = 0;
  virtual std::size_t n_classes() const = 0;
};

struct TrainConfig {
  int epochs = 200;
  int batch_size = 32;
  double learning_rate = 1e-3;
  std::string optimizer = "adam";  // "adam" | "sgd"
  int patience = 20;               // early stop on validation accuracy
  double val_fraction = 1.0 / 9.0;
  std::uint64_t seed = 0;
};

struct TrainTrace {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  std::vector<double> val_accuracy;
  std::vector<double> epoch_seconds;
  int best_epoch = -1;

  std::size_t n_epochs() const { return train_loss.size(); }
};

/// TrainTrace as CSV (epoch,train_loss,val_loss,val_acc), full precision.
void save_trace_csv(const TrainTrace& trace, std::ostream& out);
void save_trace_csv(const TrainTrace& trace, const std::string& path);

/// Mini-batch gradient training with validation-based model selection:
/// per epoch, shuffled batches, per-sample forward/backward (gradients
/// accumulate over the batch, scaled to the batch mean), one optimizer
/// step per batch. Keeps the parameters of the best validation-accuracy
/// epoch (ties broken by lower validation loss, then earlier epoch) and
/// restores them at the end. Deterministic given config.seed.
TrainTrace train(NeuralClassifier& model, const std::vector<Spectrum>& train_set,
                 const std::vector<Spectrum>& val_set, const TrainConfig& cfg);

/// Convenience: carves the validation split from the tail of a seeded
/// shuffle of `all` (fraction cfg.val_fraction) and trains on the rest.
TrainTrace train_with_carved_val(NeuralClassifier& model, const std::vector<Spectrum>& all,
                                 const TrainConfig& cfg);

struct Evaluation {
  std::vector<int> predictions;
  std::vector<Array> logits;
};

/// Predictions under the eval regime; deterministic, empty set allowed.
Evaluation evaluate(const NeuralClassifier& model, const std::vector<Spectrum>& test_set);

}  // namespace specint
