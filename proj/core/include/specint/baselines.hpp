#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "specint/autodiff.hpp"
#include "specint/rng.hpp"
#include "specint/spectrum.hpp"
#include "specint/training.hpp"

namespace specint {

// ---------------------------------------------------------------------------
// neural baselines (share diffcore and the training loop)

struct FFNNConfig {
  std::vector<std::size_t> hidden = {128, 64};
  std::string nonlinearity = "tanh";
};

class FFNNClassifier : public NeuralClassifier {
 public:
  FFNNClassifier(const FFNNConfig& cfg, std::size_t input_len, std::size_t n_classes,
                 std::uint64_t init_seed);

  NodePtr train_logits(const Spectrum& s, Rng& mc_rng) override;
  Array eval_logits(const Spectrum& s) const override;
  int predict(const Spectrum& s) const override;
  std::vector<Parameter> parameters() override { return reg_.params(); }
  void zero_grad() override { reg_.zero_grad(); }
  std::size_t n_classes() const override { return n_classes_; }
  ParamRegistry& registry() { return reg_; }

 private:
  NodePtr forward(const Spectrum& s) const;
  FFNNConfig cfg_;
  std::size_t input_len_ = 0, n_classes_ = 0;
  ParamRegistry reg_;
  std::vector<NodePtr> weights_, biases_;
};

struct CNNConfig {
  std::vector<std::size_t> channels = {8, 16};
  std::size_t kernel_width = 9;
  std::size_t stride = 2;
  std::string nonlinearity = "tanh";
  std::vector<std::size_t> head_hidden = {64};
};

class CNNClassifier : public NeuralClassifier {
 public:
  CNNClassifier(const CNNConfig& cfg, std::size_t input_len, std::size_t n_classes,
                std::uint64_t init_seed);

  NodePtr train_logits(const Spectrum& s, Rng& mc_rng) override;
  Array eval_logits(const Spectrum& s) const override;
  int predict(const Spectrum& s) const override;
  std::vector<Parameter> parameters() override { return reg_.params(); }
  void zero_grad() override { reg_.zero_grad(); }
  std::size_t n_classes() const override { return n_classes_; }

 private:
  NodePtr forward(const Spectrum& s) const;
  CNNConfig cfg_;
  std::size_t input_len_ = 0, n_classes_ = 0, flat_len_ = 0;
  ParamRegistry reg_;
  std::vector<NodePtr> conv_kernels_, conv_biases_;  // per conv layer
  std::vector<NodePtr> head_weights_, head_biases_;
};

// ---------------------------------------------------------------------------
// decision tree (CART, Gini impurity)

struct TreeConfig {
  std::size_t max_depth = 20;
  std::size_t min_samples_leaf = 1;
};

struct SplitCandidate {
  bool found = false;  // false: no strictly improving split exists
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;  // Gini improvement (reporting only; selection is exact)
};

class DecisionTree {
 public:
  void fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
           const TreeConfig& cfg, std::size_t n_classes);
  int predict(const std::vector<double>& x) const;
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct TreeNode {
    int feature = -1;  // -1: leaf
    double threshold = 0.0;
    int leaf_class = 0;
    std::size_t left = 0, right = 0;
  };
  std::size_t build(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                    std::vector<std::size_t>& idx, std::size_t depth,
                    const TreeConfig& cfg, std::size_t n_classes);
  std::vector<TreeNode> nodes_;
};

/// Greedy best split over (feature, midpoint-of-sorted-unique-values)
/// pairs by Gini gain; ties resolve to the lowest feature index, then the
/// lowest threshold. Exposed so the exhaustive-enumeration oracle in the
/// tests can compare root decisions one-to-one.
SplitCandidate best_gini_split(const std::vector<std::vector<double>>& x,
                               const std::vector<int>& y,
                               const std::vector<std::size_t>& idx,
                               std::size_t n_classes, std::size_t min_samples_leaf);

DecisionTree fit_tree(const std::vector<Spectrum>& train, const TreeConfig& cfg,
                      std::size_t n_classes);
int tree_predict(const DecisionTree& t, const Spectrum& s);

// ---------------------------------------------------------------------------
// linear SVM (one-vs-rest hinge, Pegasos-style subgradient descent)

struct SvmConfig {
  double lambda = 1e-4;
  int epochs = 100;
  std::uint64_t seed = 0;
};

class LinearSvm {
 public:
  void fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
           const SvmConfig& cfg, std::size_t n_classes);
  int predict(const std::vector<double>& x) const;
  const std::vector<std::vector<double>>& weights() const { return w_; }

 private:
  std::vector<std::vector<double>> w_;  // per class, last entry is the bias
};

LinearSvm fit_svm(const std::vector<Spectrum>& train, const SvmConfig& cfg,
                  std::size_t n_classes);
int svm_predict(const LinearSvm& m, const Spectrum& s);

// ---------------------------------------------------------------------------
// genetic-algorithm hyperparameter search

struct GeneSpec {
  std::string name;
  bool integer = false;
  double lo = 0.0;
  double hi = 1.0;
};

struct GAConfig {
  int population = 20;
  int generations = 15;
  int tournament = 3;
  double mutation_rate = 0.2;
  double crossover_rate = 0.7;
};

using Genome = std::vector<double>;
using FitnessFn = std::function<double(const Genome&)>;

struct GAResult {
  Genome best;
  double best_fitness = 0.0;
  std::vector<double> generation_best;  // best-so-far after each generation
};

/// Tournament selection, uniform crossover, per-gene resampling mutation.
/// Returns the best individual seen across all generations (so the result
/// is never worse than anything in generation 0). Deterministic per seed;
/// fitness ties resolve to the earlier-evaluated individual.
GAResult ga_optimize(const std::vector<GeneSpec>& space, const FitnessFn& fitness,
                     const GAConfig& cfg, std::uint64_t seed);

/// Search spaces used for the baseline tuning.
std::vector<GeneSpec> dt_search_space();   // max_depth 1-20, min_samples_leaf 1-10
std::vector<GeneSpec> svm_search_space();  // log10(lambda) in [-6, 2]

}  // namespace specint
