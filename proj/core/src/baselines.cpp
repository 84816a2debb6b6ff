#include "specint/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace specint {

namespace {

Array uniform_init(Shape shape, double bound, Rng& rng) {
  Array a(std::move(shape));
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = rng.uniform(-bound, bound);
  return a;
}

void init_mlp(ParamRegistry& reg, const std::vector<std::size_t>& widths,
              const std::string& prefix, std::vector<NodePtr>& weights,
              std::vector<NodePtr>& biases, Rng& rng) {
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(widths[l]));
    weights.push_back(reg.add_param(prefix + std::to_string(l) + ".weight",
                                    uniform_init({widths[l], widths[l + 1]}, bound, rng)));
    biases.push_back(reg.add_param(prefix + std::to_string(l) + ".bias",
                                   uniform_init({widths[l + 1]}, bound, rng)));
  }
}

NodePtr mlp_forward(const NodePtr& input, const std::vector<NodePtr>& weights,
                    const std::vector<NodePtr>& biases, const std::string& nonlinearity) {
  NodePtr h = input;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    h = add(matmul(h, weights[l]), biases[l]);
    if (l + 1 < weights.size()) h = activation(nonlinearity, h);
  }
  return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// FFNN

FFNNClassifier::FFNNClassifier(const FFNNConfig& cfg, std::size_t input_len,
                               std::size_t n_classes, std::uint64_t init_seed)
    : cfg_(cfg), input_len_(input_len), n_classes_(n_classes) {
  Rng rng = Rng::derive(init_seed, stream::kModelInit);
  std::vector<std::size_t> widths;
  widths.push_back(input_len);
  widths.insert(widths.end(), cfg.hidden.begin(), cfg.hidden.end());
  widths.push_back(n_classes);
  init_mlp(reg_, widths, "ffnn.layer", weights_, biases_, rng);
}

NodePtr FFNNClassifier::forward(const Spectrum& s) const {
  if (s.n_points() != input_len_)
    throw std::invalid_argument("FFNN: spectrum length " + std::to_string(s.n_points()) +
                                " != input width " + std::to_string(input_len_));
  NodePtr x = constant(Array({1, input_len_}, s.intensities));
  return mlp_forward(x, weights_, biases_, cfg_.nonlinearity);
}

NodePtr FFNNClassifier::train_logits(const Spectrum& s, Rng&) { return forward(s); }

Array FFNNClassifier::eval_logits(const Spectrum& s) const { return forward(s)->value; }

int FFNNClassifier::predict(const Spectrum& s) const { return argmax_lowest(eval_logits(s)); }

// ---------------------------------------------------------------------------
// CNN + FFNN

CNNClassifier::CNNClassifier(const CNNConfig& cfg, std::size_t input_len,
                             std::size_t n_classes, std::uint64_t init_seed)
    : cfg_(cfg), input_len_(input_len), n_classes_(n_classes) {
  Rng rng = Rng::derive(init_seed, stream::kModelInit);
  std::size_t cin = 1;
  std::size_t len = input_len;
  for (std::size_t l = 0; l < cfg.channels.size(); ++l) {
    const std::size_t cout = cfg.channels[l];
    if (len < cfg.kernel_width)
      throw std::invalid_argument("CNN: signal shorter than conv kernel at layer " +
                                  std::to_string(l));
    const double bound = 1.0 / std::sqrt(static_cast<double>(cin * cfg.kernel_width));
    conv_kernels_.push_back(
        reg_.add_param("cnn.conv" + std::to_string(l) + ".weight",
                       uniform_init({cout, cin, cfg.kernel_width}, bound, rng)));
    conv_biases_.push_back(reg_.add_param("cnn.conv" + std::to_string(l) + ".bias",
                                          uniform_init({cout}, bound, rng)));
    len = (len - cfg.kernel_width) / cfg.stride + 1;
    cin = cout;
  }
  flat_len_ = cin * len;
  std::vector<std::size_t> widths;
  widths.push_back(flat_len_);
  widths.insert(widths.end(), cfg.head_hidden.begin(), cfg.head_hidden.end());
  widths.push_back(n_classes);
  init_mlp(reg_, widths, "cnn.head", head_weights_, head_biases_, rng);
}

NodePtr CNNClassifier::forward(const Spectrum& s) const {
  if (s.n_points() != input_len_)
    throw std::invalid_argument("CNN: spectrum length " + std::to_string(s.n_points()) +
                                " != input width " + std::to_string(input_len_));
  NodePtr h = constant(Array({1, input_len_}, s.intensities));
  for (std::size_t l = 0; l < conv_kernels_.size(); ++l) {
    h = conv1d_multi(h, conv_kernels_[l], cfg_.stride, conv_biases_[l]);
    h = activation(cfg_.nonlinearity, h);
  }
  h = reshape(h, {1, flat_len_});
  return mlp_forward(h, head_weights_, head_biases_, cfg_.nonlinearity);
}

NodePtr CNNClassifier::train_logits(const Spectrum& s, Rng&) { return forward(s); }

Array CNNClassifier::eval_logits(const Spectrum& s) const { return forward(s)->value; }

int CNNClassifier::predict(const Spectrum& s) const { return argmax_lowest(eval_logits(s)); }

// ---------------------------------------------------------------------------
// decision tree

namespace {

double gini(const std::vector<std::size_t>& counts, std::size_t total) {
  if (total == 0) return 0.0;
  double g = 1.0;
  for (std::size_t c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    g -= p * p;
  }
  return g;
}

int majority_class(const std::vector<std::size_t>& counts) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c)
    if (counts[c] > counts[best]) best = c;  // tie -> lowest class index
  return static_cast<int>(best);
}

}  // namespace

namespace {

// Weighted child impurity as the exact rational
//   (nl^2 - sum cl_i^2)/nl + (nr^2 - sum cr_i^2)/nr
// scaled by n; comparing candidates in integer arithmetic makes the split
// choice (and its tie rules) independent of float rounding.
struct ImpurityKey {
  long long num_l = 0, nl = 1;
  long long num_r = 0, nr = 1;

  bool less_than(const ImpurityKey& o) const {
    const __int128 lhs = (static_cast<__int128>(num_l) * nr + static_cast<__int128>(num_r) * nl) *
                         (static_cast<__int128>(o.nl) * o.nr);
    const __int128 rhs = (static_cast<__int128>(o.num_l) * o.nr +
                          static_cast<__int128>(o.num_r) * o.nl) *
                         (static_cast<__int128>(nl) * nr);
    return lhs < rhs;
  }
};

long long sq_sum(const std::vector<std::size_t>& counts) {
  long long s = 0;
  for (std::size_t c : counts) s += static_cast<long long>(c) * static_cast<long long>(c);
  return s;
}

}  // namespace

SplitCandidate best_gini_split(const std::vector<std::vector<double>>& x,
                               const std::vector<int>& y,
                               const std::vector<std::size_t>& idx,
                               std::size_t n_classes, std::size_t min_samples_leaf) {
  SplitCandidate best;
  const std::size_t n = idx.size();
  if (n < 2) return best;
  const std::size_t n_features = x[0].size();

  std::vector<std::size_t> parent_counts(n_classes, 0);
  for (std::size_t i : idx) ++parent_counts[static_cast<std::size_t>(y[i])];
  const long long nn = static_cast<long long>(n);
  const long long parent_num = nn * nn - sq_sum(parent_counts);  // n^2 - sum c^2

  bool found = false;
  ImpurityKey best_key;
  std::vector<std::pair<double, int>> vals(n);
  for (std::size_t f = 0; f < n_features; ++f) {
    for (std::size_t i = 0; i < n; ++i) vals[i] = {x[idx[i]][f], y[idx[i]]};
    std::sort(vals.begin(), vals.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // Sweep left-to-right, moving samples into the left child at each
    // distinct-value boundary; threshold is the midpoint.
    std::vector<std::size_t> left(n_classes, 0);
    std::vector<std::size_t> right = parent_counts;
    std::size_t n_left = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      ++left[static_cast<std::size_t>(vals[i].second)];
      --right[static_cast<std::size_t>(vals[i].second)];
      ++n_left;
      if (vals[i].first == vals[i + 1].first) continue;
      if (n_left < min_samples_leaf || n - n_left < min_samples_leaf) continue;

      const std::size_t n_right = n - n_left;
      ImpurityKey key;
      key.nl = static_cast<long long>(n_left);
      key.nr = static_cast<long long>(n_right);
      key.num_l = key.nl * key.nl - sq_sum(left);
      key.num_r = key.nr * key.nr - sq_sum(right);

      // must strictly improve on the unsplit node: I_child < I_parent,
      // i.e. num_l/nl + num_r/nr < parent_num/n
      const __int128 child = (static_cast<__int128>(key.num_l) * key.nr +
                              static_cast<__int128>(key.num_r) * key.nl) *
                             nn;
      const __int128 parent =
          static_cast<__int128>(parent_num) * (static_cast<__int128>(key.nl) * key.nr);
      if (!(child < parent)) continue;

      // strictly-lower impurity wins; ties keep the earlier (lower
      // feature, lower threshold) candidate
      if (!found || key.less_than(best_key)) {
        found = true;
        best_key = key;
        best.feature = f;
        best.threshold = 0.5 * (vals[i].first + vals[i + 1].first);
        const double w_left = static_cast<double>(n_left) / static_cast<double>(n);
        best.gain = gini(parent_counts, n) - w_left * gini(left, n_left) -
                    (1.0 - w_left) * gini(right, n_right);
      }
    }
  }
  best.found = found;
  return best;
}

std::size_t DecisionTree::build(const std::vector<std::vector<double>>& x,
                                const std::vector<int>& y, std::vector<std::size_t>& idx,
                                std::size_t depth, const TreeConfig& cfg,
                                std::size_t n_classes) {
  std::vector<std::size_t> counts(n_classes, 0);
  for (std::size_t i : idx) ++counts[static_cast<std::size_t>(y[i])];

  TreeNode node;
  node.leaf_class = majority_class(counts);

  const bool pure = counts[static_cast<std::size_t>(node.leaf_class)] == idx.size();
  SplitCandidate split;
  if (!pure && depth < cfg.max_depth && idx.size() >= 2 * cfg.min_samples_leaf)
    split = best_gini_split(x, y, idx, n_classes, cfg.min_samples_leaf);

  if (!split.found) {
    nodes_.push_back(node);
    return nodes_.size() - 1;
  }

  std::vector<std::size_t> left_idx, right_idx;
  for (std::size_t i : idx)
    (x[i][split.feature] < split.threshold ? left_idx : right_idx).push_back(i);

  node.feature = static_cast<int>(split.feature);
  node.threshold = split.threshold;
  const std::size_t self = nodes_.size();
  nodes_.push_back(node);
  idx.clear();
  idx.shrink_to_fit();
  const std::size_t li = build(x, y, left_idx, depth + 1, cfg, n_classes);
  nodes_[self].left = li;
  const std::size_t ri = build(x, y, right_idx, depth + 1, cfg, n_classes);
  nodes_[self].right = ri;
  return self;
}

void DecisionTree::fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                       const TreeConfig& cfg, std::size_t n_classes) {
  if (x.empty() || x.size() != y.size())
    throw std::invalid_argument("DecisionTree: empty or mismatched training data");
  nodes_.clear();
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  build(x, y, idx, 0, cfg, n_classes);
}

int DecisionTree::predict(const std::vector<double>& x) const {
  std::size_t i = 0;
  while (nodes_[i].feature >= 0)
    i = x[static_cast<std::size_t>(nodes_[i].feature)] < nodes_[i].threshold
            ? nodes_[i].left
            : nodes_[i].right;
  return nodes_[i].leaf_class;
}

DecisionTree fit_tree(const std::vector<Spectrum>& train, const TreeConfig& cfg,
                      std::size_t n_classes) {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  x.reserve(train.size());
  for (const auto& s : train) {
    x.push_back(s.intensities);
    y.push_back(s.label);
  }
  DecisionTree t;
  t.fit(x, y, cfg, n_classes);
  return t;
}

int tree_predict(const DecisionTree& t, const Spectrum& s) { return t.predict(s.intensities); }

// ---------------------------------------------------------------------------
// linear SVM

void LinearSvm::fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                    const SvmConfig& cfg, std::size_t n_classes) {
  if (x.empty() || x.size() != y.size())
    throw std::invalid_argument("LinearSvm: empty or mismatched training data");
  if (n_classes < 2) throw std::invalid_argument("LinearSvm: need C >= 2");
  const std::size_t dim = x[0].size() + 1;  // bias folded in as a constant-1 feature
  w_.assign(n_classes, std::vector<double>(dim, 0.0));

  Rng rng = Rng::derive(cfg.seed, stream::kSvm);
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);

  // Pegasos subgradient updates on the one-vs-rest hinge objectives,
  // lambda/2 |w|^2 + mean hinge; one shared shuffled pass per epoch.
  long t = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
      const auto& xi = x[i];
      for (std::size_t c = 0; c < w_.size(); ++c) {
        auto& w = w_[c];
        const double target = y[i] == static_cast<int>(c) ? 1.0 : -1.0;
        double margin = w[dim - 1];
        for (std::size_t j = 0; j + 1 < dim; ++j) margin += w[j] * xi[j];
        margin *= target;
        const double shrink = 1.0 - eta * cfg.lambda;
        for (double& wj : w) wj *= shrink;
        if (margin < 1.0) {
          const double step = eta * target;
          for (std::size_t j = 0; j + 1 < dim; ++j) w[j] += step * xi[j];
          w[dim - 1] += step;
        }
      }
    }
  }
}

int LinearSvm::predict(const std::vector<double>& x) const {
  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t c = 0; c < w_.size(); ++c) {
    const auto& w = w_[c];
    double score = w.back();
    for (std::size_t j = 0; j + 1 < w.size(); ++j) score += w[j] * x[j];
    if (c == 0 || score > best_score) {
      best = c;
      best_score = score;
    }
  }
  return static_cast<int>(best);
}

LinearSvm fit_svm(const std::vector<Spectrum>& train, const SvmConfig& cfg,
                  std::size_t n_classes) {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  x.reserve(train.size());
  for (const auto& s : train) {
    x.push_back(s.intensities);
    y.push_back(s.label);
  }
  LinearSvm m;
  m.fit(x, y, cfg, n_classes);
  return m;
}

int svm_predict(const LinearSvm& m, const Spectrum& s) { return m.predict(s.intensities); }

// ---------------------------------------------------------------------------
// genetic algorithm

namespace {

double sample_gene(const GeneSpec& g, Rng& rng) {
  if (g.integer)
    return static_cast<double>(
        static_cast<long>(g.lo) +
        static_cast<long>(rng.uniform_index(static_cast<std::uint64_t>(g.hi - g.lo + 1))));
  return rng.uniform(g.lo, g.hi);
}

}  // namespace

GAResult ga_optimize(const std::vector<GeneSpec>& space, const FitnessFn& fitness,
                     const GAConfig& cfg, std::uint64_t seed) {
  if (space.empty()) throw std::invalid_argument("ga_optimize: empty search space");
  if (cfg.population < 2) throw std::invalid_argument("ga_optimize: population must be >= 2");

  Rng rng = Rng::derive(seed, stream::kGa);

  std::vector<Genome> pop(cfg.population);
  for (auto& g : pop) {
    g.resize(space.size());
    for (std::size_t j = 0; j < space.size(); ++j) g[j] = sample_gene(space[j], rng);
  }

  GAResult result;
  std::vector<double> fit(pop.size());
  const auto evaluate_pop = [&] {
    for (std::size_t i = 0; i < pop.size(); ++i) {
      fit[i] = fitness(pop[i]);
      // strictly-greater keeps the earliest individual on ties
      if (result.best.empty() || fit[i] > result.best_fitness) {
        result.best = pop[i];
        result.best_fitness = fit[i];
      }
    }
  };

  evaluate_pop();
  result.generation_best.push_back(result.best_fitness);

  const auto tournament = [&]() -> std::size_t {
    std::size_t winner = rng.uniform_index(pop.size());
    for (int k = 1; k < cfg.tournament; ++k) {
      const std::size_t challenger = rng.uniform_index(pop.size());
      if (fit[challenger] > fit[winner]) winner = challenger;
    }
    return winner;
  };

  for (int gen = 1; gen < cfg.generations; ++gen) {
    std::vector<Genome> next(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
      Genome child = pop[tournament()];
      if (rng.uniform() < cfg.crossover_rate) {
        const Genome& other = pop[tournament()];
        for (std::size_t j = 0; j < child.size(); ++j)
          if (rng.uniform() < 0.5) child[j] = other[j];
      }
      for (std::size_t j = 0; j < child.size(); ++j)
        if (rng.uniform() < cfg.mutation_rate) child[j] = sample_gene(space[j], rng);
      next[i] = std::move(child);
    }
    pop = std::move(next);
    evaluate_pop();
    result.generation_best.push_back(result.best_fitness);
  }
  return result;
}

std::vector<GeneSpec> dt_search_space() {
  return {{"max_depth", true, 1, 20}, {"min_samples_leaf", true, 1, 10}};
}

std::vector<GeneSpec> svm_search_space() { return {{"log10_lambda", false, -6.0, 2.0}}; }

}  // namespace specint
