#include "specint/training.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "specint/optim.hpp"

namespace specint {

namespace {

std::string fmt(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

double plain_cross_entropy(const Array& logits, int label) {
  const std::size_t c = logits.size();
  double mx = logits[0];
  for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, logits[j]);
  double denom = 0.0;
  for (std::size_t j = 0; j < c; ++j) denom += std::exp(logits[j] - mx);
  return std::log(denom) - (logits[static_cast<std::size_t>(label)] - mx);
}

std::string param_norms(const std::vector<Parameter>& params) {
  std::ostringstream os;
  for (const auto& p : params) {
    double n2 = 0.0;
    for (std::size_t i = 0; i < p.node->value.size(); ++i)
      n2 += p.node->value[i] * p.node->value[i];
    os << ' ' << p.name << "=" << std::sqrt(n2);
  }
  return os.str();
}

}  // namespace

void save_trace_csv(const TrainTrace& trace, std::ostream& out) {
  out << "epoch,train_loss,val_loss,val_acc\n";
  for (std::size_t e = 0; e < trace.n_epochs(); ++e)
    out << e << ',' << fmt(trace.train_loss[e]) << ',' << fmt(trace.val_loss[e]) << ','
        << fmt(trace.val_accuracy[e]) << '\n';
}

void save_trace_csv(const TrainTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_trace_csv: cannot open '" + path + "'");
  save_trace_csv(trace, out);
}

TrainTrace train(NeuralClassifier& model, const std::vector<Spectrum>& train_set,
                 const std::vector<Spectrum>& val_set, const TrainConfig& cfg) {
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  std::set<int> classes;
  for (const auto& s : train_set) classes.insert(s.label);
  if (classes.size() < 2)
    throw std::invalid_argument("train: training set contains a single class");
  if (cfg.epochs < 1 || cfg.batch_size < 1 || cfg.patience < 1)
    throw std::invalid_argument("train: counts must be positive");

  auto optimizer = make_optimizer(cfg.optimizer, cfg.learning_rate);
  Rng shuffle_rng = Rng::derive(cfg.seed, stream::kShuffle);
  Rng mc_rng = Rng::derive(cfg.seed, stream::kMcTrain);

  auto params = model.parameters();

  TrainTrace trace;
  double best_acc = -1.0;
  double best_loss = 0.0;
  std::vector<Array> best_params;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      const double inv_b = 1.0 / static_cast<double>(stop - start);
      model.zero_grad();
      double batch_loss = 0.0;
      for (std::size_t i = start; i < stop; ++i) {
        const Spectrum& s = train_set[order[i]];
        NodePtr lg = model.train_logits(s, mc_rng);
        NodePtr loss = cross_entropy(reshape(lg, {1, lg->value.size()}), {s.label});
        batch_loss += loss->value.scalar_value();
        backward(scale(loss, inv_b));
      }
      batch_loss *= inv_b;
      if (!std::isfinite(batch_loss))
        throw std::runtime_error(
            "train: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
            std::to_string(batches) + "; parameter norms:" + param_norms(params));
      optimizer->step(params);
      epoch_loss += batch_loss;
      ++batches;
    }
    trace.train_loss.push_back(epoch_loss / static_cast<double>(batches));

    double vloss = 0.0, vacc = 0.0;
    if (!val_set.empty()) {
      std::size_t correct = 0;
      for (const auto& s : val_set) {
        const Array lg = model.eval_logits(s);
        vloss += plain_cross_entropy(lg, s.label);
        if (argmax_lowest(lg) == s.label) ++correct;
      }
      vloss /= static_cast<double>(val_set.size());
      vacc = static_cast<double>(correct) / static_cast<double>(val_set.size());
    }
    trace.val_loss.push_back(vloss);
    trace.val_accuracy.push_back(vacc);
    trace.epoch_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

    const bool improved =
        val_set.empty() || vacc > best_acc || (vacc == best_acc && vloss < best_loss);
    if (improved) {
      best_acc = vacc;
      best_loss = vloss;
      trace.best_epoch = epoch;
      best_params.clear();
      for (const auto& p : params) best_params.push_back(p.node->value);
    }
    if (!val_set.empty() && epoch - trace.best_epoch >= cfg.patience) break;
  }

  // Reported metrics always come from the best validation epoch.
  if (!best_params.empty())
    for (std::size_t i = 0; i < params.size(); ++i) params[i].node->value = best_params[i];
  return trace;
}

TrainTrace train_with_carved_val(NeuralClassifier& model, const std::vector<Spectrum>& all,
                                 const TrainConfig& cfg) {
  if (!(cfg.val_fraction > 0.0 && cfg.val_fraction < 1.0))
    throw std::invalid_argument("train: validation fraction must be in (0,1)");
  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng::derive(cfg.seed, stream::kSplit);
  rng.shuffle(order);
  const auto n_val = static_cast<std::size_t>(
      std::floor(static_cast<double>(all.size()) * cfg.val_fraction));
  std::vector<Spectrum> tr, va;
  for (std::size_t i = 0; i < order.size(); ++i)
    (i + n_val < order.size() ? tr : va).push_back(all[order[i]]);
  return train(model, tr, va, cfg);
}

Evaluation evaluate(const NeuralClassifier& model, const std::vector<Spectrum>& test_set) {
  Evaluation ev;
  ev.predictions.reserve(test_set.size());
  ev.logits.reserve(test_set.size());
  for (const auto& s : test_set) {
    Array lg = model.eval_logits(s);
    ev.predictions.push_back(argmax_lowest(lg));
    ev.logits.push_back(std::move(lg));
  }
  return ev;
}

}  // namespace specint
