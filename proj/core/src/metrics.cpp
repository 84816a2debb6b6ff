#include "specint/metrics.hpp"

#include <stdexcept>

namespace specint {

void ConfusionMatrix::add(int true_label, int predicted) {
  const auto t = static_cast<std::size_t>(true_label);
  const auto p = static_cast<std::size_t>(predicted);
  if (true_label < 0 || t >= c_ || predicted < 0 || p >= c_)
    throw std::out_of_range("ConfusionMatrix: label outside [0, C)");
  ++counts_[t * c_ + p];
}

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (std::size_t v : counts_) n += v;
  return n;
}

Metrics compute_metrics(const ConfusionMatrix& cm) {
  const std::size_t c = cm.n_classes();
  const std::size_t total = cm.total();
  if (total == 0) throw std::invalid_argument("compute_metrics: empty confusion matrix");

  std::size_t trace = 0;
  for (std::size_t i = 0; i < c; ++i) trace += cm.at(i, i);

  Metrics m;
  m.accuracy = static_cast<double>(trace) / static_cast<double>(total);
  for (std::size_t i = 0; i < c; ++i) {
    std::size_t row = 0, col = 0;
    for (std::size_t j = 0; j < c; ++j) {
      row += cm.at(i, j);
      col += cm.at(j, i);
    }
    const double tp = static_cast<double>(cm.at(i, i));
    const double prec = col == 0 ? 0.0 : tp / static_cast<double>(col);
    const double rec = row == 0 ? 0.0 : tp / static_cast<double>(row);
    const double f1 = (prec + rec) == 0.0 ? 0.0 : 2.0 * prec * rec / (prec + rec);
    m.precision += prec;
    m.recall += rec;
    m.f1 += f1;
  }
  m.precision /= static_cast<double>(c);
  m.recall /= static_cast<double>(c);
  m.f1 /= static_cast<double>(c);
  return m;
}

}  // namespace specint
