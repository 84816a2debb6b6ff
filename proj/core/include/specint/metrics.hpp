#pragma once

#include <cstddef>
#include <vector>

namespace specint {

/// C x C counts; rows are true classes, columns predicted.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t n_classes)
      : c_(n_classes), counts_(n_classes * n_classes, 0) {}

  void add(int true_label, int predicted);
  std::size_t at(std::size_t t, std::size_t p) const { return counts_[t * c_ + p]; }
  std::size_t n_classes() const { return c_; }
  std::size_t total() const;

 private:
  std::size_t c_;
  std::vector<std::size_t> counts_;
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;  // macro
  double recall = 0.0;     // macro
  double f1 = 0.0;         // macro mean of per-class harmonic means
};

/// accuracy = trace/total; per-class precision/recall with 0/0 defined as
/// 0, macro-averaged. Throws on an empty matrix.
Metrics compute_metrics(const ConfusionMatrix& cm);

}  // namespace specint
