#include "specint/quadrature.hpp"

#include <algorithm>
#include <stdexcept>

namespace specint {

std::vector<double> sample_uniform(int n, Interval domain, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_uniform: need n >= 1");
  if (!(domain.lo < domain.hi))
    throw std::invalid_argument("sample_uniform: empty interval [" +
                                std::to_string(domain.lo) + ", " +
                                std::to_string(domain.hi) + ")");
  std::vector<double> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) p = rng.uniform(domain.lo, domain.hi);
  std::sort(pts.begin(), pts.end());
  return pts;
}

std::vector<double> eval_points(const MCConfig& mc) {
  Rng rng = Rng::derive(mc.rng_seed, stream::kMcEval);
  return sample_uniform(mc.n_eval, mc.domain, rng);
}

NodePtr mc_estimate(const NodePtr& values, Interval domain) {
  const Array& V = values->value;
  if (V.rank() == 0 || V.size() == 0)
    throw std::invalid_argument("mc_estimate: empty point list");
  const double len = domain.length();
  if (V.rank() == 1) return scale(mean(values), len);
  if (V.rank() == 2) return scale(mean_axis0(values), len);
  throw std::invalid_argument("mc_estimate: values must be [n] or [n x C], got " +
                              shape_str(V.shape()));
}

NodePtr mc_integrate(const PointIntegrand& integrand, const std::vector<double>& points,
                     Interval domain) {
  if (points.empty()) throw std::invalid_argument("mc_integrate: empty point list");
  for (double p : points)
    if (p < domain.lo || p > domain.hi)
      throw std::invalid_argument("mc_integrate: point " + std::to_string(p) +
                                  " outside domain");
  std::vector<NodePtr> rows;
  rows.reserve(points.size());
  bool scalar_rows = false;
  for (double p : points) {
    NodePtr r = integrand(p);
    if (r->value.rank() == 0) {
      scalar_rows = true;
      r = reshape(r, {1});
    } else if (r->value.rank() == 1) {
      r = reshape(r, {1, r->value.size()});
    } else {
      throw std::invalid_argument("mc_integrate: integrand must return scalar or [C]");
    }
    rows.push_back(std::move(r));
  }
  NodePtr stacked = concat(rows, 0);
  if (scalar_rows) stacked = reshape(stacked, {stacked->value.size()});
  return mc_estimate(stacked, domain);
}

double mc_integrate_plain(const std::function<double(double)>& f,
                          const std::vector<double>& points, Interval domain) {
  if (points.empty()) throw std::invalid_argument("mc_integrate_plain: empty point list");
  double acc = 0.0;
  for (double p : points) acc += f(p);
  return domain.length() * (acc / static_cast<double>(points.size()));
}

}  // namespace specint
