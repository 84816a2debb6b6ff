#include "specint/spectrum.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace specint {

Spectrum normalize(const Spectrum& s, std::ostream* warn) {
  const std::size_t n = s.n_points();
  if (n < 2) throw std::invalid_argument("normalize: need at least 2 grid points");
  if (s.intensities.size() != n)
    throw std::invalid_argument("normalize: grid/intensity length mismatch");

  Spectrum out;
  out.label = s.label;
  out.wavelengths.resize(n);
  out.intensities.resize(n);

  const double w0 = s.wavelengths.front();
  const double w_span = s.wavelengths.back() - w0;
  for (std::size_t i = 0; i < n; ++i)
    out.wavelengths[i] = (s.wavelengths[i] - w0) / w_span;

  const auto [mn_it, mx_it] = std::minmax_element(s.intensities.begin(), s.intensities.end());
  const double mn = *mn_it, mx = *mx_it;
  if (mx == mn) {
    if (warn) *warn << "normalize: constant spectrum (min == max == " << mn
                    << "), intensities set to 0\n";
    std::fill(out.intensities.begin(), out.intensities.end(), 0.0);
  } else {
    const double span = mx - mn;
    for (std::size_t i = 0; i < n; ++i)
      out.intensities[i] = (s.intensities[i] - mn) / span;
  }
  return out;
}

}  // namespace specint
