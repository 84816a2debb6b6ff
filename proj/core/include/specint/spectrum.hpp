#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace specint {

/// One measured spectrum: a strictly increasing wavelength grid (native
/// units), one intensity per grid point, and a class index.
struct Spectrum {
  std::vector<double> wavelengths;
  std::vector<double> intensities;
  int label = 0;

  std::size_t n_points() const { return wavelengths.size(); }
};

/// Min-max scales intensities to [0,1] and affinely maps the wavelength
/// axis to [0,1]. A constant spectrum maps to all zeros; that is reported
/// on `warn` (when given) but is not an error, since adulterated outliers
/// must pass through the pipeline untouched.
Spectrum normalize(const Spectrum& s, std::ostream* warn = nullptr);

}  // namespace specint
