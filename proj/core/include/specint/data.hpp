#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "specint/spectrum.hpp"

namespace specint {

struct Dataset {
  std::string name;
  std::vector<std::string> class_names;  // index == label
  std::vector<Spectrum> spectra;         // all sharing one wavelength grid

  std::size_t size() const { return spectra.size(); }
  int n_classes() const { return static_cast<int>(class_names.size()); }
  std::size_t n_points() const { return spectra.empty() ? 0 : spectra[0].n_points(); }
};

/// Normalizes every spectrum (see normalize()); constant-spectrum warnings
/// go to `warn` when given.
Dataset normalize(const Dataset& d, std::ostream* warn = nullptr);

/// Canonical CSV: header "label,w1,...,wn" with strictly ascending numeric
/// wavelengths; each row a class name followed by n intensities. Class
/// indices are assigned by first appearance. Floats are written with
/// shortest round-trip formatting, so save followed by load is bit-exact.
Dataset load_csv(const std::string& path);
Dataset load_csv(std::istream& in, const std::string& origin);
void save_csv(const Dataset& d, const std::string& path);
void save_csv(const Dataset& d, std::ostream& out);

/// The repeated-split protocol: a seeded permutation of [0, N); the first
/// ceil(0.9 N) indices train (with a validation tail carved from inside
/// them), the rest test.
struct SplitPlan {
  std::uint64_t seed = 0;
  std::vector<std::size_t> train;  // training portion minus validation
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;

  std::vector<std::size_t> train_and_val() const;
};

SplitPlan make_split(std::size_t n, std::uint64_t seed, double val_fraction = 1.0 / 9.0);

/// Synthetic spectra: each class is a fixed sum of Gaussian peaks over a
/// shared background, sampled with i.i.d. Gaussian noise. A chosen
/// fraction of samples is corrupted by shifting one of its peaks by +0.15
/// along the normalized axis (the stand-in for manually adulterated
/// samples). Peak centers/widths live on the normalized [0,1] axis.
struct GaussPeak {
  double center;
  double width;
  double amplitude;
};

struct SynthClass {
  std::string name;
  std::vector<GaussPeak> peaks;
  std::size_t count = 0;
};

struct SynthSpec {
  std::string name;
  std::size_t grid_len = 256;
  double wl_lo = 0.0;
  double wl_hi = 1.0;
  double noise_sigma = 0.0;
  double outlier_fraction = 0.0;
  std::uint64_t seed = 0;
  std::vector<GaussPeak> background;  // shared by all classes
  std::vector<SynthClass> classes;
};

Dataset generate_synthetic(const SynthSpec& spec);

/// Named presets mirroring the benchmark dataset shapes:
///   synth-fruit   2 classes, 983 x 235
///   synth-meat    3 classes, 120 x 256 (the desk-scale acceptance preset)
///   synth-textile 3 classes, 221 x 2800
SynthSpec synth_preset(const std::string& name, std::uint64_t seed);
std::vector<std::string> synth_preset_names();

}  // namespace specint
