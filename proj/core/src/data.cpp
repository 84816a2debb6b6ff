#include "specint/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "specint/rng.hpp"

namespace specint {

namespace {

[[noreturn]] void csv_error(const std::string& origin, std::size_t line, const std::string& what) {
  throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& tok, const std::string& origin, std::size_t line) {
  double v = 0.0;
  const char* b = tok.data();
  const char* e = tok.data() + tok.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  while (p < e && (*p == ' ' || *p == '\t')) ++p;
  if (ec != std::errc() || p != e)
    csv_error(origin, line, "unparseable float '" + tok + "'");
  return v;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

}  // namespace

Dataset normalize(const Dataset& d, std::ostream* warn) {
  Dataset out;
  out.name = d.name;
  out.class_names = d.class_names;
  out.spectra.reserve(d.spectra.size());
  for (const auto& s : d.spectra) out.spectra.push_back(normalize(s, warn));
  return out;
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open '" + path + "'");
  return load_csv(in, path);
}

Dataset load_csv(std::istream& in, const std::string& origin) {
  Dataset d;
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) csv_error(origin, 1, "missing header row");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_line(line);
  if (header.size() < 3 || header[0] != "label")
    csv_error(origin, line_no, "header must be 'label,w1,...,wn' with n >= 2");
  std::vector<double> grid(header.size() - 1);
  for (std::size_t i = 1; i < header.size(); ++i) {
    grid[i - 1] = parse_double(header[i], origin, line_no);
    if (i > 1 && grid[i - 1] <= grid[i - 2])
      csv_error(origin, line_no, "wavelength grid not strictly ascending at column " +
                                     std::to_string(i + 1));
  }
  const std::size_t n = grid.size();

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != n + 1)
      csv_error(origin, line_no, "expected " + std::to_string(n + 1) + " cells, got " +
                                     std::to_string(cells.size()));
    Spectrum s;
    s.wavelengths = grid;
    s.intensities.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      s.intensities[i] = parse_double(cells[i + 1], origin, line_no);
    const auto& cls = cells[0];
    auto it = std::find(d.class_names.begin(), d.class_names.end(), cls);
    if (it == d.class_names.end()) {
      d.class_names.push_back(cls);
      s.label = static_cast<int>(d.class_names.size()) - 1;
    } else {
      s.label = static_cast<int>(it - d.class_names.begin());
    }
    d.spectra.push_back(std::move(s));
  }
  if (d.spectra.empty()) csv_error(origin, line_no, "no data rows");
  d.name = origin;
  return d;
}

void save_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_csv: cannot open '" + path + "' for writing");
  save_csv(d, out);
}

void save_csv(const Dataset& d, std::ostream& out) {
  if (d.spectra.empty()) throw std::invalid_argument("save_csv: empty dataset");
  out << "label";
  for (double w : d.spectra[0].wavelengths) out << ',' << format_double(w);
  out << '\n';
  for (const auto& s : d.spectra) {
    out << d.class_names.at(static_cast<std::size_t>(s.label));
    for (double v : s.intensities) out << ',' << format_double(v);
    out << '\n';
  }
}

std::vector<std::size_t> SplitPlan::train_and_val() const {
  std::vector<std::size_t> all = train;
  all.insert(all.end(), val.begin(), val.end());
  return all;
}

SplitPlan make_split(std::size_t n, std::uint64_t seed, double val_fraction) {
  if (n < 10) throw std::invalid_argument("make_split: need at least 10 samples, got " +
                                          std::to_string(n));
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw std::invalid_argument("make_split: validation fraction must be in (0,1)");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = Rng::derive(seed, stream::kSplit);
  rng.shuffle(perm);

  const auto n_train = static_cast<std::size_t>(
      std::ceil(0.9 * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(
      std::floor(static_cast<double>(n_train) * val_fraction));

  SplitPlan plan;
  plan.seed = seed;
  plan.train.assign(perm.begin(), perm.begin() + (n_train - n_val));
  plan.val.assign(perm.begin() + (n_train - n_val), perm.begin() + n_train);
  plan.test.assign(perm.begin() + n_train, perm.end());
  return plan;
}

Dataset generate_synthetic(const SynthSpec& spec) {
  if (spec.classes.size() < 2)
    throw std::invalid_argument("generate_synthetic: need at least 2 classes");
  if (spec.grid_len < 2) throw std::invalid_argument("generate_synthetic: grid too short");
  if (spec.noise_sigma < 0.0)
    throw std::invalid_argument("generate_synthetic: negative noise sigma");
  for (const auto& c : spec.classes)
    for (const auto& p : c.peaks)
      if (p.center < 0.0 || p.center > 1.0)
        throw std::invalid_argument("generate_synthetic: peak center outside [0,1]");

  std::size_t total = 0;
  for (const auto& c : spec.classes) total += c.count;

  Rng rng = Rng::derive(spec.seed, stream::kSynth);

  // Pick exactly round(fraction * N) corrupted sample indices up front.
  const auto n_outliers =
      static_cast<std::size_t>(std::llround(spec.outlier_fraction * static_cast<double>(total)));
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<bool> is_outlier(total, false);
  for (std::size_t i = 0; i < n_outliers; ++i) is_outlier[order[i]] = true;

  Dataset d;
  d.name = spec.name;
  std::vector<double> grid(spec.grid_len);
  for (std::size_t i = 0; i < spec.grid_len; ++i)
    grid[i] = spec.wl_lo + (spec.wl_hi - spec.wl_lo) * static_cast<double>(i) /
                               static_cast<double>(spec.grid_len - 1);

  std::size_t sample_idx = 0;
  for (std::size_t k = 0; k < spec.classes.size(); ++k) {
    const auto& cls = spec.classes[k];
    d.class_names.push_back(cls.name);
    for (std::size_t rep = 0; rep < cls.count; ++rep, ++sample_idx) {
      std::vector<GaussPeak> peaks = cls.peaks;
      if (is_outlier[sample_idx] && !peaks.empty()) {
        const auto which = static_cast<std::size_t>(rng.uniform_index(peaks.size()));
        peaks[which].center += 0.15;
      }
      Spectrum s;
      s.label = static_cast<int>(k);
      s.wavelengths = grid;
      s.intensities.resize(spec.grid_len);
      for (std::size_t i = 0; i < spec.grid_len; ++i) {
        const double pos = static_cast<double>(i) / static_cast<double>(spec.grid_len - 1);
        double v = 0.0;
        for (const auto& p : spec.background)
          v += p.amplitude * std::exp(-0.5 * (pos - p.center) * (pos - p.center) /
                                      (p.width * p.width));
        for (const auto& p : peaks)
          v += p.amplitude * std::exp(-0.5 * (pos - p.center) * (pos - p.center) /
                                      (p.width * p.width));
        if (spec.noise_sigma > 0.0) v += rng.normal(0.0, spec.noise_sigma);
        s.intensities[i] = v;
      }
      d.spectra.push_back(std::move(s));
    }
  }
  return d;
}

SynthSpec synth_preset(const std::string& name, std::uint64_t seed) {
  SynthSpec s;
  s.name = name;
  s.seed = seed;
  if (name == "synth-fruit") {
    // Binary adulteration detection, 983 x 235 shape.
    s.grid_len = 235;
    s.wl_lo = 899.0;
    s.wl_hi = 1803.0;
    s.noise_sigma = 0.03;
    s.outlier_fraction = 0.05;
    s.background = {{0.50, 0.40, 0.30}};
    s.classes = {
        {"strawberry", {{0.25, 0.050, 0.90}, {0.55, 0.080, 0.50}}, 492},
        {"adulterated", {{0.25, 0.050, 0.70}, {0.55, 0.080, 0.62}, {0.80, 0.030, 0.35}}, 491},
    };
  } else if (name == "synth-meat") {
    // 3 nearly-identical meat classes, 120 x 256. Class identity is carried
    // by peak width and relative amplitude (area-like features), not by
    // peak position, so the +0.15 outlier shift does not move a sample
    // across classes.
    s.grid_len = 256;
    s.wl_lo = 850.0;
    s.wl_hi = 1050.0;
    s.noise_sigma = 0.05;
    s.outlier_fraction = 0.10;
    s.background = {{0.50, 0.40, 0.30}};
    s.classes = {
        {"chicken", {{0.30, 0.050, 0.80}, {0.68, 0.045, 0.50}}, 40},
        {"pork", {{0.30, 0.075, 0.80}, {0.68, 0.045, 0.62}}, 40},
        {"turkey", {{0.30, 0.110, 0.80}, {0.68, 0.045, 0.76}}, 40},
    };
  } else if (name == "synth-textile") {
    // 3 classes, 221 x 2800, NIR range 1100-2500 nm.
    s.grid_len = 2800;
    s.wl_lo = 1100.0;
    s.wl_hi = 2500.0;
    s.noise_sigma = 0.06;
    s.outlier_fraction = 0.10;
    s.background = {{0.45, 0.35, 0.25}};
    s.classes = {
        {"cotton", {{0.22, 0.040, 0.85}, {0.60, 0.060, 0.45}}, 74},
        {"polyester", {{0.22, 0.065, 0.85}, {0.60, 0.060, 0.60}}, 74},
        {"wool", {{0.22, 0.095, 0.85}, {0.60, 0.060, 0.75}}, 73},
    };
  } else {
    throw std::invalid_argument("unknown synthetic preset '" + name + "'");
  }
  return s;
}

std::vector<std::string> synth_preset_names() {
  return {"synth-fruit", "synth-meat", "synth-textile"};
}

}  // namespace specint
