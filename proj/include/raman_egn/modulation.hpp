#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

// Modulation formats and the normalized moment factors that weight the
// model's non-Gaussianity correction terms. Moments are per polarization;
// the launch-power split across polarizations is handled by the consumers.

namespace raman {

struct Moments {
  double m2 = 0.0;  // E|b|^2
  double m4 = 0.0;  // E|b|^4
  double m6 = 0.0;  // E|b|^6
};

class ModulationFormat {
 public:
  // Uniform-probability constellation. Must have >= 2 points and zero mean.
  static ModulationFormat from_constellation(std::string name,
                                             std::vector<std::complex<double>> points);
  // Explicit normalized moments (no point set; cannot be used by the simulator).
  static ModulationFormat from_moments(std::string name, Moments m);

  const std::string& name() const { return name_; }
  bool has_constellation() const { return !points_.empty(); }
  const std::vector<std::complex<double>>& points() const { return points_; }

  Moments moments() const { return moments_; }
  double phi() const;  // m4/m2^2 - 2 (excess kurtosis)
  double psi() const;  // m6/m2^3 - 9 m4/m2^2 + 12

 private:
  ModulationFormat() = default;
  std::string name_;
  std::vector<std::complex<double>> points_;
  Moments moments_;
};

// Registry with the built-in formats (qpsk, 16qam, 64qam, gaussian) plus
// any user-defined entries from the config.
class FormatRegistry {
 public:
  FormatRegistry();  // built-ins only

  void add(ModulationFormat fmt);
  bool contains(const std::string& name) const;
  const ModulationFormat& get(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, ModulationFormat> formats_;
};

// Square-QAM constellation on the odd-integer grid, normalized to unit
// average energy. order must be a square of a power of two (4, 16, 64, ...).
std::vector<std::complex<double>> square_qam_points(int order);

}  // namespace raman
