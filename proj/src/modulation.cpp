#include "raman_egn/modulation.hpp"

#include <cmath>
#include <stdexcept>

namespace raman {

namespace {

Moments constellation_moments(const std::vector<std::complex<double>>& pts) {
  Moments m;
  for (const auto& p : pts) {
    const double a2 = std::norm(p);
    m.m2 += a2;
    m.m4 += a2 * a2;
    m.m6 += a2 * a2 * a2;
  }
  const double n = static_cast<double>(pts.size());
  m.m2 /= n;
  m.m4 /= n;
  m.m6 /= n;
  return m;
}

}  // namespace

ModulationFormat ModulationFormat::from_constellation(std::string name,
                                                      std::vector<std::complex<double>> points) {
  if (points.size() < 2)
    throw std::invalid_argument("format '" + name + "': constellation needs >= 2 points");
  std::complex<double> mean{0.0, 0.0};
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  ModulationFormat f;
  f.moments_ = constellation_moments(points);
  if (!(f.moments_.m2 > 0.0))
    throw std::invalid_argument("format '" + name + "': zero average energy");
  if (std::abs(mean) / std::sqrt(f.moments_.m2) > 1e-12)
    throw std::invalid_argument("format '" + name + "': constellation mean is not zero");
  f.name_ = std::move(name);
  f.points_ = std::move(points);
  return f;
}

ModulationFormat ModulationFormat::from_moments(std::string name, Moments m) {
  if (!(m.m2 > 0.0))
    throw std::invalid_argument("format '" + name + "': m2 must be > 0");
  if (m.m4 < m.m2 * m.m2)
    throw std::invalid_argument("format '" + name + "': m4 < m2^2 violates Jensen");
  if (m.m6 < m.m4 * m.m2)
    throw std::invalid_argument("format '" + name + "': m6 < m4*m2");
  ModulationFormat f;
  f.name_ = std::move(name);
  f.moments_ = m;
  return f;
}

double ModulationFormat::phi() const {
  return moments_.m4 / (moments_.m2 * moments_.m2) - 2.0;
}

double ModulationFormat::psi() const {
  const double m2 = moments_.m2;
  return moments_.m6 / (m2 * m2 * m2) - 9.0 * moments_.m4 / (m2 * m2) + 12.0;
}

std::vector<std::complex<double>> square_qam_points(int order) {
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
  if (side * side != order || side < 2)
    throw std::invalid_argument("square_qam_points: order must be a perfect square >= 4");
  std::vector<std::complex<double>> pts;
  pts.reserve(order);
  double energy = 0.0;
  for (int i = 0; i < side; ++i) {
    for (int q = 0; q < side; ++q) {
      const double re = 2.0 * i - (side - 1);
      const double im = 2.0 * q - (side - 1);
      pts.emplace_back(re, im);
      energy += re * re + im * im;
    }
  }
  const double scale = 1.0 / std::sqrt(energy / order);
  for (auto& p : pts) p *= scale;
  return pts;
}

FormatRegistry::FormatRegistry() {
  add(ModulationFormat::from_constellation("qpsk", square_qam_points(4)));
  add(ModulationFormat::from_constellation("16qam", square_qam_points(16)));
  add(ModulationFormat::from_constellation("64qam", square_qam_points(64)));
  // Complex circular Gaussian, unit power per polarization symbol.
  add(ModulationFormat::from_moments("gaussian", Moments{1.0, 2.0, 6.0}));
}

void FormatRegistry::add(ModulationFormat fmt) {
  formats_.insert_or_assign(fmt.name(), std::move(fmt));
}

bool FormatRegistry::contains(const std::string& name) const {
  return formats_.count(name) != 0;
}

const ModulationFormat& FormatRegistry::get(const std::string& name) const {
  auto it = formats_.find(name);
  if (it == formats_.end())
    throw std::out_of_range("unknown modulation format '" + name + "'");
  return it->second;
}

std::vector<std::string> FormatRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(formats_.size());
  for (const auto& [k, v] : formats_) out.push_back(k);
  return out;
}

}  // namespace raman
