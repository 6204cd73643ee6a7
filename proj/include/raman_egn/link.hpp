#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

// Fiber link data model: spans with per-span parameters, each followed by
// an amplifier. Attenuation and gain may be flat or tabulated over the band.

namespace raman {

// Piecewise-linear table over frequency (Hz, band-center-relative).
// Queries outside the tabulated domain clamp to the end values; the
// `clamped` flag records that this happened so validation can warn.
class FreqTable {
 public:
  FreqTable() = default;
  FreqTable(std::vector<double> freqs, std::vector<double> values);

  double operator()(double f) const;
  double min_freq() const { return freqs_.front(); }
  double max_freq() const { return freqs_.back(); }
  bool covers(double lo, double hi) const { return freqs_.front() <= lo && freqs_.back() >= hi; }
  bool clamped() const { return clamped_; }
  const std::vector<double>& freqs() const { return freqs_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> freqs_;
  std::vector<double> values_;
  mutable bool clamped_ = false;
};

// Flat coefficient or frequency table.
struct FreqDependent {
  double flat = 0.0;
  std::optional<FreqTable> table;

  bool is_flat() const { return !table.has_value(); }
  double operator()(double f) const { return table ? (*table)(f) : flat; }
};

enum class GainMode {
  Scalar,      // flat linear gain
  Table,       // tabulated linear gain over frequency
  Compensate,  // inverts the span's loss and SRS tilt exactly: g(f) = 1/rho(L, f)
};

struct GainSpec {
  GainMode mode = GainMode::Scalar;
  double scalar = 1.0;           // linear
  std::optional<FreqTable> table;  // linear vs frequency

  double value(double f) const {
    switch (mode) {
      case GainMode::Scalar: return scalar;
      case GainMode::Table: return (*table)(f);
      default:
        throw std::logic_error("GainSpec: compensating gain must be resolved against a profile");
    }
  }
};

struct Span {
  double length = 0.0;        // m
  FreqDependent attenuation;  // Np/m
  double beta2 = 0.0;         // s^2/m
  double beta3 = 0.0;         // s^3/m
  double gamma = 0.0;         // 1/(W m)
  double raman_slope = 0.0;   // 1/(W m Hz)
  GainSpec amp_gain;

  double alpha(double f) const { return attenuation(f); }
};

struct Link {
  std::vector<Span> spans;
  int count() const { return static_cast<int>(spans.size()); }
};

}  // namespace raman
