#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "raman_egn/channel_plan.hpp"
#include "raman_egn/link.hpp"

// Signal power profile rho(z, f) under loss and stimulated Raman scattering.
// Three fidelities: coupled-ODE ground truth, a general closed form valid for
// frequency-dependent loss, and the flat-loss closed form. All profiles are
// normalized to rho(0, f) = 1 across the band.

namespace raman::srs {

// (1 - e^{-alpha z}) / alpha, continuous at alpha -> 0.
double effective_length(double z, double alpha);

// Piecewise-constant power spectral density over channel bands.
struct BandSpectrum {
  struct Band {
    double lo = 0.0;   // Hz
    double hi = 0.0;   // Hz
    double psd = 0.0;  // W/Hz
  };
  std::vector<Band> bands;

  static BandSpectrum from_plan(const ChannelPlan& plan);

  double total_power() const;
  // integral of psd(w) * e^{-c w} dw over all bands, in closed form.
  double laplace_integral(double c) const;
  // integral of psd(w) * w dw (first moment).
  double first_moment() const;
};

enum class ProfileKind { Flat, SimplifiedSrs, GeneralSrs, OdeGrid };

class PowerProfile {
 public:
  virtual ~PowerProfile() = default;
  virtual ProfileKind kind() const = 0;
  virtual double rho(double z, double f) const = 0;
  // ln rho over a frequency grid at fixed z (bulk path for the simulator).
  virtual void log_rho_grid(double z, const std::vector<double>& freqs,
                            std::vector<double>& out) const;
  // When ln rho(z, f) = a + b f, fills (a, b) and returns true.
  virtual bool log_rho_affine(double z, double* a, double* b) const;

  double span_length() const { return span_length_; }

 protected:
  explicit PowerProfile(double span_length) : span_length_(span_length) {}
  double span_length_ = 0.0;
};

// rho = e^{-alpha(f) z}; no SRS.
class FlatProfile final : public PowerProfile {
 public:
  FlatProfile(FreqDependent attenuation, double span_length)
      : PowerProfile(span_length), attenuation_(std::move(attenuation)) {}
  ProfileKind kind() const override { return ProfileKind::Flat; }
  double rho(double z, double f) const override;
  bool log_rho_affine(double z, double* a, double* b) const override;

 private:
  FreqDependent attenuation_;
};

// Flat-loss closed form: exponential tilt against a self-normalizing
// spectrum integral; exact for flat loss, triangular Raman gain and unit
// photon ratio.
class SimplifiedSrsProfile final : public PowerProfile {
 public:
  SimplifiedSrsProfile(BandSpectrum spectrum, double alpha, double raman_slope,
                       double span_length);
  ProfileKind kind() const override { return ProfileKind::SimplifiedSrs; }
  double rho(double z, double f) const override;
  bool log_rho_affine(double z, double* a, double* b) const override;

 private:
  void affine_at(double z, double* a, double* b) const;
  BandSpectrum spectrum_;
  double alpha_;
  double raman_slope_;
  double total_power_;
  mutable std::mutex cache_mu_;
  mutable std::unordered_map<uint64_t, std::pair<double, double>> affine_cache_;
};

// General closed form with frequency-dependent attenuation inside both the
// exponent and the normalizing integrals.
class GeneralSrsProfile final : public PowerProfile {
 public:
  GeneralSrsProfile(BandSpectrum spectrum, FreqDependent attenuation, double raman_slope,
                    double span_length);
  ProfileKind kind() const override { return ProfileKind::GeneralSrs; }
  double rho(double z, double f) const override;

 private:
  struct ZTerms {
    double log_n1 = 0.0;    // ln of integral G(0,w) e^{-alpha(w) z} dw
    double leff_int = 0.0;  // integral G(0,w) L_eff(z, w) dw
    double log_den = 0.0;   // ln of the normalizing integral
  };
  ZTerms terms_at(double z) const;

  BandSpectrum spectrum_;
  FreqDependent attenuation_;
  double raman_slope_;
  mutable std::mutex cache_mu_;
  mutable std::unordered_map<uint64_t, ZTerms> z_cache_;
};

// Sampled per-channel powers from the coupled-ODE solver; log-linear
// interpolation in z, nearest channel in f.
class OdeGridProfile final : public PowerProfile {
 public:
  OdeGridProfile(std::vector<double> z_grid, std::vector<double> channel_freqs,
                 std::vector<double> channel_power0, std::vector<std::vector<double>> log_rho,
                 double span_length);
  ProfileKind kind() const override { return ProfileKind::OdeGrid; }
  double rho(double z, double f) const override;

  const std::vector<double>& z_grid() const { return z_grid_; }
  const std::vector<double>& channel_freqs() const { return channel_freqs_; }
  // Absolute channel power (W) at grid point (iz, channel).
  double power(size_t iz, size_t ch) const;

 private:
  size_t channel_of(double f) const;
  std::vector<double> z_grid_;
  std::vector<double> channel_freqs_;
  std::vector<double> channel_power0_;
  std::vector<std::vector<double>> log_rho_;  // [z][channel]
};

struct OdeOptions {
  double step = 100.0;        // m
  bool exact_photon_ratio = false;
  double reference_freq = 0.0;  // absolute Hz of band center; needed for exact ratio
  double drift_tolerance = 1e-6;
};

// Fixed-step RK4 integration of the coupled power-evolution equations with
// triangular Raman gain. Throws if the post-hoc drift check fails.
std::shared_ptr<OdeGridProfile> solve_srs_odes(const ChannelPlan& plan, const Span& span,
                                               const OdeOptions& opts = {});

// d ln rho / dz by finite differences clamped to [0, L].
double srs_gain_coefficient(const PowerProfile& profile, double z, double f);

// Free-function closed forms (the profile classes are thin wrappers).
double rho_simplified(double z, double f, const BandSpectrum& spectrum, double alpha,
                      double raman_slope);
double rho_general(double z, double f, const BandSpectrum& spectrum,
                   const FreqDependent& attenuation, double raman_slope);

// Profile factory for one span given the spectrum at its input.
std::shared_ptr<PowerProfile> build_profile(ProfileKind kind, const ChannelPlan& plan,
                                            const Span& span, const OdeOptions& ode_opts = {});

// Per-span profiles for a whole link. The input spectrum of span s+1 is the
// launch spectrum propagated through s spans and amplifiers, so uncompensated
// links see progressively tilted spectra.
std::vector<std::shared_ptr<PowerProfile>> build_link_profiles(const ChannelPlan& plan,
                                                               const Link& link,
                                                               ProfileKind kind,
                                                               const OdeOptions& ode_opts = {});

// Amplifier gain resolution against the span profile. Compensating gain
// inverts loss and SRS tilt exactly, making g(f) rho(L, f) identically 1.
class GainResolver {
 public:
  GainResolver(const Span& span, std::shared_ptr<const PowerProfile> profile)
      : span_(&span), profile_(std::move(profile)) {}

  double gain(double f) const;
  // g(f) * rho(L, f): the per-span launch-power carryover factor.
  double gain_rho_product(double f) const;

 private:
  const Span* span_;
  std::shared_ptr<const PowerProfile> profile_;
};

// Memoized profile access. Frequencies are quantized to 1 MHz so kernel
// quadratures hit identical keys across Monte-Carlo samples; z keys stay
// exact because the quadrature nodes are a fixed lattice and the kernel
// accuracy budget does not survive z rounding. Safe for concurrent reads
// and concurrent inserts of identical values.
class CachedProfile {
 public:
  explicit CachedProfile(std::shared_ptr<const PowerProfile> p) : profile_(std::move(p)) {}

  double rho_q(double z, double f) const;
  const PowerProfile& profile() const { return *profile_; }

 private:
  struct Key {
    double z;
    int64_t fq;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    size_t operator()(const Key& k) const;
  };
  std::shared_ptr<const PowerProfile> profile_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<Key, double, KeyHash> memo_;
};

}  // namespace raman::srs
