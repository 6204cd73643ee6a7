#include "raman_egn/srs.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "raman_egn/numerics.hpp"
#include "raman_egn/units.hpp"

namespace raman::srs {

namespace {

uint64_t double_key(double x) {
  uint64_t k;
  std::memcpy(&k, &x, sizeof(k));
  return k;
}

// integral of e^{-c w} dw over [lo, hi], stable for small c.
double exp_band_integral(double lo, double hi, double c) {
  const double width = hi - lo;
  if (c == 0.0) return width;
  const double t = c * width;
  if (std::abs(t) < 1e-12) return width * std::exp(-c * 0.5 * (lo + hi));
  return std::exp(-c * lo) * (-std::expm1(-t)) / c;
}

// Adaptive Gauss-Legendre over one band, doubling until 1e-12 relative.
template <typename F>
double band_quadrature(double lo, double hi, F&& f) {
  double prev = 0.0;
  for (int n = 8; n <= 256; n *= 2) {
    const auto& rule = gauss_legendre(n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = lo + (hi - lo) * rule.nodes[i];
      acc += rule.weights[i] * f(w);
    }
    acc *= (hi - lo);
    if (n > 8 && std::abs(acc - prev) <= 1e-12 * std::abs(acc)) return acc;
    prev = acc;
  }
  return prev;
}

}  // namespace

double effective_length(double z, double alpha) {
  if (z < 0.0) throw std::domain_error("effective_length: z must be >= 0");
  if (alpha < 0.0) throw std::domain_error("effective_length: alpha must be >= 0");
  if (alpha == 0.0) return z;
  return -std::expm1(-alpha * z) / alpha;
}

BandSpectrum BandSpectrum::from_plan(const ChannelPlan& plan) {
  BandSpectrum s;
  s.bands.reserve(plan.channels.size());
  for (const auto& c : plan.channels)
    s.bands.push_back({c.lo(), c.hi(), c.launch_power / c.bandwidth});
  return s;
}

double BandSpectrum::total_power() const {
  double p = 0.0;
  for (const auto& b : bands) p += b.psd * (b.hi - b.lo);
  return p;
}

double BandSpectrum::laplace_integral(double c) const {
  double acc = 0.0;
  for (const auto& b : bands) acc += b.psd * exp_band_integral(b.lo, b.hi, c);
  return acc;
}

double BandSpectrum::first_moment() const {
  double acc = 0.0;
  for (const auto& b : bands) acc += b.psd * 0.5 * (b.hi * b.hi - b.lo * b.lo);
  return acc;
}

void PowerProfile::log_rho_grid(double z, const std::vector<double>& freqs,
                                std::vector<double>& out) const {
  out.resize(freqs.size());
  double a, b;
  if (log_rho_affine(z, &a, &b)) {
    for (size_t i = 0; i < freqs.size(); ++i) out[i] = a + b * freqs[i];
    return;
  }
  for (size_t i = 0; i < freqs.size(); ++i) out[i] = std::log(rho(z, freqs[i]));
}

bool PowerProfile::log_rho_affine(double, double*, double*) const { return false; }

double FlatProfile::rho(double z, double f) const {
  return std::exp(-attenuation_(f) * z);
}

bool FlatProfile::log_rho_affine(double z, double* a, double* b) const {
  if (!attenuation_.is_flat()) return false;
  *a = -attenuation_.flat * z;
  *b = 0.0;
  return true;
}

double rho_simplified(double z, double f, const BandSpectrum& spectrum, double alpha,
                      double raman_slope) {
  const double ptot = spectrum.total_power();
  if (!(ptot > 0.0)) throw std::domain_error("rho_simplified: total power must be > 0");
  const double c = ptot * raman_slope * effective_length(z, alpha);
  return ptot * std::exp(-alpha * z - c * f) / spectrum.laplace_integral(c);
}

SimplifiedSrsProfile::SimplifiedSrsProfile(BandSpectrum spectrum, double alpha,
                                           double raman_slope, double span_length)
    : PowerProfile(span_length),
      spectrum_(std::move(spectrum)),
      alpha_(alpha),
      raman_slope_(raman_slope),
      total_power_(spectrum_.total_power()) {
  if (!(total_power_ > 0.0))
    throw std::domain_error("SimplifiedSrsProfile: total power must be > 0");
}

void SimplifiedSrsProfile::affine_at(double z, double* a, double* b) const {
  const uint64_t key = double_key(z);
  {
    std::lock_guard<std::mutex> lock(cache_mu_);
    auto it = affine_cache_.find(key);
    if (it != affine_cache_.end()) {
      *a = it->second.first;
      *b = it->second.second;
      return;
    }
  }
  const double c = total_power_ * raman_slope_ * effective_length(z, alpha_);
  const double av = std::log(total_power_) - alpha_ * z - std::log(spectrum_.laplace_integral(c));
  std::lock_guard<std::mutex> lock(cache_mu_);
  affine_cache_.emplace(key, std::make_pair(av, -c));
  *a = av;
  *b = -c;
}

double SimplifiedSrsProfile::rho(double z, double f) const {
  double a, b;
  affine_at(z, &a, &b);
  return std::exp(a + b * f);
}

bool SimplifiedSrsProfile::log_rho_affine(double z, double* a, double* b) const {
  affine_at(z, a, b);
  return true;
}

double rho_general(double z, double f, const BandSpectrum& spectrum,
                   const FreqDependent& attenuation, double raman_slope) {
  GeneralSrsProfile p(spectrum, attenuation, raman_slope, z > 0.0 ? z : 1.0);
  return p.rho(z, f);
}

GeneralSrsProfile::GeneralSrsProfile(BandSpectrum spectrum, FreqDependent attenuation,
                                     double raman_slope, double span_length)
    : PowerProfile(span_length),
      spectrum_(std::move(spectrum)),
      attenuation_(std::move(attenuation)),
      raman_slope_(raman_slope) {
  if (!(spectrum_.total_power() > 0.0))
    throw std::domain_error("GeneralSrsProfile: total power must be > 0");
}

GeneralSrsProfile::ZTerms GeneralSrsProfile::terms_at(double z) const {
  const uint64_t key = double_key(z);
  {
    std::lock_guard<std::mutex> lock(cache_mu_);
    auto it = z_cache_.find(key);
    if (it != z_cache_.end()) return it->second;
  }
  ZTerms t;
  double n1 = 0.0, leff = 0.0;
  for (const auto& band : spectrum_.bands) {
    n1 += band.psd * band_quadrature(band.lo, band.hi, [&](double w) {
      return std::exp(-attenuation_(w) * z);
    });
    leff += band.psd * band_quadrature(band.lo, band.hi, [&](double w) {
      return effective_length(z, attenuation_(w));
    });
  }
  t.log_n1 = std::log(n1);
  t.leff_int = leff;
  double den = 0.0;
  for (const auto& band : spectrum_.bands) {
    den += band.psd * band_quadrature(band.lo, band.hi, [&](double w) {
      return std::exp(-attenuation_(w) * z - raman_slope_ * w * leff);
    });
  }
  t.log_den = std::log(den);
  std::lock_guard<std::mutex> lock(cache_mu_);
  z_cache_.emplace(key, t);
  return t;
}

double GeneralSrsProfile::rho(double z, double f) const {
  const ZTerms t = terms_at(z);
  return std::exp(t.log_n1 - t.log_den - attenuation_(f) * z - raman_slope_ * f * t.leff_int);
}

OdeGridProfile::OdeGridProfile(std::vector<double> z_grid, std::vector<double> channel_freqs,
                               std::vector<double> channel_power0,
                               std::vector<std::vector<double>> log_rho, double span_length)
    : PowerProfile(span_length),
      z_grid_(std::move(z_grid)),
      channel_freqs_(std::move(channel_freqs)),
      channel_power0_(std::move(channel_power0)),
      log_rho_(std::move(log_rho)) {
  if (z_grid_.size() < 2 || log_rho_.size() != z_grid_.size())
    throw std::invalid_argument("OdeGridProfile: inconsistent grid");
}

size_t OdeGridProfile::channel_of(double f) const {
  const auto it = std::lower_bound(channel_freqs_.begin(), channel_freqs_.end(), f);
  if (it == channel_freqs_.begin()) return 0;
  if (it == channel_freqs_.end()) return channel_freqs_.size() - 1;
  const size_t hi = static_cast<size_t>(it - channel_freqs_.begin());
  return (f - channel_freqs_[hi - 1] <= channel_freqs_[hi] - f) ? hi - 1 : hi;
}

double OdeGridProfile::rho(double z, double f) const {
  if (z < z_grid_.front() - 1e-9 || z > z_grid_.back() + 1e-9)
    throw std::domain_error("OdeGridProfile: z outside span");
  z = std::clamp(z, z_grid_.front(), z_grid_.back());
  const size_t ch = channel_of(f);
  const auto it = std::upper_bound(z_grid_.begin(), z_grid_.end(), z);
  size_t hi = std::min<size_t>(static_cast<size_t>(it - z_grid_.begin()), z_grid_.size() - 1);
  if (hi == 0) hi = 1;
  const size_t lo = hi - 1;
  const double t = (z - z_grid_[lo]) / (z_grid_[hi] - z_grid_[lo]);
  return std::exp(log_rho_[lo][ch] + t * (log_rho_[hi][ch] - log_rho_[lo][ch]));
}

double OdeGridProfile::power(size_t iz, size_t ch) const {
  return channel_power0_.at(ch) * std::exp(log_rho_.at(iz).at(ch));
}

std::shared_ptr<OdeGridProfile> solve_srs_odes(const ChannelPlan& plan, const Span& span,
                                               const OdeOptions& opts) {
  const int m = plan.count();
  if (m < 1) throw std::invalid_argument("solve_srs_odes: empty plan");
  if (opts.exact_photon_ratio && !(opts.reference_freq > 0.0))
    throw std::invalid_argument("solve_srs_odes: exact photon ratio needs a reference frequency");

  std::vector<double> freqs(m), alpha(m), p0(m);
  for (int i = 0; i < m; ++i) {
    const auto& c = plan.channels[i];
    freqs[i] = c.center_freq;
    alpha[i] = span.alpha(c.center_freq);
    p0[i] = c.launch_power;
  }

  const double cr = span.raman_slope;
  // dP_k/dz: channels above in frequency pump channel k, channels below
  // deplete it; optional photon-energy ratio on the depletion terms.
  auto rhs = [&](const std::vector<double>& p, std::vector<double>& dp) {
    for (int k = 0; k < m; ++k) {
      double g = 0.0;
      for (int i = 0; i < m; ++i) {
        if (i == k) continue;
        const double df = freqs[i] - freqs[k];
        if (df > 0.0) {
          g += cr * df * p[i];
        } else {
          double ratio = 1.0;
          if (opts.exact_photon_ratio)
            ratio = (opts.reference_freq + freqs[i]) / (opts.reference_freq + freqs[k]);
          g -= ratio * cr * (-df) * p[i];
        }
      }
      dp[k] = p[k] * (g - alpha[k]);
    }
  };

  const int nsteps = std::max(1, static_cast<int>(std::ceil(span.length / opts.step)));
  const double h = span.length / nsteps;
  std::vector<double> p = p0, k1(m), k2(m), k3(m), k4(m), tmp(m);
  std::vector<double> z_grid;
  std::vector<std::vector<double>> log_rho;
  z_grid.reserve(nsteps + 1);
  log_rho.reserve(nsteps + 1);

  auto snapshot = [&](double z) {
    std::vector<double> row(m);
    for (int i = 0; i < m; ++i) row[i] = std::log(p[i] / p0[i]);
    z_grid.push_back(z);
    log_rho.push_back(std::move(row));
  };

  snapshot(0.0);
  for (int s = 0; s < nsteps; ++s) {
    rhs(p, k1);
    for (int i = 0; i < m; ++i) tmp[i] = p[i] + 0.5 * h * k1[i];
    rhs(tmp, k2);
    for (int i = 0; i < m; ++i) tmp[i] = p[i] + 0.5 * h * k2[i];
    rhs(tmp, k3);
    for (int i = 0; i < m; ++i) tmp[i] = p[i] + h * k3[i];
    rhs(tmp, k4);
    for (int i = 0; i < m; ++i) p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    snapshot((s + 1) * h);
  }

  // Drift check. With flat loss and unit photon ratio the pairwise coupling
  // is antisymmetric, so total power must decay exactly as e^{-alpha z}.
  if (!opts.exact_photon_ratio && span.attenuation.is_flat()) {
    double ptot_end = 0.0, ptot0 = 0.0;
    for (int i = 0; i < m; ++i) {
      ptot_end += p[i];
      ptot0 += p0[i];
    }
    const double expected = ptot0 * std::exp(-span.attenuation.flat * span.length);
    if (std::abs(ptot_end - expected) > opts.drift_tolerance * expected)
      throw std::runtime_error("solve_srs_odes: energy drift check failed; refine the step");
  }

  return std::make_shared<OdeGridProfile>(std::move(z_grid), std::move(freqs), std::move(p0),
                                          std::move(log_rho), span.length);
}

double srs_gain_coefficient(const PowerProfile& profile, double z, double f) {
  const double len = profile.span_length();
  if (z < 0.0 || z > len) throw std::domain_error("srs_gain_coefficient: z outside span");
  const double h = std::min(10.0, len / 1e4);
  const double zlo = std::max(0.0, z - h);
  const double zhi = std::min(len, z + h);
  return (std::log(profile.rho(zhi, f)) - std::log(profile.rho(zlo, f))) / (zhi - zlo);
}

std::shared_ptr<PowerProfile> build_profile(ProfileKind kind, const ChannelPlan& plan,
                                            const Span& span, const OdeOptions& ode_opts) {
  switch (kind) {
    case ProfileKind::Flat:
      return std::make_shared<FlatProfile>(span.attenuation, span.length);
    case ProfileKind::SimplifiedSrs: {
      // The flat-loss closed form takes one scalar loss; a tabulated profile
      // is collapsed to its band-center value here.
      const double alpha = span.attenuation(0.0);
      return std::make_shared<SimplifiedSrsProfile>(BandSpectrum::from_plan(plan), alpha,
                                                    span.raman_slope, span.length);
    }
    case ProfileKind::GeneralSrs:
      return std::make_shared<GeneralSrsProfile>(BandSpectrum::from_plan(plan),
                                                 span.attenuation, span.raman_slope,
                                                 span.length);
    case ProfileKind::OdeGrid:
      return solve_srs_odes(plan, span, ode_opts);
  }
  throw std::logic_error("build_profile: unknown kind");
}

std::vector<std::shared_ptr<PowerProfile>> build_link_profiles(const ChannelPlan& plan,
                                                               const Link& link,
                                                               ProfileKind kind,
                                                               const OdeOptions& ode_opts) {
  std::vector<std::shared_ptr<PowerProfile>> profiles;
  profiles.reserve(link.spans.size());
  ChannelPlan current = plan;
  for (const auto& span : link.spans) {
    auto profile = build_profile(kind, current, span, ode_opts);
    GainResolver resolver(span, profile);
    for (auto& c : current.channels)
      c.launch_power *= resolver.gain_rho_product(c.center_freq);
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

double GainResolver::gain(double f) const {
  if (span_->amp_gain.mode == GainMode::Compensate)
    return 1.0 / profile_->rho(profile_->span_length(), f);
  return span_->amp_gain.value(f);
}

double GainResolver::gain_rho_product(double f) const {
  if (span_->amp_gain.mode == GainMode::Compensate) return 1.0;
  return span_->amp_gain.value(f) * profile_->rho(profile_->span_length(), f);
}

size_t CachedProfile::KeyHash::operator()(const Key& k) const {
  uint64_t zb;
  std::memcpy(&zb, &k.z, sizeof(zb));
  return static_cast<size_t>(splitmix64(zb ^ splitmix64(static_cast<uint64_t>(k.fq))));
}

double CachedProfile::rho_q(double z, double f) const {
  const Key key{z, llround(f / 1e6)};
  {
    std::shared_lock<std::shared_mutex> lock(mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  const double value = profile_->rho(z, static_cast<double>(key.fq) * 1e6);
  std::unique_lock<std::shared_mutex> lock(mu_);
  memo_.emplace(key, value);
  return value;
}

}  // namespace raman::srs
