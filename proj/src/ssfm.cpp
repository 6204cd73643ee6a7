#include "raman_egn/ssfm.hpp"

#include <fftw3.h>

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>

#include "raman_egn/numerics.hpp"
#include "raman_egn/units.hpp"

namespace raman::ssfm {

namespace {

// FFTW planning is not thread-safe; execution on the plan's own buffer is.
std::mutex& fftw_plan_mutex() {
  static std::mutex mu;
  return mu;
}

class Fft {
 public:
  explicit Fft(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    buf_ = fftw_alloc_complex(n);
    fwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft() {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(buf_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  // forward applies 1/N so that forward(inverse(v)) == v; with that pairing,
  // sum |spec|^2 equals the mean time-domain power.
  void forward(std::vector<cdouble>& v) {
    run(v, fwd_);
    const double s = 1.0 / n_;
    for (auto& c : v) c *= s;
  }
  void inverse(std::vector<cdouble>& v) { run(v, inv_); }

 private:
  void run(std::vector<cdouble>& v, fftw_plan plan) {
    if (static_cast<int>(v.size()) != n_) throw std::logic_error("Fft: size mismatch");
    auto* b = reinterpret_cast<cdouble*>(buf_);
    std::copy(v.begin(), v.end(), b);
    fftw_execute(plan);
    std::copy(b, b + n_, v.begin());
  }
  int n_;
  fftw_complex* buf_;
  fftw_plan fwd_, inv_;
};

int uniform_index(std::mt19937_64& rng, int n) {
  // Rejection sampling; avoids library-specific distribution quirks.
  const uint64_t span = std::numeric_limits<uint64_t>::max() / n * n;
  uint64_t v;
  do {
    v = rng();
  } while (v >= span);
  return static_cast<int>(v % n);
}

double raised_cosine(double f, double rate, double rolloff) {
  const double half = 0.5 * rate;
  const double flat = half * (1.0 - rolloff);
  const double edge = half * (1.0 + rolloff);
  const double af = std::abs(f);
  if (af <= flat) return 1.0;
  if (af >= edge) return 0.0;
  return 0.5 * (1.0 + std::cos(kPi / (rolloff * rate) * (af - flat)));
}

int bin_index(int k, int n) { return k >= 0 ? k : k + n; }  // signed bin -> array index

}  // namespace

double Waveform::mean_power() const {
  double p = 0.0;
  for (const auto& c : spec_x) p += std::norm(c);
  for (const auto& c : spec_y) p += std::norm(c);
  return p;
}

Waveform build_waveform(const ChannelPlan& plan, const FormatRegistry& formats,
                        const WaveformOptions& options) {
  const int w = options.n_symbols;
  if (w < 1024 || (w & (w - 1)) != 0)
    throw std::invalid_argument("build_waveform: n_symbols must be a power of two >= 1024");
  if (plan.channels.empty()) throw std::invalid_argument("build_waveform: empty plan");

  const double bandwidth = plan.channels.front().bandwidth;
  for (const auto& c : plan.channels)
    if (std::abs(c.bandwidth - bandwidth) > 1e-6)
      throw std::invalid_argument("build_waveform: simulator requires a uniform symbol rate");

  const double rate = bandwidth / (1.0 + options.rolloff);
  const double occupied = 2.0 * std::max(std::abs(plan.band_lo()), std::abs(plan.band_hi()));
  int sps = 2;
  while (sps * rate < occupied * (1.0 + options.guard)) {
    sps *= 2;
    if (sps > 1 << 14)
      throw std::invalid_argument("build_waveform: band does not fit a practical grid");
  }

  Waveform wf;
  wf.n_symbols = w;
  wf.sps = sps;
  wf.n_samples = w * sps;
  wf.symbol_rate = rate;
  wf.sample_rate = rate * sps;
  wf.f0 = rate / w;
  const int n = wf.n_samples;
  wf.spec_x.assign(n, {0.0, 0.0});
  wf.spec_y.assign(n, {0.0, 0.0});
  wf.bin_freq.resize(n);
  for (int i = 0; i < n; ++i) {
    const int k = i < n / 2 ? i : i - n;  // FFT storage order
    wf.bin_freq[i] = k * wf.f0;
  }

  // Root-raised-cosine bin gains around DC. On this grid the folded
  // raised-cosine sums to one per symbol-grid residue, so matched filtering
  // plus symbol-rate sampling is exact back to back.
  const int support = std::min(n / 2 - 1, static_cast<int>(std::ceil(0.5 * (1.0 + options.rolloff) * w)) + 2);
  wf.pulse.assign(n, 0.0);
  for (int k = -support; k <= support; ++k) {
    const double rc = raised_cosine(k * wf.f0, rate, options.rolloff);
    if (rc > 0.0) wf.pulse[bin_index(k, n)] = std::sqrt(rc);
  }

  // Snap channel centers to the bin grid, then push overlapping neighbours
  // outward: rounding by half a bin must not let pulse skirts collide.
  const int nch = static_cast<int>(plan.channels.size());
  std::vector<int> offsets(nch);
  for (int ci = 0; ci < nch; ++ci)
    offsets[ci] = static_cast<int>(llround(plan.channels[ci].center_freq / wf.f0));
  const int min_gap = static_cast<int>(std::ceil(bandwidth / wf.f0));
  int mid = 0;
  for (int ci = 1; ci < nch; ++ci)
    if (std::abs(plan.channels[ci].center_freq) < std::abs(plan.channels[mid].center_freq))
      mid = ci;
  for (int ci = mid + 1; ci < nch; ++ci)
    offsets[ci] = std::max(offsets[ci], offsets[ci - 1] + min_gap);
  for (int ci = mid - 1; ci >= 0; --ci)
    offsets[ci] = std::min(offsets[ci], offsets[ci + 1] - min_gap);

  Fft fft(w);
  for (size_t ci = 0; ci < plan.channels.size(); ++ci) {
    const Channel& ch = plan.channels[ci];
    const ModulationFormat& fmt = formats.get(ch.format_id);
    if (!fmt.has_constellation())
      throw std::invalid_argument("build_waveform: format '" + fmt.name() +
                                  "' has no constellation to transmit");
    const auto& points = fmt.points();

    ChannelSymbols cs;
    cs.bin_offset = offsets[ci];
    cs.snapped_center = cs.bin_offset * wf.f0;
    if (std::abs(cs.snapped_center) + 0.5 * ch.bandwidth > 0.5 * wf.sample_rate)
      throw std::invalid_argument("build_waveform: channel exceeds the frequency grid");

    std::mt19937_64 rng(derive_stream(options.seed, 0x5761ull, ci + 1, 0));
    for (int pol = 0; pol < 2; ++pol) {
      auto& idx = pol == 0 ? cs.idx_x : cs.idx_y;
      auto& sym = pol == 0 ? cs.sym_x : cs.sym_y;
      idx.resize(w);
      sym.resize(w);
      double energy = 0.0;
      for (int i = 0; i < w; ++i) {
        idx[i] = uniform_index(rng, static_cast<int>(points.size()));
        sym[i] = points[idx[i]];
        energy += std::norm(sym[i]);
      }
      // Half the channel power per polarization, normalized on the realized
      // sequence so the launch power is exact.
      const double scale = std::sqrt(0.5 * ch.launch_power / (energy / w));
      for (auto& s : sym) s *= scale;
      if (pol == 0) cs.scale = scale;

      std::vector<cdouble> sym_dft(sym.begin(), sym.end());
      fft.forward(sym_dft);
      auto& spec = pol == 0 ? wf.spec_x : wf.spec_y;
      for (int k = -support; k <= support; ++k) {
        const double g = wf.pulse[bin_index(k, n)];
        if (g == 0.0) continue;
        const int m = ((k % w) + w) % w;
        spec[bin_index(k + cs.bin_offset, n)] += sym_dft[m] * g;
      }
    }
    wf.channels.push_back(std::move(cs));
  }
  return wf;
}

void propagate_span(Waveform& w, const Span& span, const srs::PowerProfile& profile,
                    double phi_max) {
  if (!(phi_max > 0.0)) throw std::invalid_argument("propagate_span: phi_max must be > 0");
  const int n = w.n_samples;
  const double g89 = span.gamma * (8.0 / 9.0);
  const double len = span.length;

  std::vector<double> theta(n);  // dispersion phase per meter
  for (int i = 0; i < n; ++i) {
    const double f = w.bin_freq[i];
    theta[i] = 2.0 * kPi * kPi * span.beta2 * f * f +
               (4.0 / 3.0) * kPi * kPi * kPi * span.beta3 * f * f * f;
  }

  std::vector<double> lr1, lr2;
  auto apply_linear = [&](double z1, double z2) {
    profile.log_rho_grid(z1, w.bin_freq, lr1);
    profile.log_rho_grid(z2, w.bin_freq, lr2);
    const double dz = z2 - z1;
    for (int i = 0; i < n; ++i) {
      const cdouble factor = std::polar(std::exp(0.5 * (lr2[i] - lr1[i])), theta[i] * dz);
      w.spec_x[i] *= factor;
      w.spec_y[i] *= factor;
    }
  };

  if (g89 == 0.0) {
    apply_linear(0.0, len);
    w.acc_beta2 += span.beta2 * len;
    w.acc_beta3 += span.beta3 * len;
    return;
  }

  Fft fft(n);
  std::vector<cdouble> tx = w.spec_x, ty = w.spec_y;
  fft.inverse(tx);
  fft.inverse(ty);
  double pmax = 0.0;
  for (int i = 0; i < n; ++i) pmax = std::max(pmax, std::norm(tx[i]) + std::norm(ty[i]));

  double z = 0.0;
  double pending_half = 0.0;  // trailing linear half owed by the previous step
  while (z < len) {
    if (!(pmax > 0.0)) {  // all-zero field: nothing nonlinear left to do
      apply_linear(z - pending_half, len);
      pending_half = 0.0;
      z = len;
      break;
    }
    if (!std::isfinite(pmax))
      throw std::runtime_error("propagate_span: field diverged at z = " + std::to_string(z));
    double dz = std::min(phi_max / (g89 * pmax), len - z);
    apply_linear(z - pending_half, z + 0.5 * dz);
    tx = w.spec_x;
    ty = w.spec_y;
    fft.inverse(tx);
    fft.inverse(ty);
    pmax = 0.0;
    for (int i = 0; i < n; ++i) {
      const double p = std::norm(tx[i]) + std::norm(ty[i]);
      pmax = std::max(pmax, p);
      const cdouble rot = std::polar(1.0, g89 * p * dz);
      tx[i] *= rot;
      ty[i] *= rot;
    }
    fft.forward(tx);
    fft.forward(ty);
    w.spec_x = std::move(tx);
    w.spec_y = std::move(ty);
    tx.clear();
    ty.clear();
    pending_half = 0.5 * dz;
    z += dz;
  }
  if (pending_half > 0.0) apply_linear(len - pending_half, len);
  w.acc_beta2 += span.beta2 * len;
  w.acc_beta3 += span.beta3 * len;
}

void apply_amplifier(Waveform& w, const srs::GainResolver& resolver) {
  for (int i = 0; i < w.n_samples; ++i) {
    const double g = std::sqrt(resolver.gain(w.bin_freq[i]));
    w.spec_x[i] *= g;
    w.spec_y[i] *= g;
  }
}

ReceivedSymbols receive(const Waveform& w, int channel, int discard) {
  if (w.n_symbols < 3 * discard)
    throw std::invalid_argument("receive: needs at least " + std::to_string(3 * discard) +
                                " symbols");
  const ChannelSymbols& cs = w.channels.at(channel - 1);
  const int n = w.n_samples;
  const int nsym = w.n_symbols;

  std::vector<cdouble> base_x(nsym, {0, 0}), base_y(nsym, {0, 0});
  const int support =
      std::min(n / 2 - 1, static_cast<int>(std::ceil(0.55 * nsym)) + 2);
  for (int k = -support; k <= support; ++k) {
    const double g = w.pulse[bin_index(k, n)];
    if (g == 0.0) continue;
    const int src = bin_index(k + cs.bin_offset, n);
    const double f = w.bin_freq[src];
    // Exact removal of the accumulated dispersion, then matched filtering.
    const double phase = -(2.0 * kPi * kPi * w.acc_beta2 * f * f +
                           (4.0 / 3.0) * kPi * kPi * kPi * w.acc_beta3 * f * f * f);
    const cdouble comp = std::polar(g, phase);
    const int m = ((k % nsym) + nsym) % nsym;
    base_x[m] += w.spec_x[src] * comp;
    base_y[m] += w.spec_y[src] * comp;
  }

  Fft fft(nsym);
  fft.inverse(base_x);
  fft.inverse(base_y);

  ReceivedSymbols out;
  out.tx_scale = cs.scale;
  const int keep = nsym - 2 * discard;
  out.rx_x.reserve(keep);
  out.rx_y.reserve(keep);
  out.idx_x.reserve(keep);
  out.idx_y.reserve(keep);
  for (int i = discard; i < nsym - discard; ++i) {
    out.rx_x.push_back(base_x[i]);
    out.rx_y.push_back(base_y[i]);
    out.idx_x.push_back(cs.idx_x[i]);
    out.idx_y.push_back(cs.idx_y[i]);
  }
  return out;
}

SnrEstimate estimate_snr(const ReceivedSymbols& rx, const ModulationFormat& fmt) {
  const int npoints = static_cast<int>(fmt.points().size());
  if (npoints == 0)
    throw std::invalid_argument("estimate_snr: format has no constellation");
  std::vector<cdouble> mean(npoints, {0, 0});
  std::vector<double> power(npoints, 0.0);
  std::vector<int> count(npoints, 0);

  auto accumulate = [&](const std::vector<cdouble>& v, const std::vector<int>& idx) {
    for (size_t i = 0; i < v.size(); ++i) {
      mean[idx[i]] += v[i];
      power[idx[i]] += std::norm(v[i]);
      count[idx[i]] += 1;
    }
  };
  accumulate(rx.rx_x, rx.idx_x);
  accumulate(rx.rx_y, rx.idx_y);

  double num = 0.0, den = 0.0;
  int min_count = INT_MAX;
  for (int i = 0; i < npoints; ++i) {
    if (count[i] == 0) {
      min_count = 0;
      continue;
    }
    const cdouble mu = mean[i] / static_cast<double>(count[i]);
    num += count[i] * std::norm(mu);
    den += power[i] - count[i] * std::norm(mu);
    min_count = std::min(min_count, count[i]);
  }
  SnrEstimate est;
  est.min_observations = min_count == INT_MAX ? 0 : min_count;
  if (den <= 0.0) {
    est.infinite = true;
    est.snr = INFINITY;
    return est;
  }
  est.snr = num / den;
  return est;
}

double eta_from_snr(double snr, double launch_power) {
  if (!(launch_power > 0.0)) throw std::domain_error("eta_from_snr: launch power must be > 0");
  if (std::isinf(snr)) return 0.0;
  return 1.0 / (snr * launch_power * launch_power);
}

std::vector<SsfmChannelResult> run_ssfm(const ChannelPlan& plan, const Link& link,
                                        const FormatRegistry& formats,
                                        const SsfmOptions& options) {
  auto profiles = srs::build_link_profiles(plan, link, options.profile, options.ode);
  Waveform w = build_waveform(plan, formats, options.waveform);
  for (size_t s = 0; s < link.spans.size(); ++s) {
    propagate_span(w, link.spans[s], *profiles[s], options.phi_max);
    apply_amplifier(w, srs::GainResolver(link.spans[s], profiles[s]));
  }
  std::vector<SsfmChannelResult> out;
  out.reserve(plan.channels.size());
  for (int ch = 1; ch <= plan.count(); ++ch) {
    const auto rx = receive(w, ch, options.discard);
    const auto est = estimate_snr(rx, formats.get(plan.at(ch).format_id));
    SsfmChannelResult r;
    r.channel = ch;
    r.freq = plan.at(ch).center_freq;
    r.snr_db = est.infinite ? INFINITY : 10.0 * std::log10(est.snr);
    r.eta = eta_from_snr(est.snr, plan.at(ch).launch_power);
    r.min_observations = est.min_observations;
    out.push_back(r);
  }
  return out;
}

}  // namespace raman::ssfm
