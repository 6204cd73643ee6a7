#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include "raman_egn/channel_plan.hpp"
#include "raman_egn/link.hpp"
#include "raman_egn/modulation.hpp"
#include "raman_egn/srs.hpp"

// Split-step simulator of the averaged dual-polarization propagation
// equation with frequency-dependent gain from the SRS power profile, plus
// the receiver chain used to estimate per-channel SNR and the nonlinear
// coefficient eta.

namespace raman::ssfm {

using cdouble = std::complex<double>;

struct ChannelSymbols {
  int bin_offset = 0;         // channel center snapped to the FFT grid
  double snapped_center = 0.0;
  std::vector<int> idx_x, idx_y;        // transmitted point indices
  std::vector<cdouble> sym_x, sym_y;    // transmitted symbols (scaled)
  double scale = 1.0;                   // constellation -> launch scaling
};

struct Waveform {
  int n_samples = 0;
  int n_symbols = 0;
  int sps = 0;             // samples per symbol
  double sample_rate = 0;  // Hz
  double f0 = 0;           // bin spacing = symbol_rate / n_symbols
  double symbol_rate = 0;  // Hz

  // Frequency-domain field (unitary convention handled internally).
  std::vector<cdouble> spec_x, spec_y;
  std::vector<double> bin_freq;      // band-center-relative Hz per FFT bin
  std::vector<double> pulse;         // shared root-raised-cosine bin gains
  std::vector<ChannelSymbols> channels;

  double acc_beta2 = 0.0;  // accumulated dispersion, for receiver compensation
  double acc_beta3 = 0.0;

  double mean_power() const;  // W, both polarizations
};

struct WaveformOptions {
  int n_symbols = 8192;     // power of two >= 1024
  double rolloff = 1e-4;
  uint64_t seed = 1;
  double guard = 0.1;       // oversampling margin on the occupied band
};

// Periodic multiplex of all channels: i.i.d. symbols per channel and
// polarization, root-raised-cosine shaping, channel centers snapped to the
// grid. Realized per-channel power is normalized to the configured launch
// power exactly.
Waveform build_waveform(const ChannelPlan& plan, const FormatRegistry& formats,
                        const WaveformOptions& options);

// Symmetric split step across one span. Step size keeps the peak nonlinear
// phase rotation per step below phi_max.
void propagate_span(Waveform& w, const Span& span, const srs::PowerProfile& profile,
                    double phi_max);

void apply_amplifier(Waveform& w, const srs::GainResolver& resolver);

struct ReceivedSymbols {
  std::vector<cdouble> rx_x, rx_y;
  std::vector<int> idx_x, idx_y;  // transmitted point indices, discard applied
  double tx_scale = 1.0;
};

// Full-link dispersion compensation, matched filtering and symbol-rate
// sampling for one channel; leading/trailing symbols discarded.
ReceivedSymbols receive(const Waveform& w, int channel, int discard = 500);

struct SnrEstimate {
  double snr = 0.0;       // linear; +inf when noiseless
  int min_observations = 0;
  bool infinite = false;
};

// Conditional-mean SNR over the constellation, pooled across polarizations.
SnrEstimate estimate_snr(const ReceivedSymbols& rx, const ModulationFormat& fmt);

double eta_from_snr(double snr, double launch_power);

struct SsfmOptions {
  WaveformOptions waveform;
  double phi_max = 1e-4;
  int discard = 500;
  srs::ProfileKind profile = srs::ProfileKind::SimplifiedSrs;
  srs::OdeOptions ode;
};

struct SsfmChannelResult {
  int channel = 0;
  double freq = 0.0;
  double snr_db = 0.0;
  double eta = 0.0;          // 1/W^2
  int min_observations = 0;  // scarcest constellation point; < 100 is suspect
};

// Propagate the full link and estimate eta per channel.
std::vector<SsfmChannelResult> run_ssfm(const ChannelPlan& plan, const Link& link,
                                        const FormatRegistry& formats, const SsfmOptions& options);

}  // namespace raman::ssfm
