#pragma once

#include <string>
#include <vector>

// WDM channel plan. Center frequencies are relative to the band center;
// absolute optical frequency enters only through the reference wavelength
// used for dispersion and photon-ratio conversions.

namespace raman {

struct Channel {
  int index = 0;             // 1-based position after sorting by frequency
  double center_freq = 0.0;  // Hz, relative to band center
  double bandwidth = 0.0;    // Hz
  double launch_power = 0.0; // W (both polarizations combined)
  std::string format_id;

  double lo() const { return center_freq - 0.5 * bandwidth; }
  double hi() const { return center_freq + 0.5 * bandwidth; }
};

struct ChannelPlan {
  std::vector<Channel> channels;

  int count() const { return static_cast<int>(channels.size()); }
  const Channel& at(int index1) const { return channels.at(index1 - 1); }

  double total_power() const {
    double p = 0.0;
    for (const auto& c : channels) p += c.launch_power;
    return p;
  }
  // Occupied band edges.
  double band_lo() const { return channels.front().lo(); }
  double band_hi() const { return channels.back().hi(); }
};

// Uniform grid helper: `count` channels spaced by `spacing`, centered on 0.
ChannelPlan uniform_plan(int count, double spacing, double bandwidth, double power_w,
                         const std::string& format_id);

}  // namespace raman
