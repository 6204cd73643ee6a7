#include "raman_egn/channel_plan.hpp"

namespace raman {

ChannelPlan uniform_plan(int count, double spacing, double bandwidth, double power_w,
                         const std::string& format_id) {
  ChannelPlan plan;
  plan.channels.reserve(count);
  const double mid = 0.5 * (count - 1);
  for (int i = 0; i < count; ++i) {
    Channel c;
    c.index = i + 1;
    c.center_freq = (i - mid) * spacing;
    c.bandwidth = bandwidth;
    c.launch_power = power_w;
    c.format_id = format_id;
    plan.channels.push_back(c);
  }
  return plan;
}

}  // namespace raman
