#include "raman_egn/link.hpp"

#include <algorithm>

namespace raman {

FreqTable::FreqTable(std::vector<double> freqs, std::vector<double> values)
    : freqs_(std::move(freqs)), values_(std::move(values)) {
  if (freqs_.size() != values_.size() || freqs_.size() < 2)
    throw std::invalid_argument("FreqTable: need >= 2 matching (freq, value) pairs");
  if (!std::is_sorted(freqs_.begin(), freqs_.end()))
    throw std::invalid_argument("FreqTable: frequencies must be ascending");
}

double FreqTable::operator()(double f) const {
  if (f <= freqs_.front()) {
    if (f < freqs_.front()) clamped_ = true;
    return values_.front();
  }
  if (f >= freqs_.back()) {
    if (f > freqs_.back()) clamped_ = true;
    return values_.back();
  }
  const auto it = std::upper_bound(freqs_.begin(), freqs_.end(), f);
  const size_t i = static_cast<size_t>(it - freqs_.begin());
  const double t = (f - freqs_[i - 1]) / (freqs_[i] - freqs_[i - 1]);
  return values_[i - 1] + t * (values_[i] - values_[i - 1]);
}

}  // namespace raman
