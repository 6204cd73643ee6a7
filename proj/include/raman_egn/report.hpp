#pragma once

#include <string>
#include <vector>

#include "raman_egn/egn.hpp"
#include "raman_egn/ssfm.hpp"

// Result emission: stable column order, dB values to three decimals, raw SI
// values at full precision.

namespace raman {

std::string nli_csv(const std::vector<egn::ChannelNli>& rows);
std::string nli_json(const std::vector<egn::ChannelNli>& rows, uint64_t seed);

std::string ssfm_csv(const std::vector<ssfm::SsfmChannelResult>& rows);

struct CompareRow {
  int channel = 0;
  double freq = 0.0;
  double eta_model = 0.0;  // 1/W^2
  double eta_ssfm = 0.0;
  double delta_db = 0.0;   // model minus simulation
};

struct CompareReport {
  std::vector<CompareRow> rows;
  double mean_abs_delta_db = 0.0;
  double max_abs_delta_db = 0.0;
};

CompareReport compare_results(const std::vector<egn::ChannelNli>& model,
                              const std::vector<ssfm::SsfmChannelResult>& sim);
std::string compare_csv(const CompareReport& report);

void write_file(const std::string& path, const std::string& content);

double to_db_w2(double eta);  // 10 log10(eta * 1 W^2); -inf guarded

}  // namespace raman
