#include "raman_egn/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace raman {

namespace {

std::string full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string db3(double v_db) {
  if (!std::isfinite(v_db)) return v_db > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v_db);
  return buf;
}

}  // namespace

double to_db_w2(double eta) {
  return eta > 0.0 ? 10.0 * std::log10(eta) : -INFINITY;
}

std::string nli_csv(const std::vector<egn::ChannelNli>& rows) {
  std::string out = "channel,freq_hz,eta_db,sigma2_w2,sci_db,xci_db,mci_db,samples,converged\n";
  for (const auto& r : rows) {
    out += std::to_string(r.channel) + "," + full(r.freq) + "," + db3(to_db_w2(r.eta)) + "," +
           full(r.sigma2) + "," + db3(to_db_w2(r.sci)) + "," + db3(to_db_w2(r.xci)) + "," +
           db3(to_db_w2(r.mci)) + "," + std::to_string(r.samples) + "," +
           (r.converged ? "1" : "0") + "\n";
  }
  return out;
}

std::string nli_json(const std::vector<egn::ChannelNli>& rows, uint64_t seed) {
  nlohmann::json j;
  j["seed"] = seed;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json rj;
    rj["channel"] = r.channel;
    rj["freq_hz"] = r.freq;
    rj["eta_per_w2"] = r.eta;
    rj["sigma2_w2"] = r.sigma2;
    rj["sci_w2"] = r.sci;
    rj["xci_w2"] = r.xci;
    rj["mci_w2"] = r.mci;
    rj["samples"] = r.samples;
    rj["converged"] = r.converged;
    arr.push_back(rj);
  }
  j["rows"] = arr;
  return j.dump(2) + "\n";
}

std::string ssfm_csv(const std::vector<ssfm::SsfmChannelResult>& rows) {
  std::string out = "channel,freq_hz,snr_db,eta_db\n";
  for (const auto& r : rows) {
    out += std::to_string(r.channel) + "," + full(r.freq) + "," + db3(r.snr_db) + "," +
           db3(to_db_w2(r.eta)) + "\n";
  }
  return out;
}

CompareReport compare_results(const std::vector<egn::ChannelNli>& model,
                              const std::vector<ssfm::SsfmChannelResult>& sim) {
  if (model.size() != sim.size())
    throw std::invalid_argument("compare_results: row count mismatch");
  CompareReport rep;
  double sum = 0.0;
  for (size_t i = 0; i < model.size(); ++i) {
    CompareRow row;
    row.channel = model[i].channel;
    row.freq = model[i].freq;
    row.eta_model = model[i].eta;
    row.eta_ssfm = sim[i].eta;
    row.delta_db = to_db_w2(row.eta_model) - to_db_w2(row.eta_ssfm);
    sum += std::abs(row.delta_db);
    rep.max_abs_delta_db = std::max(rep.max_abs_delta_db, std::abs(row.delta_db));
    rep.rows.push_back(row);
  }
  rep.mean_abs_delta_db = model.empty() ? 0.0 : sum / model.size();
  return rep;
}

std::string compare_csv(const CompareReport& report) {
  std::string out = "channel,freq_hz,eta_model_db,eta_ssfm_db,delta_db\n";
  for (const auto& r : report.rows) {
    out += std::to_string(r.channel) + "," + full(r.freq) + "," + db3(to_db_w2(r.eta_model)) +
           "," + db3(to_db_w2(r.eta_ssfm)) + "," + db3(r.delta_db) + "\n";
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace raman
