#include <doctest.h>

#include <nlohmann/json.hpp>

#include "raman_egn/report.hpp"

using namespace raman;

TEST_CASE("csv emission") {
  SUBCASE("empty report is header-only") {
    CHECK(nli_csv({}) == "channel,freq_hz,eta_db,sigma2_w2,sci_db,xci_db,mci_db,samples,converged\n");
    CHECK(ssfm_csv({}) == "channel,freq_hz,snr_db,eta_db\n");
  }

  SUBCASE("stable column order and dB rounding") {
    egn::ChannelNli r;
    r.channel = 3;
    r.freq = -2.0002e10;
    r.eta = 1234.5;
    r.sigma2 = 6.19e-10;
    r.sci = 100.0e-12;
    r.xci = 0.0;
    r.mci = 5e-12;
    r.samples = 65536;
    r.converged = true;
    const std::string csv = nli_csv({r});
    CHECK(csv.find("3,-20002000000,30.915,") != std::string::npos);
    CHECK(csv.find(",-inf,") != std::string::npos);  // empty class bucket
    CHECK(csv.find(",65536,1\n") != std::string::npos);
  }
}

TEST_CASE("json report round-trips structurally") {
  egn::ChannelNli r;
  r.channel = 1;
  r.freq = 0.0;
  r.eta = 880.25;
  r.sigma2 = 4.41e-10;
  r.sci = 1e-10;
  r.xci = 3e-10;
  r.mci = 0.41e-10;
  r.samples = 1 << 20;
  r.converged = false;
  const std::string text = nli_json({r}, 42);
  const auto j = nlohmann::json::parse(text);
  CHECK(j.at("seed") == 42);
  CHECK(j.at("rows").size() == 1);
  CHECK(j.at("rows")[0].at("eta_per_w2") == 880.25);
  CHECK(j.at("rows")[0].at("converged") == false);
  CHECK(nlohmann::json::parse(nli_json({r}, 42)).dump(2) + "\n" == text);
}

TEST_CASE("comparison statistics") {
  std::vector<egn::ChannelNli> model(2);
  model[0].channel = 1;
  model[0].eta = 1000.0;
  model[1].channel = 2;
  model[1].eta = 2000.0;
  std::vector<ssfm::SsfmChannelResult> sim(2);
  sim[0].channel = 1;
  sim[0].eta = 1000.0;
  sim[1].channel = 2;
  sim[1].eta = 1000.0;
  const auto rep = compare_results(model, sim);
  CHECK(rep.rows[0].delta_db == doctest::Approx(0.0));
  CHECK(rep.rows[1].delta_db == doctest::Approx(10.0 * std::log10(2.0)).epsilon(1e-12));
  CHECK(rep.max_abs_delta_db == doctest::Approx(3.0103).epsilon(1e-4));
  CHECK(rep.mean_abs_delta_db == doctest::Approx(0.5 * 3.0103).epsilon(1e-4));
  CHECK_THROWS(compare_results(model, {}));
}
