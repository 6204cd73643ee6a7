#include "raman_egn/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "raman_egn/units.hpp"

namespace raman {

using nlohmann::json;

double Config::kSpeedOfLightOverLambda() const { return kSpeedOfLight / reference_wavelength; }

namespace {

FreqTable table_from_json(const json& j, double fscale, double vscale) {
  std::vector<double> freqs, values;
  for (const auto& row : j) {
    freqs.push_back(row.at(0).get<double>() * fscale);
    values.push_back(row.at(1).get<double>() * vscale);
  }
  return FreqTable(std::move(freqs), std::move(values));
}

json table_to_json(const FreqTable& t) {
  json rows = json::array();
  for (size_t i = 0; i < t.freqs().size(); ++i)
    rows.push_back({t.freqs()[i], t.values()[i]});
  return rows;
}

Channel parse_channel(const json& j) {
  Channel c;
  if (j.contains("center_hz")) {
    c.center_freq = j.at("center_hz").get<double>();
    c.bandwidth = j.at("bandwidth_hz").get<double>();
    c.launch_power = j.at("power_w").get<double>();
  } else {
    c.center_freq = j.at("center_ghz").get<double>() * 1e9;
    c.bandwidth = j.at("bandwidth_ghz").get<double>() * 1e9;
    c.launch_power = j.contains("power_w") ? j.at("power_w").get<double>()
                                           : dbm_to_watt(j.at("power_dbm").get<double>());
  }
  c.format_id = j.at("format").get<std::string>();
  return c;
}

ChannelPlan parse_channels(const json& j, double rolloff) {
  ChannelPlan plan;
  if (j.is_array()) {
    for (const auto& cj : j) plan.channels.push_back(parse_channel(cj));
  } else {
    // Uniform grid shorthand.
    const int count = j.at("count").get<int>();
    const double spacing = j.at("spacing_ghz").get<double>() * 1e9;
    double bw;
    if (j.contains("bandwidth_ghz")) {
      bw = j.at("bandwidth_ghz").get<double>() * 1e9;
    } else {
      bw = j.at("symbol_rate_gbd").get<double>() * 1e9 * (1.0 + rolloff);
    }
    const double power =
        j.contains("power_w") ? j.at("power_w").get<double>() : dbm_to_watt(j.at("power_dbm").get<double>());
    plan = uniform_plan(count, spacing, bw, power, j.at("format").get<std::string>());
  }
  for (size_t i = 0; i < plan.channels.size(); ++i)
    plan.channels[i].index = static_cast<int>(i) + 1;
  return plan;
}

Span parse_span(const json& j, double lambda) {
  Span s;
  const bool normalized = j.contains("length_m");
  s.length = normalized ? j.at("length_m").get<double>() : j.at("length_km").get<double>() * 1e3;

  if (normalized) {
    if (j.at("alpha_np_per_m").is_array()) {
      s.attenuation.table = table_from_json(j.at("alpha_np_per_m"), 1.0, 1.0);
    } else {
      s.attenuation.flat = j.at("alpha_np_per_m").get<double>();
    }
    s.beta2 = j.at("beta2_s2_per_m").get<double>();
    s.beta3 = j.at("beta3_s3_per_m").get<double>();
    s.gamma = j.at("gamma_per_w_m").get<double>();
    s.raman_slope = j.at("raman_slope_per_w_m_hz").get<double>();
  } else {
    const auto& loss = j.at("loss_db_per_km");
    if (loss.is_array()) {
      s.attenuation.table = table_from_json(loss, 1e9, std::log(10.0) / 10.0 / 1000.0);
    } else {
      s.attenuation.flat = attenuation_np_per_m(loss.get<double>());
    }
    if (j.contains("beta2_ps2_per_km")) {
      s.beta2 = j.at("beta2_ps2_per_km").get<double>() * 1e-27;
      s.beta3 = j.value("beta3_ps3_per_km", 0.0) * 1e-39;
    } else {
      const double d = ps_nm_km_to_si(j.at("dispersion_ps_nm_km").get<double>());
      const double slope = ps_nm2_km_to_si(j.value("dispersion_slope_ps_nm2_km", 0.0));
      std::tie(s.beta2, s.beta3) = dispersion_params(d, slope, lambda);
    }
    s.gamma = per_w_km_to_si(j.at("gamma_per_w_km").get<double>());
    s.raman_slope = per_w_km_thz_to_si(j.value("raman_slope_per_w_km_thz", 0.0));
  }

  if (j.contains("gain") && j.at("gain").is_string()) {
    if (j.at("gain").get<std::string>() != "compensate")
      throw std::invalid_argument("span gain: expected a number, a table or \"compensate\"");
    s.amp_gain.mode = GainMode::Compensate;
  } else if (j.contains("gain_linear")) {
    if (j.at("gain_linear").is_array()) {
      s.amp_gain.mode = GainMode::Table;
      s.amp_gain.table = table_from_json(j.at("gain_linear"), 1.0, 1.0);
    } else {
      s.amp_gain.mode = GainMode::Scalar;
      s.amp_gain.scalar = j.at("gain_linear").get<double>();
    }
  } else if (j.contains("gain_table_db")) {
    s.amp_gain.mode = GainMode::Table;
    auto t = table_from_json(j.at("gain_table_db"), 1e9, 1.0);
    std::vector<double> lin(t.values().size());
    for (size_t i = 0; i < lin.size(); ++i) lin[i] = db_to_linear(t.values()[i]);
    s.amp_gain.table = FreqTable(t.freqs(), std::move(lin));
  } else if (j.contains("gain_db")) {
    s.amp_gain.mode = GainMode::Scalar;
    s.amp_gain.scalar = db_to_linear(j.at("gain_db").get<double>());
  } else {
    s.amp_gain.mode = GainMode::Scalar;
    s.amp_gain.scalar = 1.0;
  }
  return s;
}

srs::ProfileKind parse_profile(const std::string& name) {
  if (name == "flat") return srs::ProfileKind::Flat;
  if (name == "simplified") return srs::ProfileKind::SimplifiedSrs;
  if (name == "general") return srs::ProfileKind::GeneralSrs;
  if (name == "ode") return srs::ProfileKind::OdeGrid;
  throw std::invalid_argument("run.profile: unknown profile '" + name + "'");
}

std::string profile_name(srs::ProfileKind k) {
  switch (k) {
    case srs::ProfileKind::Flat: return "flat";
    case srs::ProfileKind::SimplifiedSrs: return "simplified";
    case srs::ProfileKind::GeneralSrs: return "general";
    case srs::ProfileKind::OdeGrid: return "ode";
  }
  return "?";
}

void parse_run(const json& j, RunOptions& run) {
  if (j.contains("profile")) run.profile = parse_profile(j.at("profile").get<std::string>());
  run.seed = j.value("seed", run.seed);
  run.tol_db = j.value("tol_db", run.tol_db);
  run.mc_batch_log2 = j.value("mc_batch_log2", run.mc_batch_log2);
  run.mc_cap_log2 = j.value("mc_cap_log2", run.mc_cap_log2);
  run.mc_fixed_log2 = j.value("mc_fixed_log2", run.mc_fixed_log2);
  run.hyperbolic_d = j.value("hyperbolic_d", run.hyperbolic_d);
  run.gn_only = j.value("gn_only", run.gn_only);
  if (j.contains("mu_kernel")) {
    const std::string k = j.at("mu_kernel").get<std::string>();
    if (k != "table" && k != "exact")
      throw std::invalid_argument("run.mu_kernel: expected 'table' or 'exact'");
    run.mu_exact_kernel = (k == "exact");
  }
  run.mu_order = j.value("mu_order", run.mu_order);
  run.mu_cap = j.value("mu_cap", run.mu_cap);
  run.mu_tol = j.value("mu_tol", run.mu_tol);
  run.symbols = j.value("symbols", run.symbols);
  run.phi_max = j.value("phi_max", run.phi_max);
  run.rolloff = j.value("rolloff", run.rolloff);
  run.guard = j.value("guard", run.guard);
  run.discard = j.value("discard", run.discard);
  run.ode_step = j.value("ode_step_m", run.ode_step);
  run.ode_exact_ratio = j.value("ode_exact_ratio", run.ode_exact_ratio);
  run.threads = j.value("threads", run.threads);
}

}  // namespace

Config parse_config_text(const std::string& text) {
  const json j = json::parse(text);
  Config cfg;
  if (j.contains("reference_wavelength_m")) {
    cfg.reference_wavelength = j.at("reference_wavelength_m").get<double>();
  } else if (j.contains("reference_wavelength_nm")) {
    cfg.reference_wavelength = j.at("reference_wavelength_nm").get<double>() * 1e-9;
  }
  if (j.contains("run")) parse_run(j.at("run"), cfg.run);
  if (j.contains("formats")) {
    for (const auto& [name, fj] : j.at("formats").items()) {
      if (fj.contains("points")) {
        std::vector<std::complex<double>> pts;
        for (const auto& p : fj.at("points"))
          pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        cfg.formats.add(ModulationFormat::from_constellation(name, std::move(pts)));
      } else {
        const auto& mj = fj.at("moments");
        cfg.formats.add(ModulationFormat::from_moments(
            name, Moments{mj.at("m2").get<double>(), mj.at("m4").get<double>(),
                          mj.at("m6").get<double>()}));
      }
    }
  }
  cfg.plan = parse_channels(j.at("channels"), cfg.run.rolloff);
  for (const auto& sj : j.at("spans")) cfg.link.spans.push_back(parse_span(sj, cfg.reference_wavelength));
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string emit_normalized(const Config& config) {
  json j;
  j["reference_wavelength_m"] = config.reference_wavelength;

  json channels = json::array();
  for (const auto& c : config.plan.channels) {
    json cj;
    cj["center_hz"] = c.center_freq;
    cj["bandwidth_hz"] = c.bandwidth;
    cj["power_w"] = c.launch_power;
    cj["format"] = c.format_id;
    channels.push_back(cj);
  }
  j["channels"] = channels;

  json spans = json::array();
  for (const auto& s : config.link.spans) {
    json sj;
    sj["length_m"] = s.length;
    if (s.attenuation.is_flat()) {
      sj["alpha_np_per_m"] = s.attenuation.flat;
    } else {
      sj["alpha_np_per_m"] = table_to_json(*s.attenuation.table);
    }
    sj["beta2_s2_per_m"] = s.beta2;
    sj["beta3_s3_per_m"] = s.beta3;
    sj["gamma_per_w_m"] = s.gamma;
    sj["raman_slope_per_w_m_hz"] = s.raman_slope;
    switch (s.amp_gain.mode) {
      case GainMode::Compensate: sj["gain"] = "compensate"; break;
      case GainMode::Scalar: sj["gain_linear"] = s.amp_gain.scalar; break;
      case GainMode::Table: sj["gain_linear"] = table_to_json(*s.amp_gain.table); break;
    }
    spans.push_back(sj);
  }
  j["spans"] = spans;

  json formats = json::object();
  for (const auto& name : config.formats.names()) {
    const auto& fmt = config.formats.get(name);
    json fj;
    if (fmt.has_constellation()) {
      json pts = json::array();
      for (const auto& p : fmt.points()) pts.push_back({p.real(), p.imag()});
      fj["points"] = pts;
    } else {
      const Moments m = fmt.moments();
      fj["moments"] = {{"m2", m.m2}, {"m4", m.m4}, {"m6", m.m6}};
    }
    formats[name] = fj;
  }
  j["formats"] = formats;

  json run;
  run["profile"] = profile_name(config.run.profile);
  run["seed"] = config.run.seed;
  run["tol_db"] = config.run.tol_db;
  run["mc_batch_log2"] = config.run.mc_batch_log2;
  run["mc_cap_log2"] = config.run.mc_cap_log2;
  run["mc_fixed_log2"] = config.run.mc_fixed_log2;
  run["hyperbolic_d"] = config.run.hyperbolic_d;
  run["gn_only"] = config.run.gn_only;
  run["mu_kernel"] = config.run.mu_exact_kernel ? "exact" : "table";
  run["mu_order"] = config.run.mu_order;
  run["mu_cap"] = config.run.mu_cap;
  run["mu_tol"] = config.run.mu_tol;
  run["symbols"] = config.run.symbols;
  run["phi_max"] = config.run.phi_max;
  run["rolloff"] = config.run.rolloff;
  run["guard"] = config.run.guard;
  run["discard"] = config.run.discard;
  run["ode_step_m"] = config.run.ode_step;
  run["ode_exact_ratio"] = config.run.ode_exact_ratio;
  run["threads"] = config.run.threads;
  j["run"] = run;

  return j.dump(2) + "\n";
}

ValidationResult validate(Config& config) {
  ValidationResult res;
  auto fail = [&](std::string where, std::string message) {
    res.violations.push_back({std::move(where), std::move(message)});
  };

  auto& channels = config.plan.channels;
  if (channels.empty()) fail("channels", "plan has no channels");
  std::stable_sort(channels.begin(), channels.end(),
                   [](const Channel& a, const Channel& b) { return a.center_freq < b.center_freq; });
  for (size_t i = 0; i < channels.size(); ++i) {
    channels[i].index = static_cast<int>(i) + 1;
    const auto& c = channels[i];
    const std::string where = "channel " + std::to_string(c.index);
    if (!(c.bandwidth > 0.0)) fail(where, "bandwidth must be > 0");
    if (c.launch_power < 0.0) fail(where, "launch power must be >= 0");
    if (!config.formats.contains(c.format_id))
      fail(where, "unknown format '" + c.format_id + "'");
    if (i > 0) {
      const auto& prev = channels[i - 1];
      if (prev.hi() > c.lo())
        fail(where, "overlaps channel " + std::to_string(prev.index));
    }
  }

  if (config.link.spans.empty()) fail("link", "needs at least one span");
  const double lo = channels.empty() ? 0.0 : config.plan.band_lo();
  const double hi = channels.empty() ? 0.0 : config.plan.band_hi();
  for (size_t i = 0; i < config.link.spans.size(); ++i) {
    const auto& s = config.link.spans[i];
    const std::string where = "span " + std::to_string(i + 1);
    if (!(s.length > 0.0)) fail(where, "length must be > 0");
    if (s.gamma < 0.0) fail(where, "gamma must be >= 0");
    if (s.raman_slope < 0.0) fail(where, "raman slope must be >= 0");
    if (s.attenuation.is_flat()) {
      if (!(s.attenuation.flat > 0.0)) fail(where, "attenuation must be > 0");
    } else {
      for (double v : s.attenuation.table->values())
        if (!(v > 0.0)) {
          fail(where, "tabulated attenuation must be > 0 everywhere");
          break;
        }
      if (!channels.empty() && !s.attenuation.table->covers(lo, hi))
        res.warnings.push_back(where + ": attenuation table clamped outside its domain");
    }
    switch (s.amp_gain.mode) {
      case GainMode::Scalar:
        if (!(s.amp_gain.scalar > 0.0)) fail(where, "gain must be > 0");
        break;
      case GainMode::Table: {
        for (double v : s.amp_gain.table->values())
          if (!(v > 0.0)) {
            fail(where, "tabulated gain must be > 0 everywhere");
            break;
          }
        if (!channels.empty() && !s.amp_gain.table->covers(lo, hi))
          fail(where, "gain table does not cover the occupied band");
        break;
      }
      case GainMode::Compensate: break;
    }
  }

  if (!(config.reference_wavelength > 0.0))
    fail("reference_wavelength", "must be > 0");
  return res;
}

std::string ValidationResult::summary() const {
  std::string out;
  for (const auto& v : violations) out += v.where + ": " + v.message + "\n";
  for (const auto& w : warnings) out += "warning: " + w + "\n";
  return out;
}

}  // namespace raman
