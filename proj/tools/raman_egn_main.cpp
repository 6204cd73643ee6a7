// raman-egn: per-channel nonlinear-interference prediction for WDM links
// under joint Kerr and stimulated-Raman effects, with a split-step
// simulator as the built-in reference.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "raman_egn/config.hpp"
#include "raman_egn/egn.hpp"
#include "raman_egn/report.hpp"
#include "raman_egn/srs.hpp"
#include "raman_egn/ssfm.hpp"
#include "raman_egn/units.hpp"

namespace {

int g_verbosity = 1;  // 0 quiet, 1 normal, 2 verbose

void info(const std::string& msg) {
  if (g_verbosity >= 1) std::cerr << msg << "\n";
}
void debug(const std::string& msg) {
  if (g_verbosity >= 2) std::cerr << msg << "\n";
}

raman::Config load_and_validate(const std::string& path) {
  raman::Config cfg = raman::load_config(path);
  auto result = raman::validate(cfg);
  for (const auto& w : result.warnings) info("warning: " + w);
  if (!result.ok())
    throw std::runtime_error("invalid configuration:\n" + result.summary());
  return cfg;
}

raman::egn::NliOptions nli_options(const raman::Config& cfg) {
  raman::egn::NliOptions opt;
  opt.mc.seed = cfg.run.seed;
  opt.mc.tol_db = cfg.run.tol_db;
  opt.mc.batch_log2 = cfg.run.mc_batch_log2;
  opt.mc.cap_log2 = cfg.run.mc_cap_log2;
  opt.mc.fixed_log2 = cfg.run.mc_fixed_log2;
  opt.mc.hyperbolic_d = cfg.run.hyperbolic_d;
  opt.mu.exact_kernel = cfg.run.mu_exact_kernel;
  opt.mu.start_order = cfg.run.mu_order;
  opt.mu.max_order = cfg.run.mu_cap;
  opt.mu.rel_tol = cfg.run.mu_tol;
  opt.gn_only = cfg.run.gn_only;
  opt.threads = cfg.run.threads;
  return opt;
}

raman::srs::OdeOptions ode_options(const raman::Config& cfg) {
  raman::srs::OdeOptions ode;
  ode.step = cfg.run.ode_step;
  ode.exact_photon_ratio = cfg.run.ode_exact_ratio;
  ode.reference_freq = cfg.reference_freq();
  return ode;
}

std::vector<raman::egn::ChannelNli> run_model(const raman::Config& cfg,
                                              const std::vector<int>& channels) {
  auto profiles =
      raman::srs::build_link_profiles(cfg.plan, cfg.link, cfg.run.profile, ode_options(cfg));
  const auto opt = nli_options(cfg);
  raman::egn::LinkFunctionContext ctx(cfg.plan, cfg.link, profiles, opt.mu);
  return raman::egn::nli_all(cfg.plan, cfg.formats, ctx, opt, channels);
}

std::vector<raman::ssfm::SsfmChannelResult> run_simulation(const raman::Config& cfg) {
  raman::ssfm::SsfmOptions opt;
  opt.waveform.n_symbols = cfg.run.symbols;
  opt.waveform.rolloff = cfg.run.rolloff;
  opt.waveform.seed = cfg.run.seed;
  opt.waveform.guard = cfg.run.guard;
  opt.phi_max = cfg.run.phi_max;
  opt.discard = cfg.run.discard;
  opt.profile = cfg.run.profile;
  opt.ode = ode_options(cfg);
  return raman::ssfm::run_ssfm(cfg.plan, cfg.link, cfg.formats, opt);
}

std::vector<int> parse_channel_arg(const std::string& arg, int count) {
  if (arg == "all" || arg.empty()) return {};
  const int k = std::stoi(arg);
  if (k < 1 || k > count) throw std::runtime_error("channel index out of range: " + arg);
  return {k};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NLI prediction for Raman-affected WDM links"};
  app.require_subcommand(1);

  std::string config_path, channel_arg = "all", out_path, json_path;
  uint64_t seed = 0;
  bool seed_set = false;
  double tol_db = 0.0;
  bool tol_set = false;
  std::string mode, mu_kernel, profile_arg;
  bool quiet = false, verbose = false;
  int symbols_arg = 0;
  double phi_max_arg = 0.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_flag("--quiet", quiet, "errors only");
    sub->add_flag("--verbose", verbose, "extra progress output");
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--seed", seed, "override run.seed")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->add_option("--profile", profile_arg, "power profile: flat|simplified|general|ode");
    sub->add_option("--out", out_path, "output CSV path");
  };

  auto* nli = app.add_subcommand("nli", "analytical per-channel NLI");
  add_common(nli);
  nli->add_option("--channel", channel_arg, "channel index or 'all'");
  nli->add_option("--tol-db", tol_db, "MC convergence tolerance in dB")
      ->each([&](const std::string&) { tol_set = true; });
  nli->add_option("--mode", mode, "egn|gn");
  nli->add_option("--mu-kernel", mu_kernel, "table|exact");
  nli->add_option("--json", json_path, "also write a JSON report");

  auto* sim = app.add_subcommand("ssfm", "split-step reference simulation");
  add_common(sim);
  sim->add_option("--symbols", symbols_arg, "symbols per channel (power of two)");
  sim->add_option("--phi-max", phi_max_arg, "peak nonlinear phase per step [rad]");

  auto* cmp = app.add_subcommand("compare", "model vs simulation on one config");
  add_common(cmp);
  cmp->add_option("--symbols", symbols_arg, "symbols per channel (power of two)");
  cmp->add_option("--phi-max", phi_max_arg, "peak nonlinear phase per step [rad]");

  auto* prof = app.add_subcommand("profile", "evaluate the power profile");
  add_common(prof);

  CLI11_PARSE(app, argc, argv);
  if (quiet) g_verbosity = 0;
  if (verbose) g_verbosity = 2;

  try {
    raman::Config cfg = load_and_validate(config_path);
    if (seed_set) cfg.run.seed = seed;
    if (tol_set) cfg.run.tol_db = tol_db;
    if (!mode.empty()) {
      if (mode != "egn" && mode != "gn") throw std::runtime_error("--mode must be egn or gn");
      cfg.run.gn_only = (mode == "gn");
    }
    if (!mu_kernel.empty()) {
      if (mu_kernel != "table" && mu_kernel != "exact")
        throw std::runtime_error("--mu-kernel must be table or exact");
      cfg.run.mu_exact_kernel = (mu_kernel == "exact");
    }
    if (!profile_arg.empty()) {
      raman::Config tmp;  // reuse the parser's profile names
      tmp.run = cfg.run;
      if (profile_arg == "flat") cfg.run.profile = raman::srs::ProfileKind::Flat;
      else if (profile_arg == "simplified") cfg.run.profile = raman::srs::ProfileKind::SimplifiedSrs;
      else if (profile_arg == "general") cfg.run.profile = raman::srs::ProfileKind::GeneralSrs;
      else if (profile_arg == "ode") cfg.run.profile = raman::srs::ProfileKind::OdeGrid;
      else throw std::runtime_error("--profile must be flat|simplified|general|ode");
    }
    if (symbols_arg > 0) cfg.run.symbols = symbols_arg;
    if (phi_max_arg > 0.0) cfg.run.phi_max = phi_max_arg;

    if (nli->parsed()) {
      const auto channels = parse_channel_arg(channel_arg, cfg.plan.count());
      const auto rows = run_model(cfg, channels);
      const std::string csv = raman::nli_csv(rows);
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        raman::write_file(out_path, csv);
        info("wrote " + out_path);
      }
      if (!json_path.empty()) raman::write_file(json_path, raman::nli_json(rows, cfg.run.seed));
      bool converged = true;
      for (const auto& r : rows) converged = converged && r.converged;
      if (!converged) {
        info("warning: at least one Monte-Carlo term did not converge");
        return 2;
      }
      return 0;
    }

    if (sim->parsed()) {
      const auto rows = run_simulation(cfg);
      for (const auto& r : rows)
        if (r.min_observations < 100)
          info("warning: channel " + std::to_string(r.channel) + " saw a constellation point only " +
               std::to_string(r.min_observations) + " times");
      const std::string csv = raman::ssfm_csv(rows);
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        raman::write_file(out_path, csv);
        info("wrote " + out_path);
      }
      return 0;
    }

    if (cmp->parsed()) {
      debug("running analytical model");
      const auto model = run_model(cfg, {});
      debug("running split-step reference");
      const auto sim_rows = run_simulation(cfg);
      const auto rep = raman::compare_results(model, sim_rows);
      const std::string csv = raman::compare_csv(rep);
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        raman::write_file(out_path, csv);
        info("wrote " + out_path);
      }
      char buf[128];
      std::snprintf(buf, sizeof(buf), "mean |delta| = %.3f dB, max |delta| = %.3f dB",
                    rep.mean_abs_delta_db, rep.max_abs_delta_db);
      info(buf);
      bool converged = true;
      for (const auto& r : model) converged = converged && r.converged;
      return converged ? 0 : 2;
    }

    if (prof->parsed()) {
      auto profiles =
          raman::srs::build_link_profiles(cfg.plan, cfg.link, cfg.run.profile, ode_options(cfg));
      std::string csv;
      if (cfg.run.profile == raman::srs::ProfileKind::OdeGrid) {
        csv = "z_m,channel_index,power_w\n";
        double z0 = 0.0;
        for (size_t s = 0; s < profiles.size(); ++s) {
          const auto* ode = dynamic_cast<const raman::srs::OdeGridProfile*>(profiles[s].get());
          for (size_t iz = 0; iz < ode->z_grid().size(); ++iz) {
            for (size_t ch = 0; ch < ode->channel_freqs().size(); ++ch) {
              char buf[96];
              std::snprintf(buf, sizeof(buf), "%.17g,%zu,%.17g\n", z0 + ode->z_grid()[iz],
                            ch + 1, ode->power(iz, ch));
              csv += buf;
            }
          }
          z0 += cfg.link.spans[s].length;
        }
      } else {
        csv = "span,z_m,freq_hz,rho\n";
        for (size_t s = 0; s < profiles.size(); ++s) {
          const double len = cfg.link.spans[s].length;
          for (int iz = 0; iz <= 100; ++iz) {
            const double z = len * iz / 100.0;
            for (const auto& c : cfg.plan.channels) {
              char buf[128];
              std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", s + 1, z,
                            c.center_freq, profiles[s]->rho(z, c.center_freq));
              csv += buf;
            }
          }
        }
      }
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        raman::write_file(out_path, csv);
        info("wrote " + out_path);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
