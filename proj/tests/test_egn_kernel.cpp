#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "oracles.hpp"
#include "raman_egn/egn.hpp"
#include "raman_egn/srs.hpp"
#include "raman_egn/units.hpp"

using namespace raman;
using namespace raman::egn;
using cd = std::complex<double>;

namespace {

Span make_span(double length_km, double loss_db_km, double gamma_w_km, double beta2_ps2_km,
               GainMode gain_mode = GainMode::Compensate, double gain_db = 0.0) {
  Span s;
  s.length = length_km * 1e3;
  s.attenuation.flat = attenuation_np_per_m(loss_db_km);
  s.gamma = per_w_km_to_si(gamma_w_km);
  s.beta2 = beta2_ps2_km * 1e-27;
  s.beta3 = 0.0;
  s.raman_slope = 0.0;
  s.amp_gain.mode = gain_mode;
  s.amp_gain.scalar = db_to_linear(gain_db);
  return s;
}

struct KernelFixture {
  ChannelPlan plan;
  Link link;
  std::vector<std::shared_ptr<srs::PowerProfile>> profiles;

  KernelFixture(std::vector<Span> spans, int channels = 5, double spacing_ghz = 10.001,
                double bw_ghz = 10.0, double cr_w_km_thz = 0.0) {
    plan = uniform_plan(channels, spacing_ghz * 1e9, bw_ghz * 1e9, dbm_to_watt(-1.0), "qpsk");
    for (auto& s : spans) s.raman_slope = per_w_km_thz_to_si(cr_w_km_thz);
    link.spans = std::move(spans);
    profiles = srs::build_link_profiles(plan, link, srs::ProfileKind::SimplifiedSrs, {});
  }

  LinkFunctionContext ctx(MuOptions mu = {}) const {
    return LinkFunctionContext(plan, link, profiles, mu);
  }
};

}  // namespace

TEST_CASE("phase mismatch") {
  Span s = make_span(100.0, 0.2, 1.2, -21.68);
  CHECK(phase_mismatch(1e10, 2e10, 1e10, s, 5e4) == 0.0);
  CHECK(phase_mismatch(1e10, 2e10, 0.0, s, 0.0) == 0.0);
  const double expect = 4.0 * kPi * kPi * 1e10 * 2e10 * (-21.68e-27) * 1e5;
  CHECK(phase_mismatch(1e10, 2e10, 0.0, s, 1e5) == doctest::Approx(expect).epsilon(1e-14));
  // beta3 shifts the effective quadratic coefficient.
  s.beta3 = 0.1e-39;
  const double expect3 =
      4.0 * kPi * kPi * 1e10 * 2e10 * (-21.68e-27 + kPi * 0.1e-39 * 3e10) * 1e5;
  CHECK(phase_mismatch(1e10, 2e10, 0.0, s, 1e5) == doctest::Approx(expect3).epsilon(1e-14));
}

TEST_CASE("span kernel quadrature") {
  SUBCASE("unit profile, zero phase gives the span length") {
    Span s = make_span(80.0, 0.2, 1.2, 0.0);
    s.attenuation.flat = 0.0;
    KernelFixture fx({s});
    const cd mu = fx.ctx().mu_span(0, 1e9, 2e9, 3e9);
    CHECK(mu.real() == doctest::Approx(8e4).epsilon(1e-12));
    CHECK(mu.imag() == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  }

  SUBCASE("plain loss, zero phase gives the effective length") {
    Span s = make_span(100.0, 0.2, 1.2, 0.0);
    KernelFixture fx({s});
    const cd mu = fx.ctx().mu_span(0, 1e9, 2e9, 3e9);
    const double leff = srs::effective_length(1e5, s.attenuation.flat);
    CHECK(mu.real() == doctest::Approx(leff).epsilon(1e-10));
  }

  SUBCASE("flat loss against the analytic kernel") {
    Span s = make_span(100.0, 0.2, 1.2, -21.68);
    KernelFixture fx({s});
    auto ctx = fx.ctx(MuOptions{false, 64, 2048, 1e-8});
    const double alpha = s.attenuation.flat;
    for (double f1 : {1e9, 8e9, 2.3e10}) {
      for (double f2 : {-3e9, 5e9, 4.1e10}) {
        const double f = 0.0;
        const double k = 4.0 * kPi * kPi * f1 * f2 * s.beta2;
        const cd denom(alpha, -k);
        const cd expect = (1.0 - std::exp(-denom * s.length)) / denom;
        const cd got = ctx.mu_span(0, f1, f2, f);
        CHECK(std::abs(got - expect) <= 1e-8 * std::abs(expect));
      }
    }
  }

  SUBCASE("table and sqrt-ratio kernels coincide on a flat-loss tilt profile") {
    Span s = make_span(100.0, 0.2, 1.2, -21.68);
    KernelFixture fx({s}, 5, 10.001, 10.0, 448.0);
    auto table_ctx = fx.ctx();
    auto exact_ctx = fx.ctx(MuOptions{true, 64, 1024, 1e-6});
    // On-lattice frequencies make the two kernels algebraically identical
    // for a log-affine profile.
    for (double f1 : {-2.0002e10, 1e9, 1.4e10}) {
      for (double f2 : {-1.3e10, 0.0, 2.0002e10}) {
        const cd a = table_ctx.mu_span(0, f1, f2, 2e9);
        const cd b = exact_ctx.mu_span(0, f1, f2, 2e9);
        CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
      }
    }
  }

  SUBCASE("non-convergence raises a diagnostic error") {
    Span s = make_span(120.0, 0.2, 1.2, -21.68);
    KernelFixture fx({s}, 5, 40.04, 40.004);
    auto ctx = fx.ctx(MuOptions{false, 64, 128, 1e-6});
    CHECK_THROWS_AS(ctx.mu_span(0, -9e10, -9e10, 9e10), QuadratureError);
    try {
      ctx.mu_span(0, -9e10, -9e10, 9e10);
    } catch (const QuadratureError& e) {
      CHECK(e.order == 128);
      CHECK(std::abs(e.last_estimate - e.previous_estimate) >
            1e-6 * std::abs(e.last_estimate));
    }
  }
}

TEST_CASE("link function") {
  SUBCASE("single compensated span is gamma times the kernel") {
    Span s = make_span(100.0, 0.2, 1.2, -21.68);
    KernelFixture fx({s});
    auto ctx = fx.ctx();
    const cd mu = ctx.mu_span(0, 1.2e10, -7e9, 2e9);
    const cd y = ctx.link_function(1.2e10, -7e9, 2e9);
    CHECK(std::abs(y - s.gamma * mu) <= 1e-14 * std::abs(y));
  }

  SUBCASE("identical transparent spans add coherently at the matched point") {
    Span s = make_span(80.0, 0.2, 1.2, -21.68);
    KernelFixture fx({s, s, s, s});
    auto ctx = fx.ctx();
    const double f1 = 5e9;  // f1 == f removes every inter-span phase
    const cd mu = ctx.mu_span(0, f1, -7e9, f1);
    const cd y = ctx.link_function(f1, -7e9, f1);
    CHECK(std::abs(y - 4.0 * s.gamma * mu) <= 1e-12 * std::abs(y));
  }

  SUBCASE("heterogeneous spans match the direct transcription") {
    std::vector<Span> spans = {
        make_span(80.0, 0.2, 1.2, -21.68, GainMode::Scalar, 20.0),
        make_span(100.0, 0.2, 1.2, -21.68, GainMode::Scalar, 20.0),
        make_span(120.0, 0.2, 1.2, -21.68, GainMode::Scalar, 20.0),
    };
    KernelFixture fx(spans, 5, 40.04, 40.004, 2.8);
    auto ctx = fx.ctx(MuOptions{false, 64, 4096, 1e-6});

    oracle::RhoFn rho = [&](int s, double z, double f) { return ctx.rho_q(s, z, f); };
    oracle::GainRhoFn grp = [&](int s, double f) {
      return 100.0 * ctx.rho_q(s, fx.link.spans[s].length, f);
    };

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> band(-1.0011e11, 1.0011e11);
    for (int trial = 0; trial < 60; ++trial) {
      const double f1 = band(rng), f2 = band(rng), f = band(rng);
      const cd impl = ctx.link_function(f1, f2, f);
      const cd ref = oracle::link_function_direct(fx.link.spans, rho, grp, f1, f2, f);
      CHECK(std::abs(impl - ref) <= 1e-9 * std::abs(ref));
    }
  }
}

TEST_CASE("kernel on a sampled-grid profile") {
  // The solver-backed profile takes the generic (non-affine) kernel path;
  // on a flat-loss plan it must agree with the closed-form profile.
  Span s = make_span(100.0, 0.2, 1.2, -21.68);
  s.raman_slope = per_w_km_thz_to_si(200.0);
  auto plan = uniform_plan(5, 10.001e9, 1e10, dbm_to_watt(-1.0), "qpsk");
  Link link{{s}};
  auto simplified = srs::build_link_profiles(plan, link, srs::ProfileKind::SimplifiedSrs, {});
  auto ode = srs::build_link_profiles(plan, link, srs::ProfileKind::OdeGrid, {});
  LinkFunctionContext ctx_s(plan, link, simplified, {});
  LinkFunctionContext ctx_o(plan, link, ode, {});
  // Mixing products on channel centers: nearest-channel lookup is exact and
  // only the z interpolation and solver-vs-closed-form gap remain.
  const double s1 = -1.0001e10, s2 = 2.0002e10;  // f3 = ch4 center at f = 0
  {
    const cd a = ctx_s.mu_span(0, s1, s2, 0.0);
    const cd b = ctx_o.mu_span(0, s1, s2, 0.0);
    CHECK(std::abs(a - b) <= 3e-3 * std::abs(a));
  }
  // Off-center products quantize to the nearest channel; under this tilt the
  // profile step between channels bounds the kernel difference.
  {
    const cd a = ctx_s.mu_span(0, -1.5e10, -4e9, 1e9);
    const cd b = ctx_o.mu_span(0, -1.5e10, -4e9, 1e9);
    CHECK(std::abs(a - b) <= 0.1 * std::abs(a));
  }
}

TEST_CASE("identical-span closed form") {
  Span s = make_span(80.0, 0.2, 1.2, -21.68);

  SUBCASE("matched point gives the span count") {
    KernelFixture fx({s, s, s});
    auto ctx = fx.ctx();
    const cd mu = ctx.mu_span(0, 5e9, -7e9, 5e9);
    const cd y = ctx.link_function_identical(5e9, -7e9, 5e9, 3);
    CHECK(std::abs(y - 3.0 * s.gamma * mu) <= 1e-12 * std::abs(y));
  }

  SUBCASE("single span reduces to gamma mu") {
    KernelFixture fx({s});
    auto ctx = fx.ctx();
    const cd mu = ctx.mu_span(0, 9e9, -1.7e10, 3e9);
    const cd y = ctx.link_function_identical(9e9, -1.7e10, 3e9, 1);
    CHECK(std::abs(y - s.gamma * mu) <= 1e-14 * std::abs(y));
  }

  SUBCASE("agrees with the explicit link for one, two and four spans") {
    for (int n : {1, 2, 4}) {
      KernelFixture fx(std::vector<Span>(n, s));
      auto ctx = fx.ctx();
      std::mt19937_64 rng(99 + n);
      std::uniform_real_distribution<double> band(-2.5e10, 2.5e10);
      for (int trial = 0; trial < 100; ++trial) {
        const double f1 = band(rng), f2 = band(rng), f = band(rng);
        const cd direct = ctx.link_function(f1, f2, f);
        const cd closed = ctx.link_function_identical(f1, f2, f, n);
        CHECK(std::abs(direct - closed) <= 1e-9 * std::abs(direct));
      }
    }
  }

  SUBCASE("coherence factor never exceeds the span count") {
    KernelFixture fx({s, s, s, s, s});
    auto ctx = fx.ctx();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> band(-2.5e10, 2.5e10);
    for (int trial = 0; trial < 500; ++trial) {
      const double f1 = band(rng), f2 = band(rng), f = band(rng);
      const cd mu = ctx.mu_span(0, f1, f2, f);
      const cd y = ctx.link_function_identical(f1, f2, f, 5);
      CHECK(std::abs(y) <= 5.0 * s.gamma * std::abs(mu) * (1.0 + 1e-12));
    }
    const cd mu = ctx.mu_span(0, 4e9, 1e10, 4e9);
    const cd y = ctx.link_function_identical(4e9, 1e10, 4e9, 5);
    CHECK(std::abs(y) == doctest::Approx(5.0 * s.gamma * std::abs(mu)).epsilon(1e-12));
  }
}
