#include <doctest.h>

#include <cmath>

#include "raman_egn/egn.hpp"
#include "raman_egn/srs.hpp"
#include "raman_egn/units.hpp"

using namespace raman;
using namespace raman::egn;

namespace {

Span plain_span(double length_km, double loss_db_km, double gamma_w_km, double beta2_ps2_km,
                double cr_w_km_thz = 0.0) {
  Span s;
  s.length = length_km * 1e3;
  s.attenuation.flat = attenuation_np_per_m(loss_db_km);
  s.gamma = per_w_km_to_si(gamma_w_km);
  s.beta2 = beta2_ps2_km * 1e-27;
  s.raman_slope = per_w_km_thz_to_si(cr_w_km_thz);
  s.amp_gain.mode = GainMode::Compensate;
  return s;
}

Channel channel(int index, double center, double bw, double power) {
  Channel c;
  c.index = index;
  c.center_freq = center;
  c.bandwidth = bw;
  c.launch_power = power;
  c.format_id = "qpsk";
  return c;
}

const Triplet* find_triplet(const std::vector<Triplet>& ts, int k1, int k2, int k3) {
  for (const auto& t : ts)
    if (t.k1 == k1 && t.k2 == k2 && t.k3 == k3) return &t;
  return nullptr;
}

}  // namespace

TEST_CASE("constant integrand is integrated exactly in one batch") {
  // Geometry chosen so the third-frequency support never clips: a wide
  // bystander channel catches every mixing product.
  ChannelPlan plan;
  plan.channels = {
      channel(1, -3e10, 1e10, 1e-3),
      channel(2, -2e10, 1e10, 1e-3),
      channel(3, -5e10, 4e10, 1e-3),
      channel(4, 0.0, 1e10, 1e-3),
  };
  Span s;
  s.length = 1e5;
  s.attenuation.flat = 0.0;
  s.gamma = 1.0;
  s.beta2 = 0.0;
  s.amp_gain.mode = GainMode::Scalar;
  s.amp_gain.scalar = 1.0;
  Link link{{s}};
  auto profiles = srs::build_link_profiles(plan, link, srs::ProfileKind::Flat, {});
  LinkFunctionContext ctx(plan, link, profiles, {});

  const auto triplets = enumerate_triplets(plan, 4);
  const Triplet* t = find_triplet(triplets, 1, 2, 3);
  REQUIRE(t != nullptr);
  CHECK(t->cls == TripletClass::M0);

  McOptions mc;
  mc.seed = 5;
  mc.fixed_log2 = 14;
  const McResult r = mc_integrate(TermKind::D, *t, 0, 4, plan, ctx, mc);
  // Constant integrand: (16/27) (gamma mu)^2 / (B1 B2 B3) over the full box.
  const double c = (16.0 / 27.0) * std::pow(1.0 * 1e5, 2.0) / (1e10 * 1e10 * 4e10);
  const double volume = 1e10 * 1e10 * 1e10;
  CHECK(r.converged);
  CHECK(r.samples == (1ull << 14));
  CHECK(r.value == doctest::Approx(c * volume).epsilon(1e-13));
}

TEST_CASE("two-channel main term against a dense tensor grid") {
  auto plan = uniform_plan(2, 10.001e9, 1e10, dbm_to_watt(-1.0), "qpsk");
  Link link{{plain_span(80.0, 0.2, 1.2, -21.68, 448.0)}};
  auto profiles = srs::build_link_profiles(plan, link, srs::ProfileKind::SimplifiedSrs, {});
  LinkFunctionContext ctx(plan, link, profiles, {});

  const auto triplets = enumerate_triplets(plan, 1);
  const Triplet* t = find_triplet(triplets, 1, 2, 2);
  REQUIRE(t != nullptr);

  // Midpoint tensor-grid reference.
  const int n = 64;
  const double b = 1e10;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        const double x[3] = {(-0.5 + (i + 0.5) / n) * b, (-0.5 + (j + 0.5) / n) * b,
                             (-0.5 + (l + 0.5) / n) * b};
        acc += integrand(TermKind::D, *t, 1, plan, x, ctx);
      }
    }
  }
  const double reference = acc * (b / n) * (b / n) * (b / n);

  McOptions mc;
  mc.seed = 17;
  mc.tol_db = 0.02;
  const McResult r = mc_integrate(TermKind::D, *t, 1, 1, plan, ctx, mc);
  CHECK(r.converged);
  CHECK(std::abs(10.0 * std::log10(r.value / reference)) < 0.05);
}

TEST_CASE("importance-sampled detunings agree with uniform sampling") {
  auto plan = uniform_plan(3, 10.001e9, 1e10, dbm_to_watt(-1.0), "qpsk");
  Link link{{plain_span(100.0, 0.2, 1.2, -21.68)}};
  auto profiles = srs::build_link_profiles(plan, link, srs::ProfileKind::SimplifiedSrs, {});
  LinkFunctionContext ctx(plan, link, profiles, {});
  const auto triplets = enumerate_triplets(plan, 2);
  const Triplet* t = find_triplet(triplets, 2, 2, 2);
  REQUIRE(t != nullptr);

  McOptions uniform;
  uniform.seed = 3;
  uniform.tol_db = 0.03;
  McOptions hyper = uniform;
  hyper.hyperbolic_d = true;
  const McResult a = mc_integrate(TermKind::D, *t, 0, 2, plan, ctx, uniform);
  const McResult b = mc_integrate(TermKind::D, *t, 0, 2, plan, ctx, hyper);
  CHECK(a.converged);
  CHECK(b.converged);
  CHECK(std::abs(10.0 * std::log10(a.value / b.value)) < 0.1);
}

TEST_CASE("fourth-order integrand collapses onto the main one at f1' = f1") {
  auto plan = uniform_plan(3, 10.001e9, 1e10, dbm_to_watt(-1.0), "qpsk");
  Link link{{plain_span(100.0, 0.2, 1.2, -21.68)}};
  auto profiles = srs::build_link_profiles(plan, link, srs::ProfileKind::SimplifiedSrs, {});
  LinkFunctionContext ctx(plan, link, profiles, {});
  // k1 == k3 pattern so the fourth-order term applies.
  const auto triplets = enumerate_triplets(plan, 1);
  const Triplet* t = find_triplet(triplets, 2, 1, 2);
  REQUIRE(t != nullptr);

  const double b3 = 1e10;
  const double x[4] = {1.1e9, -2.7e9, 3.9e9, -2.7e9};  // f1' == f1
  const double d = integrand(TermKind::D, *t, 1, plan, x, ctx);
  const double e = integrand(TermKind::E, *t, 1, plan, x, ctx);
  CHECK(d > 0.0);
  CHECK(e == doctest::Approx(d * (80.0 / 81.0) / (16.0 / 27.0) / b3).epsilon(1e-12));
}

TEST_CASE("support indicators zero the integrand outside the band") {
  auto plan = uniform_plan(2, 10.001e9, 1e10, dbm_to_watt(-1.0), "qpsk");
  Link link{{plain_span(100.0, 0.2, 1.2, -21.68)}};
  auto profiles = srs::build_link_profiles(plan, link, srs::ProfileKind::SimplifiedSrs, {});
  LinkFunctionContext ctx(plan, link, profiles, {});
  const auto triplets = enumerate_triplets(plan, 1);
  const Triplet* sci = find_triplet(triplets, 1, 1, 1);
  REQUIRE(sci != nullptr);
  // x1 + x2 - xf far outside the channel.
  const double x[3] = {-4.9e9, 4.9e9, 4.9e9};
  CHECK(integrand(TermKind::D, *sci, 1, plan, x, ctx) == 0.0);
  const double inside[3] = {0.0, 1e9, -1e9};
  CHECK(integrand(TermKind::D, *sci, 1, plan, inside, ctx) > 0.0);
}
