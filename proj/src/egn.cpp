#include "raman_egn/egn.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "raman_egn/numerics.hpp"
#include "raman_egn/units.hpp"

namespace raman::egn {

namespace {

constexpr double kFourPiSq = 4.0 * kPi * kPi;

double quantize_freq(double f) { return static_cast<double>(llround(f / 1e6)) * 1e6; }

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RAMAN_EGN_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs tasks 0..n-1 on `threads` workers; completion order is irrelevant
// because results land in task-indexed slots.
template <typename Fn>
void run_tasks(size_t n, int threads, Fn&& fn) {
  threads = std::min<size_t>(std::max(threads, 1), n == 0 ? 1 : n);
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

ClassGroup class_group(TripletClass c) {
  switch (c) {
    case TripletClass::Sci: return ClassGroup::Sci;
    case TripletClass::X1:
    case TripletClass::X2:
    case TripletClass::X3:
    case TripletClass::X4: return ClassGroup::Xci;
    default: return ClassGroup::Mci;
  }
}

std::string class_name(TripletClass c) {
  switch (c) {
    case TripletClass::Sci: return "SCI";
    case TripletClass::X1: return "X1";
    case TripletClass::X2: return "X2";
    case TripletClass::X3: return "X3";
    case TripletClass::X4: return "X4";
    case TripletClass::M0: return "M0";
    case TripletClass::M1M2: return "M1M2";
    case TripletClass::M3: return "M3";
  }
  return "?";
}

TripletClass classify_triplet(int k1, int k2, int k3, int coi) {
  if (k1 == k3) {
    if (k1 == k2) return k1 == coi ? TripletClass::Sci : TripletClass::X4;
    if (k2 == coi) return TripletClass::X1;
    if (k1 == coi) return TripletClass::X2;
    return TripletClass::M1M2;
  }
  if (k2 == k3) {
    // Mirror patterns under the k1<->k2 symmetry of the triple sum.
    if (k1 == coi) return TripletClass::X1;
    if (k2 == coi) return TripletClass::X2;
    return TripletClass::M1M2;
  }
  if (k1 == k2) return k1 == coi ? TripletClass::X3 : TripletClass::M3;
  return TripletClass::M0;
}

std::vector<Triplet> enumerate_triplets(const ChannelPlan& plan, int coi) {
  const int m = plan.count();
  const Channel& c = plan.at(coi);
  std::vector<Triplet> out;
  for (int k1 = 1; k1 <= m; ++k1) {
    for (int k2 = 1; k2 <= m; ++k2) {
      for (int k3 = 1; k3 <= m; ++k3) {
        const Channel& c1 = plan.at(k1);
        const Channel& c2 = plan.at(k2);
        const Channel& c3 = plan.at(k3);
        const double omega = c1.center_freq + c2.center_freq - c3.center_freq;
        const double bhat = c1.bandwidth + c2.bandwidth + c3.bandwidth;
        if (std::abs(omega - c.center_freq) <= 0.5 * std::abs(bhat - c.bandwidth)) {
          Triplet t;
          t.k1 = k1;
          t.k2 = k2;
          t.k3 = k3;
          t.omega = omega;
          t.bhat = bhat;
          t.cls = classify_triplet(k1, k2, k3, coi);
          out.push_back(t);
        }
      }
    }
  }
  return out;
}

double phase_mismatch(double f1, double f2, double f, const Span& span, double z) {
  return kFourPiSq * (f1 - f) * (f2 - f) * (span.beta2 + kPi * span.beta3 * (f1 + f2)) * z;
}

LinkFunctionContext::LinkFunctionContext(const ChannelPlan& plan, const Link& link,
                                         std::vector<std::shared_ptr<srs::PowerProfile>> profiles,
                                         MuOptions options)
    : mu_options_(options) {
  (void)plan;
  if (profiles.size() != link.spans.size())
    throw std::invalid_argument("LinkFunctionContext: one profile per span required");
  if (mu_options_.start_order < 2 || mu_options_.max_order < 2 * mu_options_.start_order)
    throw std::invalid_argument("LinkFunctionContext: bad quadrature orders");

  double acc2 = 0.0, acc3 = 0.0;
  spans_.reserve(link.spans.size());
  for (size_t s = 0; s < link.spans.size(); ++s) {
    SpanState st;
    st.span = &link.spans[s];
    st.profile = profiles[s];
    st.cached = std::make_shared<srs::CachedProfile>(profiles[s]);
    st.compensating = st.span->amp_gain.mode == GainMode::Compensate;
    st.acc_beta2_before = acc2;
    st.acc_beta3_before = acc3;
    acc2 += st.span->beta2 * st.span->length;
    acc3 += st.span->beta3 * st.span->length;

    const double len = st.span->length;
    for (int order = mu_options_.start_order; order <= mu_options_.max_order; order *= 2) {
      const auto& rule = gauss_legendre(order);
      NodeLadder ladder;
      ladder.order = order;
      ladder.z.resize(order);
      ladder.w.resize(order);
      for (int j = 0; j < order; ++j) {
        ladder.z[j] = len * rule.nodes[j];
        ladder.w[j] = len * rule.weights[j];
      }
      double a, b;
      ladder.affine = st.profile->log_rho_affine(ladder.z[0], &a, &b);
      if (ladder.affine) {
        ladder.a.resize(order);
        ladder.b.resize(order);
        for (int j = 0; j < order; ++j)
          st.profile->log_rho_affine(ladder.z[j], &ladder.a[j], &ladder.b[j]);
      }
      st.ladders.push_back(std::move(ladder));
    }
    spans_.push_back(std::move(st));
  }
}

double LinkFunctionContext::rho_q(int s, double z, double f) const {
  return spans_[s].cached->rho_q(z, f);
}

double LinkFunctionContext::gain_rho_product(int s, double f) const {
  const SpanState& st = spans_[s];
  if (st.compensating) return 1.0;
  return st.span->amp_gain.value(f) * st.cached->rho_q(st.span->length, f);
}

cdouble LinkFunctionContext::mu_eval(const SpanState& st, const NodeLadder& ladder, double k,
                                     double f1, double f2, double f3, double f) const {
  const int n = ladder.order;
  double re = 0.0, im = 0.0;
  if (!mu_options_.exact_kernel) {
    const double f3q = quantize_freq(f3);
    if (ladder.affine) {
      for (int j = 0; j < n; ++j) {
        const double rho = std::exp(ladder.a[j] + ladder.b[j] * f3q);
        const double ph = k * ladder.z[j];
        const double wr = ladder.w[j] * rho;
        re += wr * std::cos(ph);
        im += wr * std::sin(ph);
      }
    } else {
      for (int j = 0; j < n; ++j) {
        const double rho = st.cached->rho_q(ladder.z[j], f3q);
        const double ph = k * ladder.z[j];
        const double wr = ladder.w[j] * rho;
        re += wr * std::cos(ph);
        im += wr * std::sin(ph);
      }
    }
    return {re, im};
  }
  // sqrt-ratio kernel over the four interacting frequencies
  const double f1q = quantize_freq(f1);
  const double f2q = quantize_freq(f2);
  const double f3q = quantize_freq(f3);
  const double fq = quantize_freq(f);
  if (ladder.affine) {
    for (int j = 0; j < n; ++j) {
      const double logr = 0.5 * (2.0 * ladder.a[j] + ladder.b[j] * (f1q + f2q + f3q - fq));
      const double rho = std::exp(logr);
      const double ph = k * ladder.z[j];
      const double wr = ladder.w[j] * rho;
      re += wr * std::cos(ph);
      im += wr * std::sin(ph);
    }
  } else {
    for (int j = 0; j < n; ++j) {
      const double rho = std::sqrt(st.cached->rho_q(ladder.z[j], f1q) *
                                   st.cached->rho_q(ladder.z[j], f2q) *
                                   st.cached->rho_q(ladder.z[j], f3q) /
                                   st.cached->rho_q(ladder.z[j], fq));
      const double ph = k * ladder.z[j];
      const double wr = ladder.w[j] * rho;
      re += wr * std::cos(ph);
      im += wr * std::sin(ph);
    }
  }
  return {re, im};
}

cdouble LinkFunctionContext::mu_span(int s, double f1, double f2, double f) const {
  const SpanState& st = spans_[s];
  const double k = kFourPiSq * (f1 - f) * (f2 - f) *
                   (st.span->beta2 + kPi * st.span->beta3 * (f1 + f2));
  const double f3 = f1 + f2 - f;
  cdouble prev = mu_eval(st, st.ladders[0], k, f1, f2, f3, f);
  for (size_t i = 1; i < st.ladders.size(); ++i) {
    const cdouble cur = mu_eval(st, st.ladders[i], k, f1, f2, f3, f);
    if (std::abs(cur - prev) <= mu_options_.rel_tol * std::abs(cur)) return cur;
    if (i + 1 == st.ladders.size())
      throw QuadratureError(cur, prev, st.ladders.back().order);
    prev = cur;
  }
  return prev;
}

cdouble LinkFunctionContext::link_function(double f1, double f2, double f) const {
  const int n = span_count();
  const double f3 = f1 + f2 - f;
  thread_local std::vector<double> suffix;
  suffix.assign(n + 1, 1.0);
  for (int s = n - 1; s >= 0; --s)
    suffix[s] = suffix[s + 1] * std::sqrt(gain_rho_product(s, f));

  cdouble total{0.0, 0.0};
  double prefix = 1.0;  // product of sqrt(g rho) at f1, f2, f3 over earlier spans
  const double d12 = (f1 - f) * (f2 - f);
  for (int s = 0; s < n; ++s) {
    const SpanState& st = spans_[s];
    const double phase =
        kFourPiSq * d12 * (st.acc_beta2_before + kPi * (f1 + f2) * st.acc_beta3_before);
    total += st.span->gamma * mu_span(s, f1, f2, f) * std::polar(prefix * suffix[s], phase);
    if (s + 1 < n) {
      prefix *= std::sqrt(gain_rho_product(s, f1) * gain_rho_product(s, f3) *
                          gain_rho_product(s, f2));
    }
  }
  return total;
}

cdouble LinkFunctionContext::link_function_identical(double f1, double f2, double f,
                                                     int n_spans) const {
  const SpanState& st = spans_[0];
  const double x = kFourPiSq * (f1 - f) * (f2 - f) * st.span->length *
                   (st.span->beta2 + kPi * st.span->beta3 * (f1 + f2));
  const cdouble mu = mu_span(0, f1, f2, f);
  const double s2 = std::sin(0.5 * x);
  cdouble array_factor;
  if (std::abs(s2) < 1e-12) {
    array_factor = std::polar(static_cast<double>(n_spans), 0.5 * (n_spans - 1) * x);
  } else {
    array_factor = std::polar(std::sin(0.5 * n_spans * x) / s2, 0.5 * (n_spans - 1) * x);
  }
  return st.span->gamma * mu * array_factor;
}

int term_dims(TermKind kind) {
  switch (kind) {
    case TermKind::D: return 3;
    case TermKind::E:
    case TermKind::F: return 4;
    case TermKind::G: return 5;
  }
  return 0;
}

namespace {

struct TermGeometry {
  int dims = 0;
  double lo[5] = {0, 0, 0, 0, 0};
  double width[5] = {0, 0, 0, 0, 0};
  double volume = 1.0;
};

// Coordinate order: f (inside the observed channel), f1, f2, f1', f2'.
TermGeometry term_geometry(TermKind kind, const Triplet& t, int coi, const ChannelPlan& plan) {
  TermGeometry g;
  g.dims = term_dims(kind);
  const Channel& c = plan.at(coi);
  const Channel& c1 = plan.at(t.k1);
  const Channel& c2 = plan.at(t.k2);
  const double b[5] = {c.bandwidth, c1.bandwidth, c2.bandwidth, c1.bandwidth, c2.bandwidth};
  for (int d = 0; d < g.dims; ++d) {
    g.lo[d] = -0.5 * b[d];
    g.width[d] = b[d];
    g.volume *= g.width[d];
  }
  return g;
}

}  // namespace

double integrand(TermKind kind, const Triplet& t, int coi, const ChannelPlan& plan,
                 const double* x, const LinkFunctionContext& ctx) {
  const Channel& c = plan.at(coi);
  const Channel& c1 = plan.at(t.k1);
  const Channel& c2 = plan.at(t.k2);
  const Channel& c3 = plan.at(t.k3);
  const double b1 = c1.bandwidth, b2 = c2.bandwidth, b3 = c3.bandwidth;
  const double delta = t.omega - c.center_freq;  // offset of the mixing product

  const double xf = x[0], x1 = x[1], x2 = x[2];
  const double u3 = x1 + x2 - xf + delta;
  if (std::abs(u3) > 0.5 * b3) return 0.0;

  const double absf = xf + c.center_freq;
  const double absf1 = x1 + c1.center_freq;
  const double absf2 = x2 + c2.center_freq;

  switch (kind) {
    case TermKind::D: {
      const cdouble y = ctx.link_function(absf1, absf2, absf);
      return (16.0 / 27.0) / (b1 * b2 * b3) * std::norm(y);
    }
    case TermKind::E: {
      const double x1p = x[3];
      const double u3p = x1p + x2 - xf + delta;
      if (std::abs(u3p) > 0.5 * b3) return 0.0;
      const cdouble y = ctx.link_function(absf1, absf2, absf);
      const cdouble yp = ctx.link_function(x1p + c1.center_freq, absf2, absf);
      return (80.0 / 81.0) / (b1 * b2 * b3 * b3) * (y * std::conj(yp)).real();
    }
    case TermKind::F: {
      const double x1p = x[3];
      const double w2 = x1 + x2 - x1p;  // second argument offset of the conjugate kernel
      if (std::abs(w2) > 0.5 * b2) return 0.0;
      const cdouble y = ctx.link_function(absf1, absf2, absf);
      const cdouble yp = ctx.link_function(x1p + c1.center_freq, w2 + c2.center_freq, absf);
      return (16.0 / 81.0) / (b1 * b2 * b2 * b3) * (y * std::conj(yp)).real();
    }
    case TermKind::G: {
      const double x1p = x[3], x2p = x[4];
      const double u3p = x1p + x2p - xf + delta;
      if (std::abs(u3p) > 0.5 * b3) return 0.0;
      const cdouble y = ctx.link_function(absf1, absf2, absf);
      const cdouble yp = ctx.link_function(x1p + c1.center_freq, x2p + c2.center_freq, absf);
      return (16.0 / 81.0) / (b1 * b2 * b2 * b3 * b3) * (y * std::conj(yp)).real();
    }
  }
  return 0.0;
}

namespace {

// Normalized mass function for the detuning importance sampler:
// density 1/max(|t|, eps), piecewise-log inverse CDF.
struct LogDensity {
  double lo = 0.0, hi = 0.0, eps = 1.0, mass = 0.0;

  LogDensity(double a, double b) : lo(a), hi(b) {
    eps = std::max(1e-6 * (std::abs(a) + std::abs(b) + (b - a)), 1e-3);
    mass = cdf_raw(hi) - cdf_raw(lo);
  }
  double cdf_raw(double t) const {
    if (t > eps) return 1.0 + std::log(t / eps);
    if (t < -eps) return -1.0 - std::log(-t / eps);
    return t / eps;
  }
  double sample(double u, double* pdf) const {
    const double target = cdf_raw(lo) + u * mass;
    double t;
    if (target >= 1.0) {
      t = eps * std::exp(target - 1.0);
    } else if (target <= -1.0) {
      t = -eps * std::exp(-(target + 1.0));
    } else {
      t = target * eps;
    }
    t = std::clamp(t, lo, hi);
    *pdf = 1.0 / (std::max(std::abs(t), eps) * mass);
    return t;
  }
};

}  // namespace

McResult mc_integrate(TermKind kind, const Triplet& t, int triplet_index, int coi,
                      const ChannelPlan& plan, const LinkFunctionContext& ctx,
                      const McOptions& mc) {
  const TermGeometry geo = term_geometry(kind, t, coi, plan);
  const CounterRng rng(derive_stream(mc.seed, static_cast<uint64_t>(coi),
                                     static_cast<uint64_t>(triplet_index),
                                     static_cast<uint64_t>(kind)));
  const Channel& c = plan.at(coi);
  const Channel& c1 = plan.at(t.k1);
  const Channel& c2 = plan.at(t.k2);
  const bool hyper = mc.hyperbolic_d && kind == TermKind::D;

  double sum = 0.0, comp = 0.0;  // Kahan-compensated accumulator
  auto accumulate = [&](double v) {
    const double y = v - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  };
  uint64_t n = 0;
  auto add_samples = [&](uint64_t upto) {
    double x[5];
    for (; n < upto; ++n) {
      if (!hyper) {
        for (int d = 0; d < geo.dims; ++d)
          x[d] = geo.lo[d] + geo.width[d] * rng.uniform01(n, static_cast<uint32_t>(d));
        accumulate(integrand(kind, t, coi, plan, x, ctx));
      } else {
        // Importance-sampled detunings a = F1 - F, b = F2 - F concentrate
        // samples along the phase-matched axes.
        x[0] = geo.lo[0] + geo.width[0] * rng.uniform01(n, 0);
        const double fshift1 = c1.center_freq - c.center_freq - x[0];
        const double fshift2 = c2.center_freq - c.center_freq - x[0];
        LogDensity da(geo.lo[1] + fshift1, geo.lo[1] + geo.width[1] + fshift1);
        LogDensity db(geo.lo[2] + fshift2, geo.lo[2] + geo.width[2] + fshift2);
        double pa, pb;
        const double a = da.sample(rng.uniform01(n, 1), &pa);
        const double b = db.sample(rng.uniform01(n, 2), &pb);
        x[1] = a - fshift1;
        x[2] = b - fshift2;
        const double w = 1.0 / (pa * pb * geo.width[1] * geo.width[2]);
        accumulate(integrand(kind, t, coi, plan, x, ctx) * w);
      }
    }
  };

  McResult out;
  if (mc.fixed_log2 > 0) {
    const uint64_t total = 1ull << mc.fixed_log2;
    add_samples(total);
    out.value = geo.volume * sum / static_cast<double>(total);
    out.samples = total;
    out.converged = true;
    return out;
  }

  double est_prev = 0.0;
  int good_checks = 0;
  bool have_prev = false;
  for (int stage = mc.batch_log2; stage <= mc.cap_log2; ++stage) {
    add_samples(1ull << stage);
    const double est = geo.volume * sum / static_cast<double>(n);
    if (have_prev) {
      bool ok;
      if (est == 0.0 && est_prev == 0.0) {
        ok = true;
        out.half_width_db = 0.0;
      } else if (est * est_prev > 0.0) {
        const double change = std::abs(10.0 * std::log10(est / est_prev));
        ok = change < mc.tol_db;
        out.half_width_db = change;
      } else {
        ok = false;
        out.half_width_db = INFINITY;
      }
      good_checks = ok ? good_checks + 1 : 0;
      if (good_checks >= 2) {
        out.value = est;
        out.samples = n;
        out.converged = true;
        return out;
      }
    }
    est_prev = est;
    have_prev = true;
  }
  out.value = est_prev;
  out.samples = n;
  out.converged = false;
  return out;
}

ChannelNli nli_power(const ChannelPlan& plan, const FormatRegistry& formats,
                     const LinkFunctionContext& ctx, int coi, const NliOptions& options) {
  auto rows = nli_all(plan, formats, ctx, options, {coi});
  return rows.front();
}

std::vector<ChannelNli> nli_all(const ChannelPlan& plan, const FormatRegistry& formats,
                                const LinkFunctionContext& ctx, const NliOptions& options,
                                const std::vector<int>& channels) {
  std::vector<int> cois = channels;
  if (cois.empty()) {
    cois.resize(plan.count());
    for (int i = 0; i < plan.count(); ++i) cois[i] = i + 1;
  }

  struct Task {
    TermKind kind;
    int coi;
    int triplet_index;
    const Triplet* triplet;
  };
  std::vector<std::vector<Triplet>> triplets(cois.size());
  std::vector<Task> tasks;
  for (size_t ci = 0; ci < cois.size(); ++ci) {
    triplets[ci] = enumerate_triplets(plan, cois[ci]);
    for (size_t ti = 0; ti < triplets[ci].size(); ++ti) {
      const Triplet& t = triplets[ci][ti];
      tasks.push_back({TermKind::D, cois[ci], static_cast<int>(ti), &t});
      if (options.gn_only) continue;
      const double phi1 = formats.get(plan.at(t.k1).format_id).phi();
      const double psi1 = formats.get(plan.at(t.k1).format_id).psi();
      if (t.k1 == t.k3 && phi1 != 0.0)
        tasks.push_back({TermKind::E, cois[ci], static_cast<int>(ti), &t});
      if (t.k1 == t.k2 && phi1 != 0.0)
        tasks.push_back({TermKind::F, cois[ci], static_cast<int>(ti), &t});
      if (t.k1 == t.k2 && t.k2 == t.k3 && psi1 != 0.0)
        tasks.push_back({TermKind::G, cois[ci], static_cast<int>(ti), &t});
    }
  }

  std::vector<McResult> results(tasks.size());
  run_tasks(tasks.size(), resolve_threads(options.threads), [&](size_t i) {
    const Task& task = tasks[i];
    results[i] = mc_integrate(task.kind, *task.triplet, task.triplet_index, task.coi, plan, ctx,
                              options.mc);
  });

  // Uniform launch power?
  bool uniform = true;
  const double p0 = plan.channels.front().launch_power;
  for (const auto& ch : plan.channels)
    if (std::abs(ch.launch_power - p0) > 1e-12 * std::max(p0, ch.launch_power)) uniform = false;

  std::vector<ChannelNli> out(cois.size());
  for (size_t ci = 0; ci < cois.size(); ++ci) {
    ChannelNli row;
    row.channel = cois[ci];
    row.freq = plan.at(cois[ci]).center_freq;
    row.eta_uniform = uniform;

    // Per-triplet term values, assembled in enumeration order.
    std::vector<double> dv(triplets[ci].size(), 0.0), ev(triplets[ci].size(), 0.0),
        fv(triplets[ci].size(), 0.0), gv(triplets[ci].size(), 0.0);
    for (size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].coi != cois[ci]) continue;
      const McResult& r = results[i];
      row.samples += r.samples;
      row.converged = row.converged && r.converged;
      row.max_half_width_db = std::max(row.max_half_width_db,
                                       std::isfinite(r.half_width_db) ? r.half_width_db : 1e9);
      switch (tasks[i].kind) {
        case TermKind::D: dv[tasks[i].triplet_index] = r.value; break;
        case TermKind::E: ev[tasks[i].triplet_index] = r.value; break;
        case TermKind::F: fv[tasks[i].triplet_index] = r.value; break;
        case TermKind::G: gv[tasks[i].triplet_index] = r.value; break;
      }
    }
    for (size_t ti = 0; ti < triplets[ci].size(); ++ti) {
      const Triplet& t = triplets[ci][ti];
      const double p3 = plan.at(t.k1).launch_power * plan.at(t.k2).launch_power *
                        plan.at(t.k3).launch_power;
      const auto& fmt1 = formats.get(plan.at(t.k1).format_id);
      double term = dv[ti];
      if (!options.gn_only) {
        term += fmt1.phi() * (ev[ti] + fv[ti]) + fmt1.psi() * gv[ti];
      }
      const double contribution = p3 * term;
      row.sigma2 += contribution;
      switch (class_group(t.cls)) {
        case ClassGroup::Sci: row.sci += contribution; break;
        case ClassGroup::Xci: row.xci += contribution; break;
        case ClassGroup::Mci: row.mci += contribution; break;
      }
    }
    const double pref = uniform ? p0 : plan.at(cois[ci]).launch_power;
    row.eta = pref > 0.0 ? row.sigma2 / (pref * pref * pref) : 0.0;
    out[ci] = row;
  }
  return out;
}

}  // namespace raman::egn
