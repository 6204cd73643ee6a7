#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "raman_egn/channel_plan.hpp"
#include "raman_egn/link.hpp"
#include "raman_egn/modulation.hpp"
#include "raman_egn/srs.hpp"

// Per-channel nonlinear-interference power: link function, span kernel,
// phase mismatch, triplet enumeration/classification, the four interference
// integrals, and their Monte-Carlo evaluation.

namespace raman::egn {

using cdouble = std::complex<double>;

enum class TripletClass { Sci, X1, X2, X3, X4, M0, M1M2, M3 };
enum class ClassGroup { Sci, Xci, Mci };

ClassGroup class_group(TripletClass c);
std::string class_name(TripletClass c);

struct Triplet {
  int k1 = 0, k2 = 0, k3 = 0;  // 1-based channel indices
  double omega = 0.0;          // combination frequency nu1 + nu2 - nu3
  double bhat = 0.0;           // B1 + B2 + B3
  TripletClass cls = TripletClass::Sci;
};

// Exhaustive scan of all index triplets whose mixing products can fall
// inside the observed channel; deterministic lexicographic order, boundary
// ties included.
std::vector<Triplet> enumerate_triplets(const ChannelPlan& plan, int coi);

// Total and disjoint over all index combinations. Patterns reachable only
// on zero-guard plans (boundary ties) are folded onto the nearest class by
// the k1<->k2 pairing symmetry of the underlying sum.
TripletClass classify_triplet(int k1, int k2, int k3, int coi);

// Quadratic-mixing phase rotation accumulated over z inside one span.
double phase_mismatch(double f1, double f2, double f, const Span& span, double z);

struct MuOptions {
  bool exact_kernel = false;  // sqrt-ratio kernel over all four frequencies
  int start_order = 64;
  int max_order = 1024;
  double rel_tol = 1e-6;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(cdouble last, cdouble previous, int order)
      : std::runtime_error("span kernel quadrature did not converge at order " +
                           std::to_string(order)),
        last_estimate(last),
        previous_estimate(previous),
        order(order) {}
  cdouble last_estimate;
  cdouble previous_estimate;
  int order;
};

// Precomputed per-link state shared by every kernel evaluation: accumulated
// dispersion sums, quadrature node ladders with profile parameters, and the
// quantized rho memo behind the gain/profile prefactors.
class LinkFunctionContext {
 public:
  LinkFunctionContext(const ChannelPlan& plan, const Link& link,
                      std::vector<std::shared_ptr<srs::PowerProfile>> profiles,
                      MuOptions options = {});

  int span_count() const { return static_cast<int>(spans_.size()); }
  const Span& span(int s) const { return *spans_[s].span; }
  const MuOptions& options() const { return mu_options_; }

  // Profile access with the (1 m, 1 MHz) quantization used everywhere inside
  // this module.
  double rho_q(int s, double z, double f) const;
  // Per-span amplifier-times-profile carryover g(f) rho(L, f); exactly 1 for
  // compensating amplifiers.
  double gain_rho_product(int s, double f) const;

  // Kernel of one span: quadrature of the power profile against the phase
  // rotation, adaptively doubled.
  cdouble mu_span(int s, double f1, double f2, double f) const;

  // Coherent sum over spans with inter-span dispersion phases and
  // gain/profile prefactors.
  cdouble link_function(double f1, double f2, double f) const;

  // Closed-form path for N identical, fully compensated spans.
  cdouble link_function_identical(double f1, double f2, double f, int n_spans) const;

 private:
  struct NodeLadder {
    int order = 0;
    std::vector<double> z;  // quadrature nodes
    std::vector<double> w;  // weights scaled by span length
    // Affine profile parameters ln rho(z, f) = a + b f, when available.
    bool affine = false;
    std::vector<double> a;
    std::vector<double> b;
  };
  struct SpanState {
    const Span* span = nullptr;
    std::shared_ptr<srs::CachedProfile> cached;
    std::shared_ptr<srs::PowerProfile> profile;
    bool compensating = false;
    double acc_beta2_before = 0.0;  // sum of beta2 L over earlier spans
    double acc_beta3_before = 0.0;
    std::vector<NodeLadder> ladders;
  };

  cdouble mu_eval(const SpanState& st, const NodeLadder& ladder, double k, double f1, double f2,
                  double f3, double f) const;

  std::vector<SpanState> spans_;
  MuOptions mu_options_;
};

enum class TermKind { D, E, F, G };

int term_dims(TermKind kind);

// Table integrand at one physical sample point (channel-offset coordinates,
// kind-specific dimension). Out-of-support points return 0.
double integrand(TermKind kind, const Triplet& t, int coi, const ChannelPlan& plan,
                 const double* x, const LinkFunctionContext& ctx);

struct McOptions {
  uint64_t seed = 1;
  double tol_db = 0.05;
  int batch_log2 = 14;
  int cap_log2 = 24;
  int fixed_log2 = 0;        // > 0: fixed sample budget, no adaptive stop
  bool hyperbolic_d = false; // importance-sampled detunings for the D term
};

struct McResult {
  double value = 0.0;
  double half_width_db = 0.0;  // last observed doubling change
  uint64_t samples = 0;
  bool converged = false;
};

// Uniform-sampling Monte-Carlo estimate of one term: batches accumulated in
// fixed order, stopping after two consecutive doublings move the estimate by
// less than tol_db. Deterministic given (seed, coi, triplet index, term).
McResult mc_integrate(TermKind kind, const Triplet& t, int triplet_index, int coi,
                      const ChannelPlan& plan, const LinkFunctionContext& ctx,
                      const McOptions& mc);

struct ClassContribution {
  double sigma2 = 0.0;
  uint64_t samples = 0;
};

struct ChannelNli {
  int channel = 0;
  double freq = 0.0;        // Hz
  double sigma2 = 0.0;      // W
  double eta = 0.0;         // 1/W^2
  bool eta_uniform = true;  // eta = sigma2 / P^3 with a common launch power
  double sci = 0.0;
  double xci = 0.0;
  double mci = 0.0;
  uint64_t samples = 0;
  bool converged = true;
  double max_half_width_db = 0.0;
};

struct NliOptions {
  McOptions mc;
  MuOptions mu;
  bool gn_only = false;  // drop every correction term
  int threads = 0;       // 0: RAMAN_EGN_THREADS or hardware default
};

ChannelNli nli_power(const ChannelPlan& plan, const FormatRegistry& formats,
                     const LinkFunctionContext& ctx, int coi, const NliOptions& options);

std::vector<ChannelNli> nli_all(const ChannelPlan& plan, const FormatRegistry& formats,
                                const LinkFunctionContext& ctx, const NliOptions& options,
                                const std::vector<int>& channels = {});

}  // namespace raman::egn
