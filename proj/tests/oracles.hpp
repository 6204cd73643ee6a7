#pragma once

// Test-only reference implementations. These transcribe the link-function
// and kernel expressions directly, with their own quadrature-node solver and
// their own doubling loop, so the library's evaluation path is cross-checked
// by structurally independent code. Profile access is shared (the quantized
// accessor is part of the kernel's numerical definition).

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "raman_egn/link.hpp"

namespace oracle {

using cdouble = std::complex<double>;

// Nodes/weights on [0, 1] by Newton iteration on the Legendre recurrence.
inline void gauleg01(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double z1, pp;
    do {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      z1 = z;
      z = z1 - p1 / pp;
    } while (std::abs(z - z1) > 1e-15);
    x[i] = 0.5 * (1.0 - z);
    x[n - 1 - i] = 0.5 * (1.0 + z);
    w[i] = w[n - 1 - i] = 1.0 / ((1.0 - z * z) * pp * pp);
  }
}

// rho(s, z, f); the test wires this to the library's profile accessor.
using RhoFn = std::function<double(int, double, double)>;

inline cdouble mu_direct(const raman::Span& span, int s, const RhoFn& rho, double f1, double f2,
                         double f, int order) {
  const double pi = M_PI;
  const double k =
      4.0 * pi * pi * (f1 - f) * (f2 - f) * (span.beta2 + pi * span.beta3 * (f1 + f2));
  const double f3q = static_cast<double>(llround((f1 + f2 - f) / 1e6)) * 1e6;
  std::vector<double> x, w;
  gauleg01(order, x, w);
  cdouble acc{0.0, 0.0};
  for (int j = 0; j < order; ++j) {
    const double z = span.length * x[j];
    acc += span.length * w[j] * rho(s, z, f3q) *
           cdouble(std::cos(k * z), std::sin(k * z));
  }
  return acc;
}

inline cdouble mu_adaptive(const raman::Span& span, int s, const RhoFn& rho, double f1, double f2,
                           double f, int start_order, int max_order, double rel_tol) {
  cdouble prev = mu_direct(span, s, rho, f1, f2, f, start_order);
  for (int order = 2 * start_order; order <= max_order; order *= 2) {
    const cdouble cur = mu_direct(span, s, rho, f1, f2, f, order);
    if (std::abs(cur - prev) <= rel_tol * std::abs(cur)) return cur;
    prev = cur;
  }
  return prev;
}

// g_s(f) * rho_s(L_s, f) per span; compensating amplifiers return 1.
using GainRhoFn = std::function<double(int, double)>;

// Straight-line transcription of the heterogeneous-span link function:
// coherent span sum with inter-span dispersion phases and sqrt(g rho)
// prefactors at the three source frequencies and the observation frequency.
inline cdouble link_function_direct(const std::vector<raman::Span>& spans, const RhoFn& rho,
                                    const GainRhoFn& grp, double f1, double f2, double f,
                                    int start_order = 64, int max_order = 4096,
                                    double rel_tol = 1e-6) {
  const double pi = M_PI;
  const double f3 = f1 + f2 - f;
  cdouble total{0.0, 0.0};
  for (size_t s = 0; s < spans.size(); ++s) {
    double acc2 = 0.0, acc3 = 0.0;
    for (size_t q = 0; q < s; ++q) {
      acc2 += spans[q].beta2 * spans[q].length;
      acc3 += spans[q].beta3 * spans[q].length;
    }
    const double phase =
        4.0 * pi * pi * (f1 - f) * (f2 - f) * (acc2 + pi * (f1 + f2) * acc3);
    const cdouble mu = mu_adaptive(spans[s], static_cast<int>(s), rho, f1, f2, f, start_order,
                                   max_order, rel_tol);
    double pre = 1.0;
    for (size_t q = 0; q < s; ++q)
      pre *= std::sqrt(grp(static_cast<int>(q), f1)) *
             std::sqrt(grp(static_cast<int>(q), f3)) *
             std::sqrt(grp(static_cast<int>(q), f2));
    double post = 1.0;
    for (size_t q = s; q < spans.size(); ++q)
      post *= std::sqrt(grp(static_cast<int>(q), f));
    total += spans[s].gamma * mu * cdouble(std::cos(phase), std::sin(phase)) * pre * post;
  }
  return total;
}

}  // namespace oracle
