#include "dirac/specfun.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace dirac::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLnSqrt2Pi = 0.91893853320467274178032973640562;

bool is_nonpositive_integer(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

// Stirling series for Re z large enough that 10 terms reach double precision.
cplx ln_gamma_stirling(cplx z) {
  static constexpr std::array<double, 10> kB = {
      1.0 / 12.0,           -1.0 / 360.0,        1.0 / 1260.0,
      -1.0 / 1680.0,        1.0 / 1188.0,        -691.0 / 360360.0,
      1.0 / 156.0,          -3617.0 / 122400.0,  43867.0 / 244188.0,
      -174611.0 / 125400.0};
  const cplx zi = 1.0 / z;
  const cplx zi2 = zi * zi;
  cplx s = 0.0;
  cplx p = zi;
  for (double b : kB) {
    s += b * p;
    p *= zi2;
  }
  return (z - 0.5) * std::log(z) - z + kLnSqrt2Pi + s;
}

}  // namespace

cplx ln_gamma(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("ln_gamma: non-finite argument");
  if (is_nonpositive_integer(z)) throw PoleError("ln_gamma: pole at " + std::to_string(z.real()));
  if (z.imag() == 0.0 && z.real() > 0.0) return std::lgamma(z.real());
  constexpr double kShift = 12.0;
  if (z.real() >= kShift) return ln_gamma_stirling(z);
  // Upward recurrence; each log stays on the principal branch, which keeps
  // the continuation analytic in each half plane.
  cplx acc = 0.0;
  cplx prod = 1.0;
  cplx w = z;
  while (w.real() < kShift) {
    prod *= w;
    if (std::abs(prod) > 1e200 || std::abs(prod) < 1e-200) {
      acc += std::log(prod);
      prod = 1.0;
    }
    w += 1.0;
  }
  // The modulus comes from the product, the phase from the sum of principal args.
  double arg_sum = 0.0;
  for (cplx v = z; v.real() < kShift; v += 1.0) arg_sum += std::arg(v);
  const double ln_mod = acc.real() + std::log(std::abs(prod));
  return ln_gamma_stirling(w) - cplx(ln_mod, arg_sum);
}

double ln_gamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) throw PoleError("ln_gamma: pole");
  return std::lgamma(x);
}

std::vector<double> kummer_poly_coeffs(int n, double c) {
  if (n < 0) throw DomainError("kummer_poly: negative degree");
  if (c <= 0.0 && c == std::floor(c)) throw DomainError("kummer_poly: c is a nonpositive integer");
  std::vector<double> t(static_cast<size_t>(n) + 1);
  t[0] = 1.0;
  for (int j = 0; j < n; ++j) t[j + 1] = t[j] * (-n + j) / ((c + j) * (j + 1));
  return t;
}

double kummer_poly(int n, double c, double z) {
  const auto t = kummer_poly_coeffs(n, c);
  double s = t.back();
  double mag = std::abs(t.back());
  for (int j = n - 1; j >= 0; --j) {
    s = s * z + t[j];
    mag = mag * std::abs(z) + std::abs(t[j]);
  }
  // Heavy cancellation in the monomial form: fall back to the recurrence.
  if (c > 0.0 && mag > 1e4 * std::abs(s)) return kummer_poly_stable(n, c, z);
  return s;
}

double kummer_poly_stable(int n, double c, double x) {
  if (n < 0) throw DomainError("kummer_poly_stable: negative degree");
  if (n == 0) return 1.0;
  if (c <= 0.0) return kummer_poly(n, c, x);
  const double al = c - 1.0;
  double l0 = 1.0;
  double l1 = 1.0 + al - x;
  for (int m = 1; m < n; ++m) {
    const double l2 = ((2 * m + 1 + al - x) * l1 - (m + al) * l0) / (m + 1);
    l0 = l1;
    l1 = l2;
  }
  const double ln_binom = std::lgamma(n + al + 1.0) - std::lgamma(n + 1.0) - std::lgamma(al + 1.0);
  return l1 * std::exp(-ln_binom);
}

bool kummer_taylor(cplx a, cplx c, cplx z, KummerPair& out) {
  cplx t = 1.0;          // terms of 1F1(a, c, z)
  cplx s = a / c;        // terms of (a/c) 1F1(a+1, c+1, z)
  cplx sum_t = 0.0, sum_s = 0.0;
  double max_t = 0.0, max_s = 0.0;
  constexpr int kMaxTerms = 3000;
  for (int n = 0; n < kMaxTerms; ++n) {
    sum_t += t;
    sum_s += s;
    max_t = std::max(max_t, std::abs(t));
    max_s = std::max(max_s, std::abs(s));
    const double nn = static_cast<double>(n);
    const cplx rt = (a + nn) / ((c + nn) * (nn + 1.0)) * z;
    const cplx rs = (a + nn + 1.0) / ((c + nn + 1.0) * (nn + 1.0)) * z;
    t *= rt;
    s *= rs;
    if (t == 0.0 && s == 0.0) break;
    const double scale = std::abs(sum_t) + std::abs(sum_s);
    if (std::abs(rt) < 0.5 && std::abs(rs) < 0.5 &&
        std::abs(t) + std::abs(s) <= 1e-17 * scale)
      break;
    if (n + 1 == kMaxTerms) return false;
  }
  out = {sum_t, sum_s};
  if (!std::isfinite(std::abs(sum_t)) || !std::isfinite(std::abs(sum_s))) return false;
  const double scale = std::abs(sum_t) + std::abs(sum_s);
  return max_t <= kTaylorGrowth * std::abs(sum_t) && std::max(max_t, max_s) <= kTaylorGrowth * scale;
}

bool kummer_asymptotic(cplx a, cplx c, cplx z, cplx& out) {
  const double az = std::abs(z);
  if (az < 1.0) return false;
  const cplx lz = std::log(z);
  const cplx lgc = ln_gamma(c);
  const double sgn = z.imag() >= 0.0 ? 1.0 : -1.0;
  // Leading factors in log space.
  const bool has1 = !is_nonpositive_integer(c - a);
  const bool has2 = !is_nonpositive_integer(a);
  cplx pre1 = 0.0, pre2 = 0.0;
  if (has1) pre1 = std::exp(lgc - ln_gamma(c - a) + cplx(0.0, sgn * kPi) * a - a * lz);
  if (has2) pre2 = std::exp(lgc - ln_gamma(a) + z + (a - c) * lz);
  auto series = [&](cplx p, cplx q, cplx x, double& last) {
    // sum (p)_n (q)_n / n! x^n up to the smallest term
    cplx term = 1.0, sum = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 0; n < 400; ++n) {
      const double m = std::abs(term);
      if (m > prev) break;
      sum += term;
      prev = m;
      if (m <= 1e-18 * std::abs(sum)) break;
      term *= (p + double(n)) * (q + double(n)) / double(n + 1) * x;
      if (term == 0.0) {
        prev = 0.0;
        break;
      }
    }
    last = prev;
    return sum;
  };
  double e1 = 0.0, e2 = 0.0;
  cplx s1 = 0.0, s2 = 0.0;
  if (has1) s1 = series(a, a - c + 1.0, -1.0 / z, e1);
  if (has2) s2 = series(c - a, 1.0 - a, 1.0 / z, e2);
  out = pre1 * s1 + pre2 * s2;
  const double err = std::abs(pre1) * e1 + std::abs(pre2) * e2;
  if (!std::isfinite(std::abs(out))) return false;
  return err <= kAsymptoticTol * std::abs(out);
}

KummerPair kummer_step(cplx a, cplx c, cplx z0, KummerPair w, cplx z1) {
  constexpr double kMaxStep = 2.0;
  cplx zc = z0;
  while (zc != z1) {
    const cplx d = z1 - zc;
    const double lim = std::min(0.5 * std::abs(zc), kMaxStep);
    if (lim <= 0.0) throw DomainError("kummer_step: cannot step from the origin");
    const cplx h = std::abs(d) <= lim ? d : d * (lim / std::abs(d));
    // Local expansion w(zc + t) = sum b_n t^n with scaled terms q_n = b_n h^n:
    // q_{n+2} = [(n + a) h^2 q_n - (n + 1)(n + c - zc) h q_{n+1}] / (zc (n+2)(n+1))
    const cplx inv = 1.0 / zc;
    const cplx u = h * h * inv;
    const cplx v = h * inv;
    const cplx cz = c - zc;
    cplx q0 = w.value, q1 = w.deriv * h;
    cplx sum = q0 + q1;
    cplx dsum = q1;  // sum n q_n
    int n = 0;
    for (;; ++n) {
      const double nn = n;
      const double den = 1.0 / ((nn + 2.0) * (nn + 1.0));
      const cplx q2 = ((nn + a) * u * q0 - ((nn + 1.0) * (nn + cz)) * v * q1) * den;
      sum += q2;
      dsum += (nn + 2.0) * q2;
      q0 = q1;
      q1 = q2;
      if (n > 2 && std::norm(q0) + std::norm(q1) <= 1e-34 * (std::norm(sum) + std::norm(dsum))) break;
      if (n == 400) throw ConvergenceError("kummer_step: local series did not converge");
    }
    w = {sum, dsum / h};
    zc = (h == d) ? z1 : zc + h;
  }
  return w;
}

cplx kummer_complex(cplx a, cplx c, cplx z) {
  if (is_nonpositive_integer(c)) throw DomainError("kummer_complex: c is a nonpositive integer");
  if (z == 0.0) return 1.0;
  KummerPair tp;
  if (kummer_taylor(a, c, z, tp)) return tp.value;
  cplx v;
  if (kummer_asymptotic(a, c, z, v)) return v;
  if (z.real() < 0.0) {
    if (kummer_taylor(c - a, c, -z, tp)) return std::exp(z) * tp.value;
  }
  // Continue from the largest point on the ray where the series is reliable.
  double rs = std::min(std::abs(z), 2.0);
  const cplx dir = z / std::abs(z);
  while (!kummer_taylor(a, c, dir * rs, tp)) {
    rs *= 0.5;
    if (rs < 1e-6) throw ConvergenceError("kummer_complex: no reliable starting point");
  }
  const KummerPair end = kummer_step(a, c, dir * rs, tp, z);
  if (!std::isfinite(std::abs(end.value))) throw ConvergenceError("kummer_complex: overflow");
  return end.value;
}

namespace {

struct SeriesResult {
  cplx sum;
  double max_term;
};

// sum_{m=0}^{n} (-n)_m (b)_m / ((c)_m m!) x^m, with the largest term magnitude.
bool terminating_series(int n, cplx b, cplx c, cplx x, SeriesResult& out) {
  cplx t = 1.0, s = 0.0;
  double mx = 0.0;
  for (int m = 0; m <= n; ++m) {
    s += t;
    mx = std::max(mx, std::abs(t));
    if (m == n) break;
    const cplx den = (c + double(m)) * double(m + 1);
    if (den == 0.0) return false;
    t *= (double(m) - n) * (b + double(m)) / den * x;
  }
  out = {s, mx};
  return std::isfinite(std::abs(s));
}

cplx pochhammer(cplx x, int n) {
  cplx r = 1.0;
  for (int i = 0; i < n; ++i) r *= x + double(i);
  return r;
}

}  // namespace

cplx terminating_2f1(int n, cplx b, cplx c, cplx w) {
  if (n < 0) throw DomainError("terminating_2f1: negative degree");
  if (n == 0 || w == 0.0) return 1.0;
  struct Cand {
    cplx pre;
    SeriesResult r;
    double cancel;
  };
  std::array<Cand, 4> cands{};
  int count = 0;
  SeriesResult r;
  auto push = [&](cplx pre, const SeriesResult& res) {
    const double m = std::abs(res.sum);
    const double cancel = m > 0.0 ? res.max_term / m : std::numeric_limits<double>::infinity();
    cands[count++] = {pre, res, cancel};
  };
  if (terminating_series(n, b, c, w, r)) push(1.0, r);
  // Pfaff: (1-w)^n 2F1(-n, c-b; c; w/(w-1))
  if (w != 1.0 && terminating_series(n, c - b, c, w / (w - 1.0), r))
    push(std::pow(1.0 - w, n), r);
  // 1-w: (c-b)_n/(c)_n 2F1(-n, b; b-c-n+1; 1-w)
  {
    const cplx cc = b - c - double(n) + 1.0;
    const cplx pc = pochhammer(c, n);
    if (pc != 0.0 && terminating_series(n, b, cc, 1.0 - w, r)) push(pochhammer(c - b, n) / pc, r);
  }
  // Reversal: (b)_n/(c)_n (-w)^n 2F1(-n, 1-c-n; 1-b-n; 1/w)
  {
    const cplx pc = pochhammer(c, n);
    if (pc != 0.0 && terminating_series(n, 1.0 - c - double(n), 1.0 - b - double(n), 1.0 / w, r))
      push(pochhammer(b, n) / pc * std::pow(-w, n), r);
  }
  if (count == 0) throw DomainError("terminating_2f1: no valid representation");
  int best = 0;
  for (int i = 1; i < count; ++i)
    if (cands[i].cancel < cands[best].cancel) best = i;
  return cands[best].pre * cands[best].r.sum;
}

cplx gauss_2f1(cplx a, cplx b, cplx c, cplx z) {
  if (is_nonpositive_integer(c)) throw DomainError("gauss_2f1: c is a nonpositive integer");
  if (z == 0.0) return 1.0;
  const bool ta = is_nonpositive_integer(a), tb = is_nonpositive_integer(b);
  if (ta || tb) {
    // Use the lower degree, which is the one that truncates first.
    cplx p = a, q = b;
    if (ta && tb) {
      if (b.real() > a.real()) std::swap(p, q);
    } else if (tb) {
      std::swap(p, q);
    }
    return terminating_2f1(static_cast<int>(-p.real()), q, c, z);
  }
  // Canonical parameter order so that a <-> b gives identical arithmetic.
  if (std::make_pair(b.real(), b.imag()) < std::make_pair(a.real(), a.imag())) std::swap(a, b);
  auto direct = [&](cplx p, cplx q, cplx x) {
    cplx t = 1.0, s = 0.0;
    for (int m = 0; m < 20000; ++m) {
      s += t;
      t *= (p + double(m)) * (q + double(m)) / ((c + double(m)) * double(m + 1)) * x;
      if (std::abs(t) <= 1e-17 * std::abs(s) && m > 2) return s + t;
    }
    throw ConvergenceError("gauss_2f1: series did not converge");
  };
  constexpr double kRadius = 0.9;
  const double az = std::abs(z);
  const cplx zp = z / (z - 1.0);
  const double azp = std::abs(zp);
  if (az <= kRadius && az <= azp) return direct(a, b, z);
  if (azp <= kRadius) return std::pow(1.0 - z, -b) * direct(c - a, b, zp);
  if (az < 1.0) return direct(a, b, z);
  throw ConvergenceError("gauss_2f1: argument outside the transformable domain");
}

cplx spherical_harmonic(int l, int m, double theta, double phi) {
  if (l < 0) throw DomainError("spherical_harmonic: negative l");
  const int am = std::abs(m);
  if (am > l) return 0.0;
  const double x = std::cos(theta);
  const double sx = std::sin(theta);
  // P_l^m without the Condon-Shortley phase, upward in l.
  double pmm = 1.0;
  for (int i = 1; i <= am; ++i) pmm *= (2.0 * i - 1.0) * sx;
  double plm = pmm;
  if (l > am) {
    double p0 = pmm;
    double p1 = x * (2.0 * am + 1.0) * pmm;
    for (int ll = am + 2; ll <= l; ++ll) {
      const double p2 = ((2.0 * ll - 1.0) * x * p1 - (ll + am - 1.0) * p0) / (ll - am);
      p0 = p1;
      p1 = p2;
    }
    plm = p1;
  }
  const double lnorm = 0.5 * (std::log((2.0 * l + 1.0) / (4.0 * kPi)) + std::lgamma(l - am + 1.0) -
                              std::lgamma(l + am + 1.0));
  const double sign = (am % 2) ? -1.0 : 1.0;
  const cplx y = sign * std::exp(lnorm) * plm * std::polar(1.0, am * phi);
  if (m >= 0) return y;
  return sign * std::conj(y);
}

std::array<cplx, 2> spinor_harmonic(int kappa, double m, double theta, double phi) {
  if (kappa == 0) throw DomainError("spinor_harmonic: kappa must be nonzero");
  const double twice_m = 2.0 * m;
  if (std::abs(twice_m - std::round(twice_m)) > 1e-12 || static_cast<long>(std::round(twice_m)) % 2 == 0)
    throw DomainError("spinor_harmonic: m must be half-integer");
  const double j = std::abs(kappa) - 0.5;
  if (std::abs(m) > j + 1e-12) throw DomainError("spinor_harmonic: |m| exceeds j");
  const int l = kappa > 0 ? kappa : -kappa - 1;
  const double k = kappa;
  const double den = 2.0 * k + 1.0;
  const double c1 = std::sqrt(std::max(0.0, (k + 0.5 - m) / den));
  const double c2 = std::sqrt(std::max(0.0, (k + 0.5 + m) / den));
  const int mlo = static_cast<int>(std::lround(m - 0.5));
  const int mhi = static_cast<int>(std::lround(m + 0.5));
  const double sgn = kappa > 0 ? 1.0 : -1.0;
  return {c1 * spherical_harmonic(l, mlo, theta, phi), -sgn * c2 * spherical_harmonic(l, mhi, theta, phi)};
}

Quadrature gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n < 1");
  Quadrature q;
  q.x.resize(n);
  q.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    q.x[i] = -x;
    q.x[n - 1 - i] = x;
    q.w[i] = q.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (n % 2) q.x[n / 2] = 0.0;
  return q;
}

Quadrature gauss_laguerre(int n, double alpha) {
  if (n < 1) throw DomainError("gauss_laguerre: n < 1");
  if (alpha <= -1.0) throw DomainError("gauss_laguerre: alpha <= -1");
  // Golub-Welsch start, Newton polish on L_n^alpha.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    jac(i, i) = 2.0 * i + alpha + 1.0;
    if (i + 1 < n) jac(i, i + 1) = jac(i + 1, i) = -std::sqrt((i + 1.0) * (i + 1.0 + alpha));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac, Eigen::EigenvaluesOnly);
  Quadrature q;
  q.x.resize(n);
  q.w.resize(n);
  auto eval = [&](double x, double& ln, double& lnm1) {
    double l0 = 1.0, l1 = 1.0 + alpha - x;
    if (n == 1) {
      ln = l1;
      lnm1 = l0;
      return;
    }
    for (int m = 1; m < n; ++m) {
      const double l2 = ((2 * m + 1 + alpha - x) * l1 - (m + alpha) * l0) / (m + 1);
      l0 = l1;
      l1 = l2;
    }
    ln = l1;
    lnm1 = l0;
  };
  const double lnc = std::lgamma(n + alpha + 1.0) - std::lgamma(n + 1.0);
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()(i);
    double ln = 0.0, lnm1 = 0.0;
    for (int it = 0; it < 20; ++it) {
      eval(x, ln, lnm1);
      const double d = (n * ln - (n + alpha) * lnm1) / x;
      const double dx = ln / d;
      x -= dx;
      if (std::abs(dx) <= 1e-15 * x) break;
    }
    eval(x, ln, lnm1);
    q.x[i] = x;
    q.w[i] = std::exp(lnc + std::log(x) - 2.0 * std::log((n + alpha) * std::abs(lnm1)));
  }
  return q;
}

}  // namespace dirac::specfun
