#include "hillgap/gapseries.hpp"

#include <ostream>

#include <json.hpp>

#include "hillgap/errors.hpp"

namespace hillgap {

namespace {

Real mag(const Real& x) { return abs(x); }
Real mag(const Complex& z) { return abs(z); }
Complex to_complex(const Real& x) { return Complex(x); }
Complex to_complex(const Complex& z) { return z; }

template <typename T>
T coefficient(const Potential& v, int m, Bits bits);

template <>
Real coefficient<Real>(const Potential& v, int m, Bits bits) {
  return v.coeff(m).re.rounded_to(bits);
}

template <>
Complex coefficient<Complex>(const Potential& v, int m, Bits bits) {
  Complex c = v.coeff(m);
  return Complex(c.re.rounded_to(bits), c.im.rounded_to(bits));
}

struct Params {
  int n;
  int max_depth;   // explicit depth, or the cap in auto mode
  int window;      // J, lattice cut
  bool auto_mode;
  Real tail_tol;
  Bits bits;
  std::ostream* trace;
};

// Four running entries with their per-order absolute sums.
template <typename T>
struct Accum {
  T s11, s12, s21, s22;
  Real a11, a12, a21, a22;
  Real c11_prev, c12_prev, c21_prev, c22_prev;
};

int minimal_beta_order(int n, int K) {
  // k + 1 steps of length <= 2K must cover 2n.
  return (n + K - 1) / K - 1;
}

template <typename T>
SEntries run_series(const Potential& v, const Real& z, const Params& p) {
  const int n = p.n;
  const int K = v.half_bandwidth();
  const Bits bits = p.bits;
  const T zero = T(Real::zero(bits));

  SEntries out;
  out.n = n;
  out.z = z;
  out.lattice_cut = p.window;

  // Ve[e + K] = V(2e), e = -K..K.
  std::vector<T> Ve;
  for (int e = -K; e <= K; ++e) Ve.push_back(coefficient<T>(v, 2 * e, bits));
  auto V = [&](int e) -> const T& { return Ve[e + K]; };

  Accum<T> acc{zero, coefficient<T>(v, -2 * n, bits), coefficient<T>(v, 2 * n, bits), zero,
               Real::zero(bits), Real::zero(bits), Real::zero(bits), Real::zero(bits),
               Real::zero(bits), Real::zero(bits), Real::zero(bits), Real::zero(bits)};
  acc.a12 = mag(acc.s12);
  acc.a21 = mag(acc.s21);
  acc.c12_prev = acc.a12;
  acc.c21_prev = acc.a21;

  auto emit_order = [&](int k) {
    if (!p.trace) return;
    nlohmann::json j{{"k", k}, {"partial_s21", {to_sci(to_complex(acc.s21).re), to_sci(to_complex(acc.s21).im)}}};
    *p.trace << j.dump() << '\n';
  };
  emit_order(0);

  const auto finish = [&](int depth, const Real& last) {
    out.alpha_n = to_complex(acc.s11);
    out.s22 = to_complex(acc.s22);
    out.s21 = to_complex(acc.s21);
    out.s12 = to_complex(acc.s12);
    out.depth_used = depth;
    out.lattice_cut = p.auto_mode ? n + 2 * K * depth : p.window;
    out.abs_sum_alpha = acc.a11;
    out.abs_sum_s21 = acc.a21;
    out.last_orders = last;
    return out;
  };

  if (K == 0 || p.max_depth == 0) return finish(0, Real::zero(bits));

  // Sites j = -Jmax, -Jmax + 2, ..., Jmax (parity of n); index i = (j + Jmax) / 2.
  const int Jmax = p.window;
  const int size = Jmax + 1;
  auto idx = [&](int j) { return (j + Jmax) / 2; };
  std::vector<T> invd(size, zero);
  const Real n2 = Real::with_bits(static_cast<long>(n) * n, bits);
  for (int i = 0; i < size; ++i) {
    const long j = -Jmax + 2L * i;
    if (j == n || j == -n) continue;
    Real d = n2 - j * j;
    d += z;
    invd[i] = T(1 / d);
  }

  std::vector<T> A(size, zero), B(size, zero), nextA(size, zero), nextB(size, zero);
  T tmp = zero;
  // Order 1 seeds: A(j) = V(-n-j)/d(j) at j = -n - 2e, B(j) = V(n-j)/d(j) at j = n - 2e.
  for (int e = -K; e <= K; ++e) {
    if (e == 0) continue;
    const int ja = -n - 2 * e, jb = n - 2 * e;
    if (ja != n && ja != -n && std::abs(ja) <= Jmax) {
      A[idx(ja)] = V(e);
      A[idx(ja)] *= invd[idx(ja)];
    }
    if (jb != n && jb != -n && std::abs(jb) <= Jmax) {
      B[idx(jb)] = V(e);
      B[idx(jb)] *= invd[idx(jb)];
    }
  }

  const int beta_min = minimal_beta_order(n, K);
  Real last = Real::zero(bits);
  const Real floor_scale = exp2_neg(bits, bits);

  for (int k = 1; k <= p.max_depth; ++k) {
    // Contract with the closing factors V(j + n) (vertex -n + 2e) and V(j - n) (vertex n + 2e).
    T c11 = zero, c12 = zero, c21 = zero, c22 = zero;
    for (int e = -K; e <= K; ++e) {
      if (e == 0) continue;
      const int jm = -n + 2 * e, jp = n + 2 * e;
      if (std::abs(jm) <= Jmax) {
        tmp = A[idx(jm)];
        tmp *= V(e);
        c11 += tmp;
        tmp = B[idx(jm)];
        tmp *= V(e);
        c21 += tmp;
      }
      if (std::abs(jp) <= Jmax) {
        tmp = A[idx(jp)];
        tmp *= V(e);
        c12 += tmp;
        tmp = B[idx(jp)];
        tmp *= V(e);
        c22 += tmp;
      }
    }
    acc.s11 += c11;
    acc.s12 += c12;
    acc.s21 += c21;
    acc.s22 += c22;
    const Real m11 = mag(c11), m12 = mag(c12), m21 = mag(c21), m22 = mag(c22);
    acc.a11 += m11;
    acc.a12 += m12;
    acc.a21 += m21;
    acc.a22 += m22;
    emit_order(k);
    last = max(max(m11 + acc.c11_prev, m12 + acc.c12_prev), max(m21 + acc.c21_prev, m22 + acc.c22_prev));

    if (p.auto_mode && k >= std::max(beta_min + 1, 2)) {
      auto settled = [&](const Real& c, const Real& prev, const T& s, const Real& a) {
        return c + prev <= p.tail_tol * mag(s) + floor_scale * a;
      };
      if (settled(m11, acc.c11_prev, acc.s11, acc.a11) && settled(m12, acc.c12_prev, acc.s12, acc.a12) &&
          settled(m21, acc.c21_prev, acc.s21, acc.a21) && settled(m22, acc.c22_prev, acc.s22, acc.a22))
        return finish(k, last);
    }
    acc.c11_prev = m11;
    acc.c12_prev = m12;
    acc.c21_prev = m21;
    acc.c22_prev = m22;
    if (k == p.max_depth) break;

    // Transfer step on the active range |j| <= n + 2K(k+1); older entries
    // in the scratch buffers lie inside that range and get overwritten.
    const int reach = std::min(Jmax, n + 2 * K * (k + 1));
    for (int i = idx(-reach); i <= idx(reach); ++i) {
      const int j = -Jmax + 2 * i;
      T& na = nextA[i];
      T& nb = nextB[i];
      na = zero;
      nb = zero;
      if (j == n || j == -n) continue;
      for (int e = -K; e <= K; ++e) {
        if (e == 0) continue;
        const int ii = i + e;  // j' = j + 2e carries V(j' - j) = V(2e)
        if (ii < 0 || ii >= size) continue;
        tmp = A[ii];
        tmp *= V(e);
        na += tmp;
        tmp = B[ii];
        tmp *= V(e);
        nb += tmp;
      }
      na *= invd[i];
      nb *= invd[i];
    }
    A.swap(nextA);
    B.swap(nextB);
  }
  if (p.auto_mode)
    fail(ErrorCode::TailNotConverged, "walk series did not settle before the depth cap",
         "n=" + std::to_string(n) + " depth=" + std::to_string(p.max_depth) + " last=" + to_sci(last, 6));
  return finish(p.max_depth, last);
}

Bits working_bits(const Potential& v, const SeriesConfig& cfg) {
  return cfg.precision_bits.value_or(v.precision_bits());
}

Real tail_tol_for(const SeriesConfig& cfg, Bits bits) {
  return cfg.tail_tol ? cfg.tail_tol->rounded_to(bits) : exp2_neg(bits - 8, bits);
}

void check_inputs(const Potential& v, int n, const Real& z, const SeriesConfig& cfg) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "n must be positive");
  if (!cfg.allow_outside_validity && !series_valid(v, n))
    fail(ErrorCode::ValidityRegion, "series needs 9||v|| <= n",
         "n=" + std::to_string(n) + " norm=" + to_sci(v.l2_norm(), 8));
  if (abs(z) > 1) fail(ErrorCode::ValidityRegion, "series needs |z| <= 1", "z=" + to_sci(z, 8));
}

SEntries dispatch(const Potential& v, const Real& z, const Params& p) {
  if (v.has_real_coefficients()) return run_series<Real>(v, z, p);
  return run_series<Complex>(v, z, p);
}

}  // namespace

bool series_valid(const Potential& v, int n) { return 9 * v.l2_norm() <= n; }

SEntries s_entries(const Potential& v, int n, const Real& z, int depth, std::optional<int> J, const SeriesConfig& cfg) {
  check_inputs(v, n, z, cfg);
  if (depth < 0) fail(ErrorCode::InvalidArgument, "depth must be non-negative");
  const Bits bits = working_bits(v, cfg);
  PrecisionScope scope(bits);
  const int needed = n + 2 * v.half_bandwidth() * depth;
  const int window = J.value_or(needed);
  if (window < needed || (window - n) % 2 != 0)
    fail(ErrorCode::InvalidArgument, "lattice cut J must be >= n + 2K depth with the parity of n");
  return dispatch(v, z.rounded_to(bits), Params{n, depth, window, false, tail_tol_for(cfg, bits), bits, cfg.trace});
}

SEntries s_entries_auto(const Potential& v, int n, const Real& z, const SeriesConfig& cfg) {
  check_inputs(v, n, z, cfg);
  const Bits bits = working_bits(v, cfg);
  PrecisionScope scope(bits);
  const int cap = cfg.depth_cap.value_or(std::max<int>(4 * n, static_cast<int>(bits)));
  const int window = n + 2 * v.half_bandwidth() * cap;
  return dispatch(v, z.rounded_to(bits), Params{n, cap, window, true, tail_tol_for(cfg, bits), bits, cfg.trace});
}

ZSolution solve_z(const Potential& v, int n, Branch branch, const SeriesConfig& cfg) {
  if (!v.is_real_valued()) fail(ErrorCode::NonRealPotential, "gap series needs a real-valued potential");
  const Bits bits = working_bits(v, cfg);
  PrecisionScope scope(bits);
  const Real ztol = cfg.z_tol ? cfg.z_tol->rounded_to(bits) : exp2_neg(bits - 8, bits);
  const Real imag_tol = tail_tol_for(cfg, bits);
  const int sign = branch == Branch::Plus ? 1 : -1;

  ZSolution sol;
  sol.z = Real::zero(bits);
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    SEntries e = s_entries_auto(v, n, sol.z, cfg);
    if (abs(e.alpha_n.im) > imag_tol * max(abs(e.alpha_n.re), e.abs_sum_alpha) + exp2_neg(bits - 16, bits))
      fail(ErrorCode::ImaginaryResidue, "alpha_n(z) has a non-negligible imaginary part",
           "n=" + std::to_string(n) + " im=" + to_sci(e.alpha_n.im, 8));
    const Real abs_beta = abs(e.s21);
    Real znew = e.alpha_n.re;
    if (sign > 0) znew += abs_beta;
    else znew -= abs_beta;
    const Real step = abs(znew - sol.z);
    if (cfg.trace) {
      nlohmann::json j{{"iter", iter},
                       {"branch", sign > 0 ? "plus" : "minus"},
                       {"z", to_sci(sol.z)},
                       {"alpha", to_sci(e.alpha_n.re)},
                       {"abs_beta", to_sci(abs_beta)},
                       {"residual", to_sci(sol.z - znew)}};
      *cfg.trace << j.dump() << '\n';
    }
    sol.log.iterates.push_back({iter, sol.z, e.alpha_n.re, abs_beta, sol.z - znew});
    sol.iterations = iter;
    if (abs(znew) > 1)
      fail(ErrorCode::NoContraction, "fixed-point iterate left |z| <= 1", "iter=" + std::to_string(iter));
    sol.z = std::move(znew);
    if (step <= ztol) {
      sol.entries = s_entries_auto(v, n, sol.z, cfg);
      Real r = sol.z - sol.entries.alpha_n.re;
      if (sign > 0) r -= abs(sol.entries.s21);
      else r += abs(sol.entries.s21);
      sol.residual = std::move(r);
      return sol;
    }
  }
  fail(ErrorCode::NoContraction, "fixed point did not converge",
       "n=" + std::to_string(n) + " iterations=" + std::to_string(cfg.max_iterations));
}

SeriesGap gap_series(const Potential& v, int n, const SeriesConfig& cfg) {
  const Bits bits = working_bits(v, cfg);
  PrecisionScope scope(bits);
  SeriesGap g;
  g.inside_validity = series_valid(v, n);
  g.plus = solve_z(v, n, Branch::Plus, cfg);
  g.minus = solve_z(v, n, Branch::Minus, cfg);

  const Real n2 = Real::with_bits(static_cast<long>(n) * n, bits);
  SpectrumSlice& s = g.slice;
  s.n = n;
  s.lambda_plus = n2 + g.plus.z;
  s.lambda_minus = n2 + g.minus.z;
  s.gamma = g.plus.z - g.minus.z;
  s.method = Method::Series;
  s.M_used = std::max(g.plus.entries.lattice_cut, g.minus.entries.lattice_cut);
  s.precision_bits = bits;
  s.degenerate = g.plus.z == g.minus.z || s.gamma < ldexp(n2, -(bits - 8));

  g.abs_beta_plus = abs(g.plus.entries.s21);
  const Real q = 3 * v.l2_norm_squared().rounded_to(bits) / n2;
  g.lower_bound = 2 * g.abs_beta_plus * (1 - q);
  g.upper_bound = 2 * g.abs_beta_plus * (1 + q);
  const Real ztol = cfg.z_tol ? cfg.z_tol->rounded_to(bits) : exp2_neg(bits - 8, bits);
  const Real slack = 4 * ztol + exp2_neg(bits - 16, bits);
  g.within_bounds = s.gamma >= g.lower_bound - slack && s.gamma <= g.upper_bound + slack;
  if (!g.within_bounds && g.inside_validity)
    fail(ErrorCode::BoundViolated, "gap falls outside 2|beta_n|(1 -+ 3||v||^2/n^2)",
         "n=" + std::to_string(n) + " gamma=" + to_sci(s.gamma, 10) + " lower=" + to_sci(g.lower_bound, 10) +
             " upper=" + to_sci(g.upper_bound, 10));
  return g;
}

DerivativeCheck lemma5_fd(const Potential& v, int n, const Real& z0, const Real& h, const SeriesConfig& cfg) {
  const Bits bits = working_bits(v, cfg);
  PrecisionScope scope(bits);
  if (abs(z0) + abs(h) > 1) fail(ErrorCode::InvalidArgument, "need |z0| + h <= 1");
  const SEntries up = s_entries_auto(v, n, z0 + h, cfg);
  const SEntries dn = s_entries_auto(v, n, z0 - h, cfg);
  DerivativeCheck c;
  const Real two_h = 2 * h.rounded_to(bits);
  c.d_alpha = abs((up.alpha_n - dn.alpha_n) / two_h);
  c.d_beta = abs((up.s21 - dn.s21) / two_h);
  const Real norm2 = v.l2_norm_squared().rounded_to(bits);
  c.bound = norm2 / (static_cast<long>(n) * n);
  c.slack = 10 * h * h * norm2;
  c.ok = c.d_alpha <= c.bound + c.slack && c.d_beta <= c.bound + c.slack;
  return c;
}

bool lemma5_fd_check(const Potential& v, int n, const Real& z0, const Real& h, const SeriesConfig& cfg) {
  return lemma5_fd(v, n, z0, h, cfg).ok;
}

}  // namespace hillgap
