#include "hillgap/qes.hpp"

#include <algorithm>
#include <ostream>

#include <json.hpp>

#include "hillgap/errors.hpp"
#include "hillgap/potential.hpp"
#include "hillgap/spectrum.hpp"

namespace hillgap {

std::string_view to_string(Symmetry s) noexcept {
  switch (s) {
    case Symmetry::PerEvenCos: return "per_even_cos";
    case Symmetry::PerOddSin: return "per_odd_sin";
    case Symmetry::AntiCos: return "anti_cos";
    case Symmetry::AntiSin: return "anti_sin";
  }
  return "?";
}

namespace {

int first_k(Symmetry s) {
  switch (s) {
    case Symmetry::PerEvenCos: return 0;
    case Symmetry::PerOddSin: return 2;
    default: return 1;
  }
}

}  // namespace

RecurrenceSystem build_recurrence(Symmetry symmetry, const Real& alpha, const Real& t, int M) {
  if (M < 4) fail(ErrorCode::InvalidArgument, "recurrence truncation needs M >= 4");
  const Bits bits = max_bits(alpha, t);
  RecurrenceSystem sys;
  sys.symmetry = symmetry;
  sys.alpha = alpha.rounded_to(bits);
  sys.t = t.rounded_to(bits);
  sys.M = M;
  const Real a2 = sys.alpha * 2;
  for (int i = 0; i < M; ++i) {
    const int k = first_k(symmetry) + 2 * i;
    sys.ks.push_back(k);
    sys.sub.push_back(i == 0 ? Real::zero(bits) : a2 * (sys.t + (k - 1)));
    sys.diag.push_back(Real::with_bits(long(k) * k, bits));
    sys.super.push_back(i + 1 < M ? a2 * (sys.t - (k + 1)) : Real::zero(bits));
  }
  switch (symmetry) {
    case Symmetry::PerEvenCos: sys.sub[1] *= 2; break;  // A_0 carries the constant term twice
    case Symmetry::AntiCos: sys.diag[0] += a2 * sys.t; break;
    case Symmetry::AntiSin: sys.diag[0] -= a2 * sys.t; break;
    case Symmetry::PerOddSin: break;
  }
  return sys;
}

std::vector<std::vector<Real>> RecurrenceSystem::dense() const {
  const Bits bits = alpha.bits();
  std::vector<std::vector<Real>> m(M, std::vector<Real>(M, Real::zero(bits)));
  for (int i = 0; i < M; ++i) {
    m[i][i] = diag[i];
    if (i > 0) m[i][i - 1] = sub[i];
    if (i + 1 < M) m[i][i + 1] = super[i];
  }
  return m;
}

std::vector<std::pair<Real, Real>> hessenberg_eigenvalues(std::vector<std::vector<Real>> h) {
  const int n = static_cast<int>(h.size());
  std::vector<std::pair<Real, Real>> out;
  if (n == 0) return out;
  const Bits bits = h[0][0].bits();
  // 1-based working copy.
  std::vector<std::vector<Real>> a(n + 1, std::vector<Real>(n + 1, Real::zero(bits)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i + 1][j + 1] = h[i][j];
  std::vector<Real> wr(n + 1, Real::zero(bits)), wi(n + 1, Real::zero(bits));
  auto sign_of = [](const Real& mag, const Real& s) { return s.sign() >= 0 ? abs(mag) : -abs(mag); };

  Real anorm = Real::zero(bits);
  for (int i = 1; i <= n; ++i)
    for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += abs(a[i][j]);

  int nn = n;
  Real t = Real::zero(bits);
  Real p(Real::zero(bits)), q(p), r(p), s(p), w(p), x(p), y(p), z(p), u(p), v(p);
  while (nn >= 1) {
    int its = 0, l = 1;
    do {
      for (l = nn; l >= 2; --l) {
        s = abs(a[l - 1][l - 1]) + abs(a[l][l]);
        if (s.is_zero()) s = anorm;
        if (abs(a[l][l - 1]) + s == s) {
          a[l][l - 1] = Real::zero(bits);
          break;
        }
      }
      x = a[nn][nn];
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn] = Real::zero(bits);
        --nn;
      } else {
        y = a[nn - 1][nn - 1];
        w = a[nn][nn - 1] * a[nn - 1][nn];
        if (l == nn - 1) {
          p = (y - x) / 2;
          q = p * p + w;
          z = sqrt(abs(q));
          x += t;
          if (q.sign() >= 0) {
            z = p + sign_of(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (!z.is_zero()) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = Real::zero(bits);
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn] = z;
            wi[nn - 1] = -z;
          }
          nn -= 2;
        } else {
          if (its == 60) fail(ErrorCode::ConvergenceFailure, "Hessenberg QR did not converge");
          if (its == 10 || its == 20 || its == 40) {
            // Exceptional shift.
            t += x;
            for (int i = 1; i <= nn; ++i) a[i][i] -= x;
            s = abs(a[nn][nn - 1]) + abs(a[nn - 1][nn - 2]);
            x = s * Real::with_bits(0.75, bits);
            y = x;
            w = s * s * Real::with_bits(-0.4375, bits);
          }
          ++its;
          int m = nn - 2;
          for (; m >= l; --m) {
            z = a[m][m];
            r = x - z;
            s = y - z;
            p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
            q = a[m + 1][m + 1] - z - r - s;
            r = a[m + 2][m + 1];
            s = abs(p) + abs(q) + abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            u = abs(a[m][m - 1]) * (abs(q) + abs(r));
            v = abs(p) * (abs(a[m - 1][m - 1]) + abs(z) + abs(a[m + 1][m + 1]));
            if (u + v == v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a[i][i - 2] = Real::zero(bits);
            if (i != m + 2) a[i][i - 3] = Real::zero(bits);
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a[k][k - 1];
              q = a[k + 1][k - 1];
              r = Real::zero(bits);
              if (k != nn - 1) r = a[k + 2][k - 1];
              x = abs(p) + abs(q) + abs(r);
              if (!x.is_zero()) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            s = sign_of(sqrt(p * p + q * q + r * r), p);
            if (s.is_zero()) continue;
            if (k == m) {
              if (l != m) a[k][k - 1] = -a[k][k - 1];
            } else {
              a[k][k - 1] = -(s * x);
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              p = a[k][j] + q * a[k + 1][j];
              if (k != nn - 1) {
                p += r * a[k + 2][j];
                a[k + 2][j] -= p * z;
              }
              a[k + 1][j] -= p * y;
              a[k][j] -= p * x;
            }
            const int mmin = std::min(nn, k + 3);
            for (int i = l; i <= mmin; ++i) {
              p = x * a[i][k] + y * a[i][k + 1];
              if (k != nn - 1) {
                p += z * a[i][k + 2];
                a[i][k + 2] -= p * r;
              }
              a[i][k + 1] -= p * q;
              a[i][k] -= p;
            }
          }
        }
      }
    } while (l < nn - 1);
  }
  for (int i = 1; i <= n; ++i) out.emplace_back(wr[i], wi[i]);
  return out;
}

namespace {

// Symmetric tridiagonal (diag d, squared off-diagonals e2) eigenvalues by
// Sturm bisection.
std::vector<Real> symmetric_tridiagonal_eigenvalues(const std::vector<Real>& d, const std::vector<Real>& e2) {
  const int n = static_cast<int>(d.size());
  const Bits bits = d[0].bits();
  Real lo = d[0], hi = d[0];
  for (int i = 0; i < n; ++i) {
    Real rad = Real::zero(bits);
    if (i > 0) rad += sqrt(e2[i - 1]);
    if (i + 1 < n) rad += sqrt(e2[i]);
    lo = min(lo, d[i] - rad);
    hi = max(hi, d[i] + rad);
  }
  lo -= 1;
  hi += 1;
  const Real pivmin = exp2_neg(2 * static_cast<long>(bits), bits);
  auto count_below = [&](const Real& x) {
    int c = 0;
    Real q = d[0] - x;
    for (int i = 0;; ++i) {
      if (q.is_zero()) q = -pivmin;
      if (q.sign() < 0) ++c;
      if (i + 1 == n) break;
      q = d[i + 1] - x - e2[i] / q;
    }
    return c;
  };
  std::vector<Real> out;
  const Real eps = exp2_neg(static_cast<long>(bits) - 4, bits);
  for (int idx = 0; idx < n; ++idx) {
    Real a = lo, b = hi;
    while (b - a > eps * max(Real::with_bits(1L, bits), max(abs(a), abs(b)))) {
      const Real mid = (a + b) / 2;
      if (mid == a || mid == b) break;
      if (count_below(mid) > idx) b = mid;
      else a = mid;
    }
    out.push_back((a + b) / 2);
  }
  return out;
}

}  // namespace

std::vector<Real> mu_spectrum(const RecurrenceSystem& sys) {
  const Bits bits = sys.alpha.bits();
  bool positive = true;
  for (int i = 0; i + 1 < sys.M; ++i) positive = positive && (sys.sub[i + 1] * sys.super[i]).sign() > 0;
  std::vector<Real> mu;
  if (positive) {
    std::vector<Real> e2;
    for (int i = 0; i + 1 < sys.M; ++i) e2.push_back(sys.sub[i + 1] * sys.super[i]);
    mu = symmetric_tridiagonal_eigenvalues(sys.diag, e2);
  } else {
    // Transposed, so a vanishing super-diagonal coefficient splits the
    // Hessenberg matrix exactly.
    auto m = sys.dense();
    for (int i = 0; i < sys.M; ++i)
      for (int j = 0; j < i; ++j) std::swap(m[i][j], m[j][i]);
    const Real tol = exp2_neg(static_cast<long>(bits) / 2, bits);
    for (auto& [re, im] : hessenberg_eigenvalues(std::move(m))) {
      if (abs(im) > tol * max(Real::with_bits(1L, bits), abs(re)))
        fail(ErrorCode::ComplexLeak, "recurrence eigenvalue with imaginary part " + to_sci(im, 6),
             "symmetry=" + std::string(to_string(sys.symmetry)) + " M=" + std::to_string(sys.M) + " re=" + to_sci(re, 20));
      mu.push_back(re);
    }
  }
  std::sort(mu.begin(), mu.end());
  return mu;
}

std::vector<Real> lambda_spectrum(const RecurrenceSystem& sys) {
  std::vector<Real> out = mu_spectrum(sys);
  const Real shift = sys.alpha * sys.alpha * 2;
  for (Real& x : out) x -= shift;
  return out;
}

namespace {

constexpr int kMaxM = 512;

bool settled(const std::vector<Real>& a, const std::vector<Real>& b, int count, Bits bits) {
  const Real tol = exp2_neg(static_cast<long>(bits) - 16, bits);
  for (int i = 0; i < count; ++i)
    if (abs(a[i] - b[i]) > tol * max(Real::with_bits(1L, bits), abs(b[i]))) return false;
  return true;
}

// Lambda lists for a pair of symmetry classes truncated at the same top k,
// so that identical trailing blocks stay identical.
std::pair<std::vector<Real>, std::vector<Real>> settled_pair(Symmetry s1, int c1, Symmetry s2, int c2, const Real& alpha,
                                                             const Real& t) {
  const Bits bits = max_bits(alpha, t);
  // PerEvenCos starts one lattice step below PerOddSin.
  const int extra1 = s1 == Symmetry::PerEvenCos && s2 == Symmetry::PerOddSin ? 1 : 0;
  int M = std::max({c1, c2, 4}) + 12;
  auto run = [&](int m) {
    return std::make_pair(lambda_spectrum(build_recurrence(s1, alpha, t, m + extra1)),
                          lambda_spectrum(build_recurrence(s2, alpha, t, m)));
  };
  auto prev = run(M);
  while (true) {
    const int next = M + 8;
    if (next > kMaxM) fail(ErrorCode::ConvergenceFailure, "recurrence spectrum did not settle");
    auto cur = run(next);
    if (settled(prev.first, cur.first, c1, bits) && settled(prev.second, cur.second, c2, bits)) {
      cur.first.resize(c1);
      cur.second.resize(c2);
      return cur;
    }
    prev = std::move(cur);
    M = next;
  }
}

}  // namespace

std::vector<Real> qes_lambdas(Symmetry symmetry, const Real& alpha, const Real& t, int count) {
  if (count < 1) fail(ErrorCode::InvalidArgument, "count must be positive");
  return settled_pair(symmetry, count, symmetry, count, alpha, t).first;
}

std::vector<QesGap> qes_gaps(const Real& alpha, const Real& t, int n_max) {
  if (n_max < 1) fail(ErrorCode::InvalidArgument, "n_max must be positive");
  const int even_pairs = n_max / 2, odd_pairs = (n_max + 1) / 2;
  std::vector<Real> cos_even, sin_even, cos_odd, sin_odd;
  if (even_pairs > 0)
    std::tie(cos_even, sin_even) =
        settled_pair(Symmetry::PerEvenCos, even_pairs + 1, Symmetry::PerOddSin, even_pairs, alpha, t);
  std::tie(cos_odd, sin_odd) = settled_pair(Symmetry::AntiCos, odd_pairs, Symmetry::AntiSin, odd_pairs, alpha, t);
  std::vector<QesGap> out;
  for (int n = 1; n <= n_max; ++n) {
    const Real& a = n % 2 ? cos_odd[(n - 1) / 2] : cos_even[n / 2];
    const Real& b = n % 2 ? sin_odd[(n - 1) / 2] : sin_even[n / 2 - 1];
    QesGap g;
    g.n = n;
    g.lambda_minus = min(a, b);
    g.lambda_plus = max(a, b);
    g.gamma = g.lambda_plus - g.lambda_minus;
    out.push_back(std::move(g));
  }
  return out;
}

int leading_block_size(Symmetry symmetry, long t) {
  if (t < 1) return 0;
  const long top = t - 1;  // the super-diagonal vanishes in the row k = t - 1
  const int k0 = first_k(symmetry);
  if ((top - k0) % 2 != 0 || top < k0) return 0;
  return static_cast<int>((top - k0) / 2 + 1);
}

namespace {

BivariatePoly poly_mul(const BivariatePoly& a, const BivariatePoly& b) {
  BivariatePoly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      auto& c = out[{ea.first + eb.first, ea.second + eb.second}];
      c += ca * cb;
    }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

BivariatePoly poly_sub(BivariatePoly a, const BivariatePoly& b) {
  for (const auto& [e, c] : b) a[e] -= c;
  std::erase_if(a, [](const auto& kv) { return kv.second == 0; });
  return a;
}

}  // namespace

BivariatePoly leading_block_determinant(Symmetry symmetry, long t) {
  const int size = leading_block_size(symmetry, t);
  if (size == 0) fail(ErrorCode::InvalidArgument, "no invariant leading block for this t and symmetry");
  // Entries as polynomials in (alpha, mu).
  auto diag = [&](int i) {
    const long k = first_k(symmetry) + 2L * i;
    BivariatePoly d{{{0, 0}, mpq_class(k * k)}, {{0, 1}, mpq_class(-1)}};
    if (i == 0 && symmetry == Symmetry::AntiCos) d[{1, 0}] = 2 * t;
    if (i == 0 && symmetry == Symmetry::AntiSin) d[{1, 0}] = -2 * t;
    std::erase_if(d, [](const auto& kv) { return kv.second == 0; });
    return d;
  };
  auto coupling = [&](int i) {  // sub(i) * super(i - 1), i >= 1
    const long k = first_k(symmetry) + 2L * i;
    mpq_class sub = 2 * (t + k - 1), sup = 2 * (t - (k - 2) - 1);
    if (symmetry == Symmetry::PerEvenCos && i == 1) sub *= 2;
    BivariatePoly c;
    if (sub * sup != 0) c[{2, 0}] = sub * sup;
    return c;
  };
  BivariatePoly prev{{{0, 0}, mpq_class(1)}};
  BivariatePoly cur = diag(0);
  for (int i = 1; i < size; ++i) {
    BivariatePoly next = poly_sub(poly_mul(diag(i), cur), poly_mul(coupling(i), prev));
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

ScanReport closed_gap_scan(const Real& alpha, long t, int n_max) {
  return closed_gap_scan(alpha, t, n_max, exp2_neg(static_cast<long>(alpha.bits()) / 2, alpha.bits()));
}

ScanReport closed_gap_scan(const Real& alpha, long t, int n_max, const Real& tol) {
  if (n_max < 1) fail(ErrorCode::InvalidArgument, "n_max must be positive");
  if (tol.sign() <= 0) fail(ErrorCode::InvalidArgument, "tol must be positive");
  const Bits bits = alpha.bits();
  PrecisionScope scope(bits);
  const long at = t < 0 ? -t : t;
  const Real tr = Real::with_bits(at, bits);
  ScanReport rep;
  rep.alpha = alpha;
  rep.t = t;
  rep.tol = tol;

  const Potential v = from_two_term({Complex(alpha), Complex(tr), Regime::BothReal}, bits);
  SpectrumOptions opts;
  opts.precision_bits = bits;
  const SpectrumResult matrix = spectrum_slices(v, n_max, exp2_neg(static_cast<long>(bits) / 4, bits), opts);
  const std::vector<QesGap> rec = qes_gaps(alpha, tr, n_max);

  for (int n = 1; n <= n_max; ++n) {
    if ((n + at) % 2 == 0) continue;  // the parity that can close is opposite to t
    const bool expected = n >= at + 1;
    for (int which = 0; which < 2; ++which) {
      ScanRow row;
      row.n = n;
      row.method = which == 0 ? "matrix" : "qes";
      row.gamma = which == 0 ? matrix.slices[n - 1].gamma : rec[n - 1].gamma;
      row.closed = row.gamma < tol;
      row.expected_closed = expected;
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

void write_scan_csv(std::ostream& os, const ScanReport& report) {
  const int d = digits_for_bits(report.alpha.bits());
  os << "n,parity,gamma,verdict,method,tol\n";
  for (const ScanRow& r : report.rows)
    os << r.n << ',' << to_string(parity_of(r.n)) << ',' << to_sci(r.gamma, d) << ','
       << (r.closed ? "closed" : "open") << ',' << r.method << ',' << to_sci(report.tol, 6) << '\n';
}

std::string scan_json(const ScanReport& report) {
  const int d = digits_for_bits(report.alpha.bits());
  nlohmann::json rows = nlohmann::json::array();
  for (const ScanRow& r : report.rows)
    rows.push_back({{"n", r.n},
                    {"parity", std::string(to_string(parity_of(r.n)))},
                    {"gamma", to_sci(r.gamma, d)},
                    {"verdict", r.closed ? "closed" : "open"},
                    {"expected", r.expected_closed ? "closed" : "open"},
                    {"method", r.method}});
  return nlohmann::json{{"alpha", to_sci(report.alpha, d)}, {"t", report.t}, {"tol", to_sci(report.tol, 6)}, {"rows", rows}}
      .dump();
}

}  // namespace hillgap
