#include "hillgap/spectrum.hpp"

#include <cmath>
#include <ostream>

#include "hillgap/errors.hpp"
#include "parallel.hpp"

namespace hillgap {

namespace {

const Real& cj(const Real& x) { return x; }
Complex cj(const Complex& z) { return conj(z); }
Real nrm(const Real& x) { return x * x; }
Real nrm(const Complex& z) { return norm(z); }

std::vector<int> lattice(Parity parity, int M) {
  std::vector<int> sites;
  const int start = parity == Parity::PerPlus ? 0 : 1;
  int top = M;
  if ((top - start) % 2 != 0) --top;
  for (int k = -top; k <= top; k += 2) sites.push_back(k);
  return sites;
}

// Sorted diagonal k^2; by Weyl, |lambda_i(A) - diag_i| <= ||A - D||.
Real sorted_diagonal(const std::vector<int>& sites, int index, Bits bits) {
  // Sites come in +-k pairs (and k = 0 once for Per+).
  const bool has_zero = sites.size() % 2 == 1;
  long k;
  if (has_zero) k = 2 * ((index + 1) / 2);
  else k = 2 * (index / 2) + 1;
  return Real::with_bits(k * k, bits);
}

}  // namespace

std::string_view to_string(Parity parity) noexcept { return parity == Parity::PerPlus ? "per+" : "per-"; }

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::Matrix: return "matrix";
    case Method::Series: return "series";
    case Method::Qes: return "qes";
  }
  return "matrix";
}

TruncatedOperator build_truncated(const Potential& v, Parity parity, int M, std::optional<Bits> bits) {
  if (!v.is_real_valued()) fail(ErrorCode::NonRealPotential, "truncated operator needs a real-valued potential");
  if (M < v.degree_bound())
    fail(ErrorCode::TruncationTooSmall,
         "truncation M=" + std::to_string(M) + " below degree bound " + std::to_string(v.degree_bound()));
  TruncatedOperator op;
  op.parity_ = parity;
  op.M_ = M;
  op.K_ = v.half_bandwidth();
  op.bits_ = bits.value_or(v.precision_bits());
  op.sites_ = lattice(parity, M);
  op.radius_ = Real::zero(op.bits_);
  for (int d = 1; d <= op.K_; ++d) {
    Complex c = v.coeff(2 * d);
    c = Complex(c.re.rounded_to(op.bits_), c.im.rounded_to(op.bits_));
    if (!c.im.is_zero()) op.real_ = false;
    op.radius_ += 2 * abs(c);
    op.lower_re_.push_back(c.re);
    op.lower_.push_back(std::move(c));
  }
  op.pivmin_ = exp2_neg(2 * op.bits_, op.bits_);
  return op;
}

Complex TruncatedOperator::entry(int i, int j) const {
  if (i == j) {
    const long k = sites_.at(i);
    return Complex(Real::with_bits(k * k, bits_));
  }
  const int d = std::abs(i - j);
  if (d > K_) return Complex::zero(bits_);
  // A(i, j) = V(k_i - k_j) = V(2(i - j)); V(-m) = conj V(m).
  return i > j ? lower_[d - 1] : conj(lower_[d - 1]);
}

template <typename T>
long TruncatedOperator::count_below_impl(const std::vector<T>& lower, const Real& sigma) const {
  const int N = dim();
  const int K = K_;
  const int ring = K + 1;
  // Row r of L (entries l_{r, r-dd}, dd = 1..K) and pivot d_r live in slot r % ring.
  std::vector<std::vector<T>> L(ring, std::vector<T>(std::max(K, 1), T(Real::zero(bits_))));
  std::vector<Real> d(ring, Real::zero(bits_));
  Real tmp = Real::zero(bits_);
  T acc = T(Real::zero(bits_));
  long negatives = 0;
  for (int i = 0; i < N; ++i) {
    auto& Li = L[i % ring];
    for (int dd = std::min(K, i); dd >= 1; --dd) {
      const int k = i - dd;
      const auto& Lk = L[k % ring];
      acc = lower[dd - 1];
      for (int m = std::max(0, i - K); m < k; ++m) acc -= Li[i - m - 1] * d[m % ring] * cj(Lk[k - m - 1]);
      Li[dd - 1] = acc;
      Li[dd - 1] /= d[k % ring];
    }
    Real& di = d[i % ring];
    const long ki = sites_[i];
    di = Real::with_bits(ki * ki, bits_);
    di -= sigma;
    for (int dd = 1; dd <= std::min(K, i); ++dd) {
      tmp = nrm(Li[dd - 1]);
      tmp *= d[(i - dd) % ring];
      di -= tmp;
    }
    if (abs(di) < pivmin_) di = -pivmin_;
    if (di.sign() < 0) ++negatives;
  }
  return negatives;
}

long TruncatedOperator::count_below(const Real& sigma) const {
  if (K_ == 0) {
    long c = 0;
    for (int k : sites_) c += compare(sigma, static_cast<long>(k) * k) > 0;
    return c;
  }
  return real_ ? count_below_impl(lower_re_, sigma) : count_below_impl(lower_, sigma);
}

Real TruncatedOperator::eigenvalue(int index) const {
  if (index < 0 || index >= dim()) fail(ErrorCode::RangeError, "eigenvalue index out of range");
  const Real center = sorted_diagonal(sites_, index, bits_);
  if (radius_.is_zero()) return center;
  const Real slack = ldexp(radius_, -20) + exp2_neg(20, bits_);
  Real lo = center - radius_ - slack;
  Real hi = center + radius_ + slack;
  for (int iter = 0;; ++iter) {
    Real mid = lo + hi;
    mid /= 2;
    const Real scale = max(max(abs(lo), abs(hi)), Real::with_bits(1L, bits_));
    if (hi - lo <= ldexp(scale, -(bits_ - 2)) || mid == lo || mid == hi) return mid;
    if (iter > 4 * bits_ + 200)
      fail(ErrorCode::ConvergenceFailure, "bisection did not converge",
           "index=" + std::to_string(index) + " width=" + to_sci(hi - lo, 6));
    if (count_below(mid) > index) hi = std::move(mid);
    else lo = std::move(mid);
  }
}

std::vector<Real> eigenvalues(const TruncatedOperator& op) {
  PrecisionScope scope(op.bits());
  std::vector<Real> out(op.dim(), Real::zero(op.bits()));
  detail::parallel_for(out.size(), 0, [&](std::size_t i) { out[i] = op.eigenvalue(static_cast<int>(i)); });
  return out;
}

long count_in_interval(const TruncatedOperator& op, const Real& a, const Real& b) {
  return op.count_below(b) - op.count_below(a);
}

Bits default_spectrum_precision(const Potential& v, int n_max) {
  const auto& tt = v.provenance().two_term;
  if (!tt) return 128;
  const double a = abs(tt->alpha).to_double();
  if (a == 0.0) return 128;
  const double per_n = std::max(0.0, std::log2(2.0 / a));
  return 64 + static_cast<Bits>(std::ceil(n_max * per_n)) + 4L * n_max;
}

bool localization_check(const SpectrumSlice& slice, const Real& norm) {
  if (norm > Real::with_bits(0.25, norm.bits()))
    fail(ErrorCode::HypothesisNotMet, "localization bound needs ||v|| <= 1/4", "norm=" + to_sci(norm, 8));
  const Real n2 = Real::with_bits(static_cast<long>(slice.n) * slice.n, slice.lambda_minus.bits());
  const Real bound = 4 * norm;
  return abs(slice.lambda_minus - n2) <= bound && abs(slice.lambda_plus - n2) <= bound;
}

namespace {

struct Snapshot {
  std::vector<SpectrumSlice> slices;
  Real lambda0;
};

Snapshot compute_slices(const Potential& v, int n_max, int M, Bits bits, unsigned threads) {
  const TruncatedOperator plus = build_truncated(v, Parity::PerPlus, M, bits);
  const TruncatedOperator minus = build_truncated(v, Parity::PerMinus, M, bits);
  // Jobs: (operator, index).  Per+ holds lambda_0 at index 0 and lambda_n^{-+}
  // at n-1, n for even n; Per- the same indices for odd n.
  struct Job {
    const TruncatedOperator* op;
    int index;
  };
  std::vector<Job> jobs{{&plus, 0}};
  for (int n = 1; n <= n_max; ++n) {
    const TruncatedOperator* op = n % 2 == 0 ? &plus : &minus;
    if (n + 1 > op->dim()) fail(ErrorCode::TruncationTooSmall, "truncation too small for n_max");
    jobs.push_back({op, n - 1});
    jobs.push_back({op, n});
  }
  std::vector<Real> values(jobs.size(), Real::zero(bits));
  detail::parallel_for(jobs.size(), threads, [&](std::size_t j) { values[j] = jobs[j].op->eigenvalue(jobs[j].index); });

  Snapshot snap;
  snap.lambda0 = values[0];
  for (int n = 1; n <= n_max; ++n) {
    SpectrumSlice s;
    s.n = n;
    s.lambda_minus = values[2 * n - 1];
    s.lambda_plus = values[2 * n];
    s.gamma = s.lambda_plus - s.lambda_minus;
    s.method = Method::Matrix;
    s.M_used = M;
    s.precision_bits = bits;
    const Real floor = ldexp(Real::with_bits(static_cast<long>(n) * n, bits), -(bits - 8));
    s.degenerate = s.gamma < floor;
    snap.slices.push_back(std::move(s));
  }
  return snap;
}

}  // namespace

SpectrumResult spectrum_slices(const Potential& v, int n_max, const Real& rel_tol, const SpectrumOptions& opts) {
  if (n_max < 1) fail(ErrorCode::InvalidArgument, "n_max must be positive");
  if (!v.is_real_valued()) fail(ErrorCode::NonRealPotential, "spectrum needs a real-valued potential");
  const Bits bits = opts.precision_bits.value_or(std::max(default_spectrum_precision(v, n_max), v.precision_bits()));
  PrecisionScope scope(bits);

  int M = std::max(2 * n_max, v.degree_bound() + 16);
  Snapshot prev = compute_slices(v, n_max, M, bits, opts.threads);
  for (;;) {
    const int M2 = 2 * M;
    if (M2 > opts.max_M)
      fail(ErrorCode::ConvergenceFailure, "gaps did not stabilise under truncation doubling",
           "M=" + std::to_string(M) + " max_M=" + std::to_string(opts.max_M));
    Snapshot cur = compute_slices(v, n_max, M2, bits, opts.threads);
    bool stable = true;
    for (int i = 0; i < n_max && stable; ++i) {
      const auto& a = prev.slices[i];
      const auto& b = cur.slices[i];
      const Real floor = ldexp(Real::with_bits(static_cast<long>(b.n) * b.n, bits), -(bits - 8));
      if (abs(b.gamma - a.gamma) > rel_tol * max(b.gamma, floor)) stable = false;
    }
    if (stable) {
      SpectrumResult out;
      out.M_used = M2;
      out.precision_bits = bits;
      out.lambda0 = std::move(cur.lambda0);
      out.slices = std::move(cur.slices);
      const Real norm = v.l2_norm();
      if (norm <= Real::with_bits(0.25, norm.bits())) {
        for (auto& s : out.slices) s.localized = localization_check(s, norm);
        out.lambda0_localized = abs(out.lambda0) <= 4 * norm;
      }
      return out;
    }
    prev = std::move(cur);
    M = M2;
  }
}

std::optional<int> empirical_n0(const Potential& v, int n_max, std::optional<Bits> bits) {
  const Bits p = bits.value_or(std::max<Bits>(128, v.precision_bits()));
  PrecisionScope scope(p);
  const int M = std::max(2 * n_max + 8, v.degree_bound() + 16);
  const TruncatedOperator plus = build_truncated(v, Parity::PerPlus, M, p);
  const TruncatedOperator minus = build_truncated(v, Parity::PerMinus, M, p);
  std::optional<int> n0;
  for (int n = n_max; n >= 1; --n) {
    const TruncatedOperator& op = n % 2 == 0 ? plus : minus;
    const long n2 = static_cast<long>(n) * n;
    const long inside = count_in_interval(op, Real::with_bits(n2 - 1, p), Real::with_bits(n2 + 1, p));
    if (inside != 2) break;
    n0 = n;
  }
  return n0;
}

Real offdisc_resolvent_sum(int n, const Real& lambda, int cutoff) {
  Real sum = Real::zero(lambda.bits());
  int first = -cutoff;
  if ((first - n) % 2 != 0) ++first;
  for (int k = first; k <= cutoff; k += 2) {
    if (k == n || k == -n) continue;
    Real diff = lambda - static_cast<long>(k) * k;
    sum += 1 / (diff * diff);
  }
  return sum;
}

void write_slices_csv(std::ostream& os, const std::vector<SpectrumSlice>& slices) {
  os << "n,lambda_minus,lambda_plus,gamma,method,M_used,precision_bits\n";
  for (const auto& s : slices) {
    os << s.n << ',' << to_sci(s.lambda_minus) << ',' << to_sci(s.lambda_plus) << ',' << to_sci(s.gamma) << ','
       << to_string(s.method) << ',' << s.M_used << ',' << s.precision_bits << '\n';
  }
}

}  // namespace hillgap
