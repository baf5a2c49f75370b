#include "hillgap/asymptotics.hpp"

#include <cmath>
#include <ostream>

#include <gmpxx.h>
#include <json.hpp>

#include "hillgap/errors.hpp"
#include "hillgap/gapseries.hpp"
#include "parallel.hpp"

namespace hillgap {

std::string_view to_string(PredictionRegime regime) noexcept {
  switch (regime) {
    case PredictionRegime::AlphaToZero: return "alpha_to_zero";
    case PredictionRegime::NToInfty: return "n_to_infty";
    case PredictionRegime::CoeffForm: return "coeff_form";
    case PredictionRegime::MathieuSmallA: return "mathieu_small_a";
    case PredictionRegime::MathieuLargeN: return "mathieu_large_n";
  }
  return "?";
}

PredictionRegime prediction_regime_from_string(std::string_view text) {
  for (auto r : {PredictionRegime::AlphaToZero, PredictionRegime::NToInfty, PredictionRegime::CoeffForm,
                 PredictionRegime::MathieuSmallA, PredictionRegime::MathieuLargeN})
    if (to_string(r) == text) return r;
  fail(ErrorCode::InvalidArgument, "unknown prediction regime: " + std::string(text));
}

std::string_view to_string(GapMethod method) noexcept {
  switch (method) {
    case GapMethod::Auto: return "auto";
    case GapMethod::Matrix: return "matrix";
    case GapMethod::Series: return "series";
  }
  return "?";
}

GapMethod gap_method_from_string(std::string_view text) {
  for (auto m : {GapMethod::Auto, GapMethod::Matrix, GapMethod::Series})
    if (to_string(m) == text) return m;
  fail(ErrorCode::InvalidArgument, "unknown gap method: " + std::string(text));
}

namespace {

constexpr long kExactLimit = 64;

Real from_mpz(const mpz_class& z, Bits bits) {
  Real r = Real::zero(bits);
  mpfr_set_z(r.raw(), z.get_mpz_t(), MPFR_RNDN);
  return r;
}

void check_order(long n) {
  if (n < 0) fail(ErrorCode::InvalidArgument, "factorial of a negative number");
}

void check_n(int n, int least) {
  if (n < least) fail(ErrorCode::InvalidArgument, "n must be at least " + std::to_string(least));
}

GapPrediction make(int n, Real value, PredictionRegime regime, std::vector<std::pair<std::string, Complex>> inputs) {
  return GapPrediction{n, std::move(value), regime, std::move(inputs)};
}

}  // namespace

Real log_factorial(long n, Bits bits) {
  check_order(n);
  return lgamma(Real::with_bits(n + 1, bits));
}

Real log_double_factorial(long n, Bits bits) {
  if (n < -1) fail(ErrorCode::InvalidArgument, "double factorial below -1");
  if (n <= 0) return Real::zero(bits);
  const long m = (n + 1) / 2;
  const Real ln2 = Real::log2_const(bits);
  // (2m)!! = 2^m m!,  (2m-1)!! = (2m)! / (2^m m!)
  if (n % 2 == 0) return ln2 * m + log_factorial(m, bits);
  return log_factorial(2 * m, bits) - ln2 * m - log_factorial(m, bits);
}

Real factorial(long n, Bits bits) {
  check_order(n);
  if (n <= kExactLimit) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return from_mpz(f, bits);
  }
  return exp(log_factorial(n, bits));
}

Real double_factorial(long n, Bits bits) {
  if (n < -1) fail(ErrorCode::InvalidArgument, "double factorial below -1");
  if (n <= 0) return Real::with_bits(1L, bits);
  if (n <= kExactLimit) {
    mpz_class f;
    mpz_2fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return from_mpz(f, bits);
  }
  return exp(log_double_factorial(n, bits));
}

GapPrediction predict_alpha_to_zero(const Complex& alpha, const Complex& t, int n) {
  check_n(n, 1);
  const Bits bits = std::max(alpha.bits(), t.bits());
  const Complex t2 = t * t;
  Complex prod(Real::with_bits(1L, bits));
  if (n % 2 == 0) {
    for (int k = 1; k <= n / 2; ++k) prod *= t2 - Complex(Real::with_bits(long(2 * k - 1) * (2 * k - 1), bits));
  } else {
    prod = t;
    for (int k = 1; k <= (n - 1) / 2; ++k) prod *= t2 - Complex(Real::with_bits(4L * k * k, bits));
  }
  const Real f = factorial(n - 1, bits);
  Real value = abs(prod) * pow(abs(alpha), n) * 8 / ldexp(f * f, n);
  return make(n, std::move(value), PredictionRegime::AlphaToZero, {{"alpha", alpha}, {"t", t}});
}

GapPrediction predict_n_to_infty(const Complex& alpha, const Complex& t, int n) {
  check_n(n, 3);
  const Bits bits = std::max(alpha.bits(), t.bits());
  const Real pi = Real::pi(bits);
  const Complex arg = t * (pi / 2);
  const Real trig = n % 2 == 0 ? abs(cos(arg)) : abs(sin(arg)) * 2 / pi;
  const Real df = double_factorial(n - 2, bits);
  Real value = pow(abs(alpha), n) * 8 / ldexp(df * df, n) * trig;
  return make(n, std::move(value), PredictionRegime::NToInfty, {{"alpha", alpha}, {"t", t}});
}

GapPrediction predict_coeff_form(const Complex& a1, const Complex& a2, int n) {
  check_n(n, 1);
  const Bits bits = std::max(a1.bits(), a2.bits());
  const Complex q = a1 * a1 / Real::with_bits(4L, bits);
  Complex prod(Real::with_bits(1L, bits));
  if (n % 2 == 0) {
    for (int k = 1; k <= n / 2; ++k) prod *= q + a2 * Real::with_bits(long(2 * k - 1) * (2 * k - 1), bits);
  } else {
    prod = a1 / Real::with_bits(2L, bits);
    for (int k = 1; k <= (n - 1) / 2; ++k) prod *= q + a2 * Real::with_bits(4L * k * k, bits);
  }
  const Real f = factorial(n - 1, bits);
  Real value = abs(prod) * 8 / ldexp(f * f, n);
  return make(n, std::move(value), PredictionRegime::CoeffForm, {{"a1", a1}, {"a2", a2}});
}

GapPrediction predict_mathieu(const Real& a, int n, PredictionRegime regime) {
  check_n(n, 1);
  if (regime != PredictionRegime::MathieuSmallA && regime != PredictionRegime::MathieuLargeN)
    fail(ErrorCode::InvalidArgument, "predict_mathieu needs a Mathieu regime");
  const Real f = factorial(n - 1, a.bits());
  Real value = pow(abs(a) / 4, n) * 8 / (f * f);
  return make(n, std::move(value), regime, {{"a", Complex(a)}});
}

SpectrumSlice compute_gap(const Potential& v, int n, GapMethod method, const Real& rel_tol, Bits bits) {
  check_n(n, 1);
  const bool series = method == GapMethod::Series || (method == GapMethod::Auto && series_valid(v, n));
  if (series) {
    SeriesConfig cfg;
    cfg.precision_bits = bits;
    cfg.allow_outside_validity = method == GapMethod::Series;
    return gap_series(v, n, cfg).slice;
  }
  SpectrumOptions opts;
  opts.precision_bits = bits;
  opts.threads = 1;
  return spectrum_slices(v, n, rel_tol, opts).slices.back();
}

Potential potential_for(const RatioSpec& spec, const Real& alpha) {
  if (spec.family == RatioSpec::Family::Mathieu) return mathieu(alpha, spec.bits);
  TwoTermParams p{Complex(alpha.rounded_to(spec.bits)), spec.t, spec.regime};
  if (spec.regime == Regime::BothImaginary) p.alpha = Complex(Real::zero(spec.bits), alpha.rounded_to(spec.bits));
  return from_two_term(p, spec.bits);
}

GapPrediction predict_for(const RatioSpec& spec, const Real& alpha, int n) {
  const Real a = alpha.rounded_to(spec.bits);
  if (spec.family == RatioSpec::Family::Mathieu) {
    const PredictionRegime r =
        spec.prediction == PredictionRegime::NToInfty || spec.prediction == PredictionRegime::MathieuLargeN
            ? PredictionRegime::MathieuLargeN
            : PredictionRegime::MathieuSmallA;
    return predict_mathieu(a, n, r);
  }
  const Complex ca = spec.regime == Regime::BothImaginary ? Complex(Real::zero(spec.bits), a) : Complex(a);
  switch (spec.prediction) {
    case PredictionRegime::NToInfty: return predict_n_to_infty(ca, spec.t, n);
    case PredictionRegime::CoeffForm: {
      const Complex a1 = ca * spec.t * Real::with_bits(-2L, spec.bits);
      return predict_coeff_form(a1, -(ca * ca), n);
    }
    case PredictionRegime::AlphaToZero: return predict_alpha_to_zero(ca, spec.t, n);
    default: fail(ErrorCode::InvalidArgument, "Mathieu regimes need the Mathieu family");
  }
}

namespace {

RatioRow make_row(const RatioSpec& spec, const Real& alpha, int n) {
  PrecisionScope scope(spec.bits);
  RatioRow row;
  row.n = n;
  row.alpha = alpha;
  const Potential v = potential_for(spec, alpha);
  const SpectrumSlice s = compute_gap(v, n, spec.method, spec.rel_tol, spec.bits);
  row.gamma = s.gamma;
  row.method = s.method;
  row.predicted = predict_for(spec, alpha, n).value;
  if (!row.predicted.is_zero()) {
    row.ratio = row.gamma / row.predicted;
    row.ratio_error = abs(*row.ratio - 1);
  }
  return row;
}

}  // namespace

std::vector<RatioRow> ratio_ladder(const RatioSpec& spec, int n, const std::vector<Real>& alphas) {
  std::vector<RatioRow> rows;
  for (const Real& a : alphas) {
    rows.push_back(make_row(spec, a, n));
    const std::size_t i = rows.size() - 1;
    if (i > 0 && rows[i - 1].ratio_error && rows[i].ratio_error && !rows[i].ratio_error->is_zero())
      rows[i].quotient = *rows[i - 1].ratio_error / *rows[i].ratio_error;
  }
  return rows;
}

std::vector<RatioRow> ratio_over_n(const RatioSpec& spec, const Real& alpha, int n_lo, int n_hi, int threads) {
  if (n_lo < 1 || n_hi < n_lo) fail(ErrorCode::InvalidArgument, "bad n range");
  std::vector<RatioRow> rows(static_cast<std::size_t>(n_hi - n_lo + 1));
  detail::parallel_for(rows.size(), static_cast<unsigned>(std::max(threads, 0)),
                       [&](std::size_t i) { rows[i] = make_row(spec, alpha, n_lo + static_cast<int>(i)); });
  for (RatioRow& r : rows)
    if (r.ratio_error && r.n > 1) {
      const Real n = Real::with_bits(long(r.n), spec.bits);
      r.scaled = *r.ratio_error * n / log(n);
    }
  return rows;
}

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) fail(ErrorCode::InvalidArgument, "need two or more paired points");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) sx += xs[i], sy += ys[i];
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0) fail(ErrorCode::InvalidArgument, "degenerate abscissae");
  return sxy / sxx;
}

namespace {

std::string opt_sci(const std::optional<Real>& x, int digits) { return x ? to_sci(*x, digits) : std::string(); }

int row_digits(const RatioRow& r) { return digits_for_bits(r.gamma.bits()); }

}  // namespace

void write_ratio_csv(std::ostream& os, const std::vector<RatioRow>& rows) {
  os << "n,alpha,gamma_computed,gamma_predicted,ratio,ratio_error,quotient,scaled_error,method\n";
  for (const RatioRow& r : rows) {
    const int d = row_digits(r);
    os << r.n << ',' << to_sci(r.alpha, d) << ',' << to_sci(r.gamma, d) << ',' << to_sci(r.predicted, d) << ','
       << opt_sci(r.ratio, d) << ',' << opt_sci(r.ratio_error, d) << ',' << opt_sci(r.quotient, d) << ','
       << opt_sci(r.scaled, d) << ',' << to_string(r.method) << '\n';
  }
}

std::string ratio_json(const std::vector<RatioRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const RatioRow& r : rows) {
    const int d = row_digits(r);
    auto opt = [&](const std::optional<Real>& x) { return x ? nlohmann::json(to_sci(*x, d)) : nlohmann::json(); };
    out.push_back({{"n", r.n},
                   {"alpha", to_sci(r.alpha, d)},
                   {"gamma_computed", to_sci(r.gamma, d)},
                   {"gamma_predicted", to_sci(r.predicted, d)},
                   {"ratio", opt(r.ratio)},
                   {"ratio_error", opt(r.ratio_error)},
                   {"quotient", opt(r.quotient)},
                   {"scaled_error", opt(r.scaled)},
                   {"method", std::string(to_string(r.method))}});
  }
  return out.dump();
}

Real inner_walk_sum(int n, Bits bits) {
  check_n(n, 1);
  Real s = Real::zero(bits);
  for (int i = 1; i < n; ++i) s += Real::with_bits(1L, bits) / (4L * i * (n - i));
  return s;
}

Real outer_walk_sum(int n, Bits bits) {
  // Outside (0, n) the terms pair up as 2 sum_k 1/(4k(n+k)) = H_n / (2n).
  Real h = Real::zero(bits);
  for (int k = 1; k <= n; ++k) h += Real::with_bits(1L, bits) / k;
  return inner_walk_sum(n, bits) + h / (2L * n);
}

Real walk_ratio(int n, const std::vector<int>& steps, const Real& z) {
  check_n(n, 1);
  Real r = Real::with_bits(1L, z.bits());
  long at = -n, total = 0;
  for (int s : steps) {
    if (s <= 0 || s % 2) fail(ErrorCode::InvalidArgument, "positive walks have positive even steps");
    total += s;
  }
  if (total != 2L * n) fail(ErrorCode::InvalidArgument, "steps must sum to 2n");
  for (std::size_t s = 0; s + 1 < steps.size(); ++s) {
    at += steps[s];
    r /= 1 + z / (long(n) * n - at * at);
  }
  return r;
}

std::pair<Real, Real> walk_ratio_bracket(int n, const Real& z) {
  check_n(n, 3);
  const Bits bits = z.bits();
  const Real ln = log(Real::with_bits(long(n), bits)) / n;
  if (z.sign() >= 0) return {1 - z * ln, 1 - z * ln / 4};
  const Real az = abs(z);
  return {1 + az * ln / 2, 1 + az * ln * 2};
}

}  // namespace hillgap
