#pragma once

// Closed-form gap predictions and convergence-ratio diagnostics.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hillgap/numeric.hpp"
#include "hillgap/potential.hpp"
#include "hillgap/spectrum.hpp"

namespace hillgap {

enum class PredictionRegime { AlphaToZero, NToInfty, CoeffForm, MathieuSmallA, MathieuLargeN };
std::string_view to_string(PredictionRegime regime) noexcept;
PredictionRegime prediction_regime_from_string(std::string_view text);

struct GapPrediction {
  int n = 0;
  Real value;
  PredictionRegime regime = PredictionRegime::AlphaToZero;
  std::vector<std::pair<std::string, Complex>> inputs;
};

/// n! and n!! at the given precision; exact below 65, log-gamma above.
Real factorial(long n, Bits bits);
Real double_factorial(long n, Bits bits);
/// log n! and log n!! (log-gamma sums).
Real log_factorial(long n, Bits bits);
Real log_double_factorial(long n, Bits bits);

/// |P_n(t) alpha^n| from the product formulas.
GapPrediction predict_alpha_to_zero(const Complex& alpha, const Complex& t, int n);
/// 8|alpha|^n / (2^n ((n-2)!!)^2) times |cos(pi t/2)| (even n) or (2/pi)|sin(pi t/2)| (odd n).
GapPrediction predict_n_to_infty(const Complex& alpha, const Complex& t, int n);
/// The same leading term written in the coefficients a1 = V(2), a2 = V(4).
GapPrediction predict_coeff_form(const Complex& a1, const Complex& a2, int n);
/// 8 (|a|/4)^n / ((n-1)!)^2 for V(+-2) = a; regime is MathieuSmallA or MathieuLargeN.
GapPrediction predict_mathieu(const Real& a, int n, PredictionRegime regime = PredictionRegime::MathieuSmallA);

enum class GapMethod { Auto, Matrix, Series };
std::string_view to_string(GapMethod method) noexcept;
GapMethod gap_method_from_string(std::string_view text);

/// gamma_n by the series when 9||v|| <= n (or forced), else by the matrix method.
SpectrumSlice compute_gap(const Potential& v, int n, GapMethod method, const Real& rel_tol, Bits bits);

struct RatioSpec {
  enum class Family { TwoTerm, Mathieu } family = Family::TwoTerm;
  Complex t;  // two-term only
  Regime regime = Regime::BothReal;
  PredictionRegime prediction = PredictionRegime::AlphaToZero;
  GapMethod method = GapMethod::Auto;
  Bits bits = 192;
  Real rel_tol = Real(1e-12);
};

struct RatioRow {
  int n = 0;
  Real alpha;
  Real gamma;
  Real predicted;
  Method method = Method::Matrix;
  /// Empty when the prediction vanishes (indeterminate).
  std::optional<Real> ratio;
  std::optional<Real> ratio_error;  // |ratio - 1|
  /// Ladder: previous ratio_error / this ratio_error.
  std::optional<Real> quotient;
  /// Over n: ratio_error n / log n.
  std::optional<Real> scaled;
};

GapPrediction predict_for(const RatioSpec& spec, const Real& alpha, int n);
Potential potential_for(const RatioSpec& spec, const Real& alpha);

/// Fixed n, alpha running down the ladder.
std::vector<RatioRow> ratio_ladder(const RatioSpec& spec, int n, const std::vector<Real>& alphas);
/// Fixed alpha, n = n_lo..n_hi.
std::vector<RatioRow> ratio_over_n(const RatioSpec& spec, const Real& alpha, int n_lo, int n_hi, int threads = 0);

/// Least-squares slope of ys against xs.
double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys);

void write_ratio_csv(std::ostream& os, const std::vector<RatioRow>& rows);
std::string ratio_json(const std::vector<RatioRow>& rows);

// Walk-sum bounds.

/// sum_{0<i<n} 1 / (n^2 - (n-2i)^2).
Real inner_walk_sum(int n, Bits bits);
/// sum_{i != 0, n} |1 / (n^2 - (n-2i)^2)|, over all integers i.
Real outer_walk_sum(int n, Bits bits);
/// B_n(xi, z) / B_n(xi, 0) for a positive walk given by its steps.
Real walk_ratio(int n, const std::vector<int>& steps, const Real& z);
/// The stated bracket for B_n(xi, z)/B_n(xi, 0): z >= 0 uses [1 - z log n/n, 1 - z log n/(4n)],
/// z < 0 uses [1 + |z| log n/(2n), 1 + 2|z| log n/n].
std::pair<Real, Real> walk_ratio_bracket(int n, const Real& z);

}  // namespace hillgap
