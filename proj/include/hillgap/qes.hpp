#pragma once

// Recurrences for u = y e^{-alpha cos 2x}.  With
// v = -(4 alpha t cos 2x + 2 alpha^2 cos 4x), the periodic and antiperiodic
// problems split into four tridiagonal recurrences on cosine/sine
// coefficients; eigenvalues mu map back by lambda = mu - 2 alpha^2.

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "hillgap/numeric.hpp"

namespace hillgap {

enum class Symmetry { PerEvenCos, PerOddSin, AntiCos, AntiSin };
std::string_view to_string(Symmetry s) noexcept;

struct RecurrenceSystem {
  Symmetry symmetry = Symmetry::PerEvenCos;
  Real alpha;
  Real t;
  int M = 0;
  std::vector<int> ks;   // lattice index of each retained coefficient
  std::vector<Real> sub;    // sub[i]: coefficient of the (i-1)-th unknown in row i; sub[0] = 0
  std::vector<Real> diag;   // includes k^2 and the first-row alpha terms
  std::vector<Real> super;  // super[i]: coefficient of the (i+1)-th unknown in row i; last = 0

  /// Dense matrix T with (T A)_i = mu A_i.
  std::vector<std::vector<Real>> dense() const;
};

/// M >= 4 retained coefficients: k = 0,2,.. (PerEvenCos), 2,4,.. (PerOddSin), 1,3,.. (anti).
RecurrenceSystem build_recurrence(Symmetry symmetry, const Real& alpha, const Real& t, int M);

/// Eigenvalues of a real upper Hessenberg matrix by Francis double-shift QR.
/// Returns (re, im) pairs in the order found.
std::vector<std::pair<Real, Real>> hessenberg_eigenvalues(std::vector<std::vector<Real>> h);

/// Ascending real mu values; ComplexLeak if an imaginary part exceeds
/// 2^-(p/2) max(1, |mu|).
std::vector<Real> mu_spectrum(const RecurrenceSystem& sys);

/// lambda = mu - 2 alpha^2.
std::vector<Real> lambda_spectrum(const RecurrenceSystem& sys);

/// The first `count` lambda values of one symmetry class, growing M until
/// they settle to 2^-(p-16) relative.
std::vector<Real> qes_lambdas(Symmetry symmetry, const Real& alpha, const Real& t, int count);

/// lambda_n^-, lambda_n^+ and gamma_n from the pair of recurrences of the parity of n.
struct QesGap {
  int n = 0;
  Real lambda_minus;
  Real lambda_plus;
  Real gamma;
};
std::vector<QesGap> qes_gaps(const Real& alpha, const Real& t, int n_max);

/// Size of the invariant leading block at positive integer t (0 when the
/// lattice of the symmetry never meets k = t - 1).
int leading_block_size(Symmetry symmetry, long t);

/// Exact determinant of the leading block, keyed by (power of alpha, power of mu).
using BivariatePoly = std::map<std::pair<int, int>, mpq_class>;
BivariatePoly leading_block_determinant(Symmetry symmetry, long t);

struct ScanRow {
  int n = 0;
  std::string method;  // "matrix" or "qes"
  Real gamma;
  bool closed = false;
  bool expected_closed = false;  // n >= |t| + 1 with the parity opposite to t
};

struct ScanReport {
  Real alpha;
  long t = 0;
  Real tol;
  std::vector<ScanRow> rows;
};

/// gamma_n for n <= n_max of the parity opposite to t, by the matrix method and
/// the recurrences, with a closed/open verdict at tol (default 2^-(p/2)).
ScanReport closed_gap_scan(const Real& alpha, long t, int n_max, const Real& tol);
ScanReport closed_gap_scan(const Real& alpha, long t, int n_max);

void write_scan_csv(std::ostream& os, const ScanReport& report);
std::string scan_json(const ScanReport& report);

}  // namespace hillgap
