#pragma once

// Periodic / antiperiodic eigenvalues of L = -d^2/dx^2 + v through truncated
// Fourier matrices.  On the lattice k in 2Z (Per+) or 2Z-1 (Per-), |k| <= M,
// the matrix has diagonal k^2 and entries V(k - m); for a trigonometric
// polynomial it is a Hermitian Toeplitz-plus-diagonal band of half-width K.
//
// Eigenvalues come from bisection on inertia counts: the number of negative
// pivots in the banded LDL^H factorization of A - sigma I equals the number of
// eigenvalues below sigma (Sylvester).

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "hillgap/numeric.hpp"
#include "hillgap/potential.hpp"

namespace hillgap {

enum class Parity { PerPlus, PerMinus };
enum class Method { Matrix, Series, Qes };

std::string_view to_string(Parity parity) noexcept;
std::string_view to_string(Method method) noexcept;

/// Parity whose spectrum holds lambda_n^{+-}: even n periodic, odd n antiperiodic.
inline Parity parity_of(int n) noexcept { return n % 2 == 0 ? Parity::PerPlus : Parity::PerMinus; }

class TruncatedOperator {
 public:
  Parity parity() const noexcept { return parity_; }
  int M() const noexcept { return M_; }
  int half_bandwidth() const noexcept { return K_; }
  Bits bits() const noexcept { return bits_; }
  int dim() const noexcept { return static_cast<int>(sites_.size()); }
  /// Lattice sites in ascending order.
  const std::vector<int>& sites() const noexcept { return sites_; }
  /// All coefficients of the band have zero imaginary part.
  bool is_real() const noexcept { return real_; }

  /// A(i, j) = k_i^2 delta_ij + V(k_i - k_j); zero outside the band.
  Complex entry(int i, int j) const;
  /// V(2d), the entry A(i + d, i) below the diagonal, d = 1..K.
  const Complex& lower(int d) const { return lower_[d - 1]; }

  /// Number of eigenvalues strictly below sigma.
  long count_below(const Real& sigma) const;
  /// Eigenvalue `index` (0-based, ascending) to bisection tolerance.
  Real eigenvalue(int index) const;
  /// Upper bound on the spectral norm of the off-diagonal part.
  const Real& offdiag_bound() const noexcept { return radius_; }

 private:
  friend TruncatedOperator build_truncated(const Potential& v, Parity parity, int M, std::optional<Bits> bits);

  template <typename T>
  long count_below_impl(const std::vector<T>& lower, const Real& sigma) const;

  Parity parity_ = Parity::PerPlus;
  int M_ = 0;
  int K_ = 0;
  Bits bits_ = 0;
  std::vector<int> sites_;
  std::vector<Complex> lower_;
  std::vector<Real> lower_re_;
  bool real_ = true;
  Real radius_;
  Real pivmin_;
};

/// Requires the real-valued flag and M >= degree_bound.  Entries are rounded to
/// `bits` (default: the potential's precision).
TruncatedOperator build_truncated(const Potential& v, Parity parity, int M, std::optional<Bits> bits = {});

/// All eigenvalues, ascending.
std::vector<Real> eigenvalues(const TruncatedOperator& op);

/// Eigenvalues of op in the half-open interval [a, b).
long count_in_interval(const TruncatedOperator& op, const Real& a, const Real& b);

struct SpectrumSlice {
  int n = 0;
  Real lambda_minus;
  Real lambda_plus;
  Real gamma;
  Method method = Method::Matrix;
  int M_used = 0;
  Bits precision_bits = 0;
  /// gamma below 2^-(precision_bits - 8) n^2.
  bool degenerate = false;
  /// Set when the localization bound was checked (||v|| <= 1/4).
  std::optional<bool> localized;
};

struct SpectrumOptions {
  std::optional<Bits> precision_bits;
  /// Hard ceiling for truncation doubling.
  int max_M = 4096;
  /// Worker threads for independent eigenvalues; 0 picks hardware concurrency.
  unsigned threads = 0;
};

struct SpectrumResult {
  std::vector<SpectrumSlice> slices;
  Real lambda0;
  std::optional<bool> lambda0_localized;
  int M_used = 0;
  Bits precision_bits = 0;
};

/// Working precision used by spectrum_slices when none is requested:
/// 64 + ceil(n_max log2(2/|alpha|)) + 4 n_max for two-term potentials, else 128.
Bits default_spectrum_precision(const Potential& v, int n_max);

/// Slices n = 1..n_max.  Truncation doubles from max(2 n_max, degree_bound + 16)
/// until every gamma_n moves by at most rel_tol * max(gamma_n, 2^-(p-8) n^2).
SpectrumResult spectrum_slices(const Potential& v, int n_max, const Real& rel_tol, const SpectrumOptions& opts = {});

/// |lambda_n^{+-} - n^2| <= 4 norm.  Throws HypothesisNotMet when norm > 1/4.
bool localization_check(const SpectrumSlice& slice, const Real& norm);

/// Smallest n0 such that (n^2 - 1, n^2 + 1) holds exactly two eigenvalues of
/// the matching parity for every n0 <= n <= n_max; nullopt when n_max fails.
std::optional<int> empirical_n0(const Potential& v, int n_max, std::optional<Bits> bits = {});

/// sum over k in n + 2Z, k != +-n, |k| <= cutoff of 1 / |lambda - k^2|^2.
Real offdisc_resolvent_sum(int n, const Real& lambda, int cutoff);

void write_slices_csv(std::ostream& os, const std::vector<SpectrumSlice>& slices);

}  // namespace hillgap
