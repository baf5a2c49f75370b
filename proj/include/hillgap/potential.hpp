#pragma once

// Pi-periodic trigonometric-polynomial potentials
//
//   v(x) = sum_m V(m) exp(i m x),   m even,   V(0) = 0,
//
// stored sparsely by frequency.  Constructors cover the two-term
// (Whittaker-Hill) parametrization V(+-2) = -2 alpha t, V(+-4) = -alpha^2, the
// coefficient-pair form a1 e^{2ix} + a2 e^{4ix} + c.c., and the Mathieu
// potential 2a cos 2x.

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "hillgap/numeric.hpp"

namespace hillgap {

enum class Regime { BothReal, BothImaginary, GeneralComplex };

std::string_view to_string(Regime regime) noexcept;
Regime regime_from_string(std::string_view text);

struct TwoTermParams {
  Complex alpha;
  Complex t;
  Regime regime = Regime::BothReal;

  /// Throws InvalidArgument when alpha/t violate the declared regime.
  void validate() const;
};

/// How a potential was built; consulted by the default precision rule.
struct Provenance {
  std::optional<TwoTermParams> two_term;
  std::optional<Complex> a1;
  std::optional<Complex> a2;
  int scale = 1;
};

class Potential {
 public:
  /// Validates keys (even, V(0) = 0) and drops exactly-zero entries.
  /// Coefficients are rounded to `bits`.
  Potential(const std::map<int, Complex>& coeffs, Bits bits, Provenance provenance = {});

  static Potential zero(Bits bits);

  const std::map<int, Complex>& coeffs() const noexcept { return coeffs_; }
  /// V(m), zero when absent.
  Complex coeff(int m) const;
  /// Pointer to V(m) or nullptr.
  const Complex* find(int m) const;

  Bits precision_bits() const noexcept { return bits_; }
  const Provenance& provenance() const noexcept { return provenance_; }

  /// Largest |m| with V(m) != 0; 0 for the zero potential.
  int degree_bound() const noexcept { return degree_bound_; }
  /// K = degree_bound / 2, the band half-width in lattice steps of 2.
  int half_bandwidth() const noexcept { return degree_bound_ / 2; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  /// V(-m) == conj(V(m)) for all m.
  bool is_real_valued() const noexcept { return real_valued_; }
  /// Every stored coefficient has zero imaginary part.
  bool has_real_coefficients() const noexcept { return real_coefficients_; }

  Real l2_norm_squared() const;
  Real l2_norm() const;

  /// m^2 v(m x): V~(m k) = m^2 V(k).
  Potential scale_by(int m) const;

  std::string to_json() const;
  static Potential from_json(std::string_view text);

  /// Coefficients and precision; provenance is metadata and not compared.
  friend bool operator==(const Potential& a, const Potential& b);

 private:
  std::map<int, Complex> coeffs_;
  Bits bits_;
  Provenance provenance_;
  int degree_bound_ = 0;
  bool real_valued_ = true;
  bool real_coefficients_ = true;
};

Potential from_two_term(const TwoTermParams& p, Bits bits = default_precision());
Potential from_coeff_pair(const Complex& a1, const Complex& a2, Bits bits = default_precision());
/// 2a cos 2x, i.e. V(+-2) = a.
Potential mathieu(const Real& a, Bits bits = default_precision());

}  // namespace hillgap
