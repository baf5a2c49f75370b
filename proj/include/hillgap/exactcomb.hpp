#pragma once

// Exact combinatorics of positive walks.  A positive walk from -n to n is a
// composition of 2n into even parts; its intermediate vertices are the partial
// sums j_s = -n + x_1 + ... + x_s.  The leading small-alpha term of gamma_n is
//
//   P_n alpha^n = 2 sum_{walks} prod(step weights) / prod_s (n^2 - j_s^2),
//
// evaluated here over exact rationals.

#include <gmpxx.h>

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace hillgap {

struct Walk {
  std::vector<int> steps;  // positive even steps summing to 2n
  /// Intermediate vertices j_1..j_nu (endpoints -n, n excluded).
  std::vector<int> vertices(int n) const;
};

/// Streams every composition of 2n into parts {2, 4, .., 2K} exactly once, in
/// lexicographic order of the step sequence.  The visitor sees a reused buffer.
void enumerate_positive_walks(int n, int K, const std::function<void(const Walk&)>& visit);
/// Number of such compositions.
mpz_class count_positive_walks(int n, int K);

/// Exact multivariate polynomial with rational coefficients.  Monomials are
/// exponent vectors of a fixed length; zero coefficients are never stored.
class GapPolynomial {
 public:
  using Exponents = std::vector<int>;

  GapPolynomial() = default;
  GapPolynomial(int n, int variables) : n_(n), vars_(variables) {}

  int n() const noexcept { return n_; }
  /// The polynomial multiplies alpha^n.
  int alpha_power() const noexcept { return n_; }
  int variables() const noexcept { return vars_; }
  const std::map<Exponents, mpq_class>& terms() const noexcept { return terms_; }

  void add(const Exponents& e, const mpq_class& c);
  mpq_class coeff(const Exponents& e) const;
  /// Univariate convenience: coefficient of t^d.
  mpq_class coeff(int d) const { return coeff(Exponents{d}); }
  /// Total degree of the leading monomial; -1 for the zero polynomial.
  int degree() const;
  bool is_zero() const noexcept { return terms_.empty(); }

  mpq_class evaluate(const std::vector<mpq_class>& at) const;

  GapPolynomial operator*(const GapPolynomial& other) const;
  GapPolynomial& operator*=(const mpq_class& c);
  friend bool operator==(const GapPolynomial& a, const GapPolynomial& b) { return a.vars_ == b.vars_ && a.terms_ == b.terms_; }

  /// {"n": n, "terms": [[e_1, .., e_v, "num/den"], ...]}, terms ascending by exponent.
  std::string to_json() const;
  /// Human-readable expansion in t (univariate) or t1..t{v}.
  std::string to_string() const;

 private:
  int n_ = 0;
  int vars_ = 1;
  std::map<Exponents, mpq_class> terms_;
};

/// C_n = 8 (-1)^n / (2^n ((n-1)!)^2), the leading coefficient of P_n.
mpq_class leading_coefficient(int n);

/// P_n(t) by walk enumeration with step weights 2 -> -2t, 4 -> -1.
GapPolynomial p_polynomial_exact(int n);

/// P_n(t) from the product formulas
///   P_{2m} = C_{2m} prod_{k=1..m} (t^2 - (2k-1)^2),
///   P_{2m-1} = C_{2m-1} t prod_{k=1..m-1} (t^2 - (2k)^2).
GapPolynomial p_polynomial_closed(int n);

/// Multivariate P_n(t_1, .., t_{K-1}) for a_k = t_k alpha^k (a_K = alpha^K):
/// 2 sum over walks with steps 2..2K of prod t_{step/2} / prod (n^2 - j_s^2).
/// K = 1 yields a constant polynomial in zero variables.
GapPolynomial p_polynomial_general(int n, int K);

enum class IdentityParity { Even, Odd };

struct IdentitySides {
  mpz_class lhs;
  mpz_class rhs;
};

/// Both sides of the integer identities behind the coefficients of P_n.
/// Even: sum over -m < i_1 < .. < i_k < m with gaps >= 2 of prod (m^2 - i_s^2)
///       versus sum over 1 <= j_1 < .. < j_k <= m of prod (2j_s - 1)^2.
/// Odd:  sum over -m+1 < i_1 < .. < i_k < m with gaps >= 2 of
///       prod ((2m-1)^2 - (2i_s-1)^2) versus sum over j <= m-1 of prod (4j_s)^2.
/// Throws RangeError unless 1 <= k <= m (even) or 1 <= k <= m-1 (odd).
IdentitySides identity_sides(int m, int k, IdentityParity parity);

/// CSV header plus one certificate row per k for the given m.
void write_identity_csv(std::ostream& os, int m, IdentityParity parity, bool header = true);

}  // namespace hillgap
