#pragma once

// Arbitrary-precision real and complex scalars backed by MPFR.
//
// Every Real carries its own precision in bits.  Binary operations produce a
// result at the larger of the operand precisions; operations with builtin
// integers or doubles keep the precision of the Real operand.  Values
// constructed without an explicit precision use the calling thread's default
// precision, which PrecisionScope adjusts for the lifetime of a scope.

#include <mpfr.h>

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace hillgap {

using Bits = mpfr_prec_t;

Bits default_precision() noexcept;

/// Sets the thread-local default precision and restores the previous value on exit.
class PrecisionScope {
 public:
  explicit PrecisionScope(Bits bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  Bits saved_;
};

class Real {
 public:
  Real() : Real(zero(default_precision())) {}
  template <std::integral I>
  Real(I value) {  // NOLINT(google-explicit-constructor)
    mpfr_init2(v_, default_precision());
    if constexpr (std::is_signed_v<I>)
      mpfr_set_si(v_, static_cast<long>(value), MPFR_RNDN);
    else
      mpfr_set_ui(v_, static_cast<unsigned long>(value), MPFR_RNDN);
  }
  Real(double value) {  // NOLINT(google-explicit-constructor)
    mpfr_init2(v_, default_precision());
    mpfr_set_d(v_, value, MPFR_RNDN);
  }

  static Real zero(Bits bits);
  static Real with_bits(long value, Bits bits);
  static Real with_bits(double value, Bits bits);
  /// Parses a decimal (or "inf"/"nan") literal, rounding to nearest at `bits`.
  static Real parse(std::string_view text, Bits bits);
  static Real pi(Bits bits);
  static Real log2_const(Bits bits);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  Bits bits() const noexcept { return mpfr_get_prec(v_); }
  /// Copy rounded to a new precision.
  Real rounded_to(Bits bits) const;

  mpfr_ptr raw() noexcept { return v_; }
  mpfr_srcptr raw() const noexcept { return v_; }

  double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const noexcept { return mpfr_get_si(v_, MPFR_RNDN); }
  bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const noexcept { return mpfr_number_p(v_) != 0; }
  int sign() const noexcept { return mpfr_sgn(v_); }
  /// Binary exponent e with 0.5 <= |x| / 2^e < 1; very negative for zero.
  long exponent2() const noexcept;

  Real& operator+=(const Real& rhs);
  Real& operator-=(const Real& rhs);
  Real& operator*=(const Real& rhs);
  Real& operator/=(const Real& rhs);
  template <std::integral I>
  Real& operator+=(I rhs) { return add_si(static_cast<long>(rhs)); }
  template <std::integral I>
  Real& operator-=(I rhs) { return add_si(-static_cast<long>(rhs)); }
  template <std::integral I>
  Real& operator*=(I rhs) { return mul_si(static_cast<long>(rhs)); }
  template <std::integral I>
  Real& operator/=(I rhs) { return div_si(static_cast<long>(rhs)); }
  Real operator-() const;

 private:
  Real& add_si(long rhs);
  Real& mul_si(long rhs);
  Real& div_si(long rhs);

  struct Uninit {};
  Real(Uninit, Bits bits) { mpfr_init2(v_, bits); }
  friend Real make_uninit(Bits bits);

  mpfr_t v_;
};

Real make_uninit(Bits bits);

inline Bits max_bits(const Real& a, const Real& b) { return std::max(a.bits(), b.bits()); }

Real operator+(const Real& a, const Real& b);
Real operator-(const Real& a, const Real& b);
Real operator*(const Real& a, const Real& b);
Real operator/(const Real& a, const Real& b);
Real operator+(Real&& a, const Real& b);
Real operator-(Real&& a, const Real& b);
Real operator*(Real&& a, const Real& b);
Real operator/(Real&& a, const Real& b);

// Integral operands keep the Real operand's precision.  Taking the Real by
// value avoids ambiguity with the rvalue overloads above.
template <std::integral I>
Real operator*(Real a, I b) { a *= static_cast<long>(b); return a; }
template <std::integral I>
Real operator*(I a, Real b) { b *= static_cast<long>(a); return b; }
template <std::integral I>
Real operator/(Real a, I b) { a /= static_cast<long>(b); return a; }
template <std::integral I>
Real operator+(Real a, I b) { a += static_cast<long>(b); return a; }
template <std::integral I>
Real operator+(I a, Real b) { b += static_cast<long>(a); return b; }
template <std::integral I>
Real operator-(Real a, I b) { a -= static_cast<long>(b); return a; }
template <std::integral I>
Real operator-(I a, Real b) { b -= static_cast<long>(a); return -b; }
template <std::integral I>
Real operator/(I a, const Real& b) { return Real::with_bits(static_cast<long>(a), b.bits()) / b; }

int compare(const Real& a, const Real& b) noexcept;
int compare(const Real& a, long b) noexcept;
int compare(const Real& a, double b) noexcept;

inline bool operator==(const Real& a, const Real& b) noexcept { return mpfr_equal_p(a.raw(), b.raw()) != 0; }
inline bool operator<(const Real& a, const Real& b) noexcept { return compare(a, b) < 0; }
inline bool operator>(const Real& a, const Real& b) noexcept { return compare(a, b) > 0; }
inline bool operator<=(const Real& a, const Real& b) noexcept { return compare(a, b) <= 0; }
inline bool operator>=(const Real& a, const Real& b) noexcept { return compare(a, b) >= 0; }

template <typename S>
  requires std::integral<S> || std::floating_point<S>
inline int compare_scalar(const Real& a, S b) noexcept {
  if constexpr (std::integral<S>) return compare(a, static_cast<long>(b));
  else return compare(a, static_cast<double>(b));
}
template <typename S> requires std::integral<S> || std::floating_point<S>
bool operator<(const Real& a, S b) noexcept { return compare_scalar(a, b) < 0; }
template <typename S> requires std::integral<S> || std::floating_point<S>
bool operator>(const Real& a, S b) noexcept { return compare_scalar(a, b) > 0; }
template <typename S> requires std::integral<S> || std::floating_point<S>
bool operator<=(const Real& a, S b) noexcept { return compare_scalar(a, b) <= 0; }
template <typename S> requires std::integral<S> || std::floating_point<S>
bool operator>=(const Real& a, S b) noexcept { return compare_scalar(a, b) >= 0; }
template <typename S> requires std::integral<S> || std::floating_point<S>
bool operator==(const Real& a, S b) noexcept { return compare_scalar(a, b) == 0; }

Real abs(const Real& x);
Real sqrt(const Real& x);
Real log(const Real& x);
Real exp(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real sinh(const Real& x);
Real cosh(const Real& x);
Real pow(const Real& x, long k);
Real ldexp(const Real& x, long e);
Real min(const Real& a, const Real& b);
Real max(const Real& a, const Real& b);
/// log Gamma(x) for x > 0.
Real lgamma(const Real& x);
/// 2^-e at the given precision.
Real exp2_neg(long e, Bits bits);

/// Decimal digits needed to round-trip a value of `bits` precision.
int digits_for_bits(Bits bits);
/// Scientific notation with `digits` significant digits, e.g. "1.2500000e-03".
std::string to_sci(const Real& x, int digits);
/// Scientific notation with the round-trip digit count of x's precision.
std::string to_sci(const Real& x);

std::ostream& operator<<(std::ostream& os, const Real& x);

/// Complex number with Real parts; both parts share one precision.
struct Complex {
  Real re;
  Real im;

  Complex() = default;
  Complex(Real r) : re(std::move(r)), im(Real::zero(re.bits())) {}  // NOLINT
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  static Complex zero(Bits bits) { return {Real::zero(bits), Real::zero(bits)}; }

  Bits bits() const noexcept { return std::max(re.bits(), im.bits()); }
  bool is_zero() const noexcept { return re.is_zero() && im.is_zero(); }
  bool is_real() const noexcept { return im.is_zero(); }

  Complex& operator+=(const Complex& rhs);
  Complex& operator-=(const Complex& rhs);
  Complex& operator*=(const Complex& rhs);
  Complex& operator*=(const Real& rhs);
  Complex& operator/=(const Real& rhs);
  Complex operator-() const { return {-re, -im}; }
};

Complex operator+(const Complex& a, const Complex& b);
Complex operator-(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Real& b);
Complex operator*(const Real& a, const Complex& b);
Complex operator/(const Complex& a, const Complex& b);
Complex operator/(const Complex& a, const Real& b);
inline bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }

Complex conj(const Complex& z);
Real abs(const Complex& z);
/// |z|^2
Real norm(const Complex& z);
Complex pow(const Complex& z, long k);
/// cos and sin of a complex argument through their exponential definitions.
Complex cos(const Complex& z);
Complex sin(const Complex& z);

}  // namespace hillgap
