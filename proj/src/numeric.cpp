#include "hillgap/numeric.hpp"

#include <cmath>
#include <cstring>
#include <ostream>
#include <stdexcept>

namespace hillgap {

namespace {

thread_local Bits g_default_bits = 128;

constexpr mpfr_rnd_t kRnd = MPFR_RNDN;

}  // namespace

Bits default_precision() noexcept { return g_default_bits; }

PrecisionScope::PrecisionScope(Bits bits) : saved_(g_default_bits) {
  if (bits < MPFR_PREC_MIN || bits > MPFR_PREC_MAX)
    throw std::invalid_argument("precision out of range");
  g_default_bits = bits;
}

PrecisionScope::~PrecisionScope() { g_default_bits = saved_; }

Real make_uninit(Bits bits) { return Real(Real::Uninit{}, bits); }

Real Real::zero(Bits bits) {
  Real r = make_uninit(bits);
  mpfr_set_zero(r.v_, 1);
  return r;
}

Real Real::with_bits(long value, Bits bits) {
  Real r = make_uninit(bits);
  mpfr_set_si(r.v_, value, kRnd);
  return r;
}

Real Real::with_bits(double value, Bits bits) {
  Real r = make_uninit(bits);
  mpfr_set_d(r.v_, value, kRnd);
  return r;
}

Real Real::parse(std::string_view text, Bits bits) {
  std::string s(text);
  Real r = make_uninit(bits);
  char* end = nullptr;
  mpfr_strtofr(r.v_, s.c_str(), &end, 10, kRnd);
  if (s.empty() || end == s.c_str() || *end != '\0')
    throw std::invalid_argument("not a real number: '" + s + "'");
  return r;
}

Real Real::pi(Bits bits) {
  Real r = make_uninit(bits);
  mpfr_const_pi(r.v_, kRnd);
  return r;
}

Real Real::log2_const(Bits bits) {
  Real r = make_uninit(bits);
  mpfr_const_log2(r.v_, kRnd);
  return r;
}

Real::Real(const Real& other) {
  mpfr_init2(v_, other.bits());
  mpfr_set(v_, other.v_, kRnd);
}

Real::Real(Real&& other) noexcept {
  std::memcpy(v_, other.v_, sizeof(mpfr_t));
  other.v_->_mpfr_d = nullptr;
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    if (v_->_mpfr_d == nullptr) {
      mpfr_init2(v_, other.bits());
    } else if (bits() != other.bits()) {
      mpfr_set_prec(v_, other.bits());
    }
    mpfr_set(v_, other.v_, kRnd);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  if (this != &other) {
    if (v_->_mpfr_d == nullptr) {
      std::memcpy(v_, other.v_, sizeof(mpfr_t));
      other.v_->_mpfr_d = nullptr;
    } else {
      mpfr_swap(v_, other.v_);
    }
  }
  return *this;
}

Real::~Real() {
  if (v_->_mpfr_d != nullptr) mpfr_clear(v_);
}

Real Real::rounded_to(Bits new_bits) const {
  Real r = make_uninit(new_bits);
  mpfr_set(r.v_, v_, kRnd);
  return r;
}

long Real::exponent2() const noexcept {
  if (!mpfr_regular_p(v_)) return mpfr_zero_p(v_) ? -(1L << 40) : (1L << 40);
  return mpfr_get_exp(v_);
}

namespace {

// Bring *this up to the precision of rhs before an in-place operation.
void widen(Real& x, const Real& rhs) {
  if (rhs.bits() > x.bits()) x = x.rounded_to(rhs.bits());
}

}  // namespace

Real& Real::operator+=(const Real& rhs) {
  widen(*this, rhs);
  mpfr_add(v_, v_, rhs.v_, kRnd);
  return *this;
}

Real& Real::operator-=(const Real& rhs) {
  widen(*this, rhs);
  mpfr_sub(v_, v_, rhs.v_, kRnd);
  return *this;
}

Real& Real::operator*=(const Real& rhs) {
  widen(*this, rhs);
  mpfr_mul(v_, v_, rhs.v_, kRnd);
  return *this;
}

Real& Real::operator/=(const Real& rhs) {
  widen(*this, rhs);
  mpfr_div(v_, v_, rhs.v_, kRnd);
  return *this;
}

Real& Real::add_si(long rhs) {
  mpfr_add_si(v_, v_, rhs, kRnd);
  return *this;
}

Real& Real::mul_si(long rhs) {
  mpfr_mul_si(v_, v_, rhs, kRnd);
  return *this;
}

Real& Real::div_si(long rhs) {
  mpfr_div_si(v_, v_, rhs, kRnd);
  return *this;
}

Real Real::operator-() const {
  Real r = make_uninit(bits());
  mpfr_neg(r.v_, v_, kRnd);
  return r;
}

#define HILLGAP_BINOP(op, fn)                                   \
  Real operator op(const Real& a, const Real& b) {              \
    Real r = make_uninit(max_bits(a, b));                       \
    fn(r.raw(), a.raw(), b.raw(), kRnd);                        \
    return r;                                                   \
  }                                                             \
  Real operator op(Real&& a, const Real& b) {                   \
    if (a.bits() >= b.bits()) {                                 \
      fn(a.raw(), a.raw(), b.raw(), kRnd);                      \
      return std::move(a);                                      \
    }                                                           \
    return static_cast<const Real&>(a) op b;                    \
  }

HILLGAP_BINOP(+, mpfr_add)
HILLGAP_BINOP(-, mpfr_sub)
HILLGAP_BINOP(*, mpfr_mul)
HILLGAP_BINOP(/, mpfr_div)

#undef HILLGAP_BINOP

int compare(const Real& a, const Real& b) noexcept { return mpfr_cmp(a.raw(), b.raw()); }
int compare(const Real& a, long b) noexcept { return mpfr_cmp_si(a.raw(), b); }
int compare(const Real& a, double b) noexcept { return mpfr_cmp_d(a.raw(), b); }

#define HILLGAP_UNARY(name, fn)           \
  Real name(const Real& x) {              \
    Real r = make_uninit(x.bits());       \
    fn(r.raw(), x.raw(), kRnd);           \
    return r;                             \
  }

HILLGAP_UNARY(abs, mpfr_abs)
HILLGAP_UNARY(sqrt, mpfr_sqrt)
HILLGAP_UNARY(log, mpfr_log)
HILLGAP_UNARY(exp, mpfr_exp)
HILLGAP_UNARY(sin, mpfr_sin)
HILLGAP_UNARY(cos, mpfr_cos)
HILLGAP_UNARY(sinh, mpfr_sinh)
HILLGAP_UNARY(cosh, mpfr_cosh)

#undef HILLGAP_UNARY

Real lgamma(const Real& x) {
  Real r = make_uninit(x.bits());
  mpfr_lngamma(r.raw(), x.raw(), kRnd);
  return r;
}

Real pow(const Real& x, long k) {
  Real r = make_uninit(x.bits());
  mpfr_pow_si(r.raw(), x.raw(), k, kRnd);
  return r;
}

Real ldexp(const Real& x, long e) {
  Real r = make_uninit(x.bits());
  mpfr_mul_2si(r.raw(), x.raw(), e, kRnd);
  return r;
}

Real min(const Real& a, const Real& b) { return a <= b ? a : b; }
Real max(const Real& a, const Real& b) { return a >= b ? a : b; }

Real exp2_neg(long e, Bits bits) {
  Real r = Real::with_bits(1L, bits);
  mpfr_mul_2si(r.raw(), r.raw(), -e, kRnd);
  return r;
}

int digits_for_bits(Bits bits) {
  return static_cast<int>(std::ceil(static_cast<double>(bits) * 0.30102999566398120)) + 1;
}

std::string to_sci(const Real& x, int digits) {
  if (digits < 1) digits = 1;
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", digits - 1, x.raw());
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

std::string to_sci(const Real& x) { return to_sci(x, digits_for_bits(x.bits())); }

std::ostream& operator<<(std::ostream& os, const Real& x) { return os << to_sci(x); }

// ---------------------------------------------------------------- Complex

Complex& Complex::operator+=(const Complex& rhs) {
  re += rhs.re;
  im += rhs.im;
  return *this;
}

Complex& Complex::operator-=(const Complex& rhs) {
  re -= rhs.re;
  im -= rhs.im;
  return *this;
}

Complex& Complex::operator*=(const Complex& rhs) {
  Real r = re * rhs.re - im * rhs.im;
  Real i = re * rhs.im + im * rhs.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

Complex& Complex::operator*=(const Real& rhs) {
  re *= rhs;
  im *= rhs;
  return *this;
}

Complex& Complex::operator/=(const Real& rhs) {
  re /= rhs;
  im /= rhs;
  return *this;
}

Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
Complex operator*(const Complex& a, const Complex& b) {
  Complex r = a;
  r *= b;
  return r;
}
Complex operator*(const Complex& a, const Real& b) { return {a.re * b, a.im * b}; }
Complex operator*(const Real& a, const Complex& b) { return {a * b.re, a * b.im}; }
Complex operator/(const Complex& a, const Real& b) { return {a.re / b, a.im / b}; }

Complex operator/(const Complex& a, const Complex& b) {
  Real d = norm(b);
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}

Complex conj(const Complex& z) { return {z.re, -z.im}; }

Real abs(const Complex& z) {
  Real r = make_uninit(z.bits());
  mpfr_hypot(r.raw(), z.re.raw(), z.im.raw(), kRnd);
  return r;
}

Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }

Complex pow(const Complex& z, long k) {
  if (k < 0) return Complex(Real::with_bits(1L, z.bits())) / pow(z, -k);
  Complex result(Real::with_bits(1L, z.bits()));
  Complex base = z;
  while (k > 0) {
    if (k & 1) result *= base;
    base *= base;
    k >>= 1;
  }
  return result;
}

Complex cos(const Complex& z) {
  // cos(x+iy) = cos x cosh y - i sin x sinh y
  return {cos(z.re) * cosh(z.im), -(sin(z.re) * sinh(z.im))};
}

Complex sin(const Complex& z) {
  // sin(x+iy) = sin x cosh y + i cos x sinh y
  return {sin(z.re) * cosh(z.im), cos(z.re) * sinh(z.im)};
}

}  // namespace hillgap
