#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hillgap/errors.hpp"
#include "hillgap/potential.hpp"

using namespace hillgap;

namespace {
Real r(const char* s, Bits bits = 192) { return Real::parse(s, bits); }
Real tiny(Bits bits = 192) { return ldexp(Real::with_bits(1L, bits), -(bits - 4)); }
}  // namespace

TEST_CASE("two-term potential, both-real regime") {
  TwoTermParams p{Complex(r("0.1")), Complex(r("2")), Regime::BothReal};
  Potential v = from_two_term(p, 192);
  CHECK(abs(v.coeff(2).re - r("-0.4")) < tiny());
  CHECK(abs(v.coeff(-2).re - r("-0.4")) < tiny());
  CHECK(abs(v.coeff(4).re - r("-0.01")) < tiny());
  CHECK(v.coeff(6).is_zero());
  CHECK(v.degree_bound() == 4);
  CHECK(v.half_bandwidth() == 2);
  CHECK(v.is_real_valued());
  CHECK(v.has_real_coefficients());
  CHECK(v.provenance().two_term.has_value());
}

TEST_CASE("alpha = 0 yields the zero potential") {
  TwoTermParams p{Complex::zero(128), Complex(r("7", 128)), Regime::BothReal};
  Potential v = from_two_term(p, 128);
  CHECK(v.is_zero());
  CHECK(v.degree_bound() == 0);
  CHECK(v.l2_norm().is_zero());
}

TEST_CASE("both-imaginary regime gives real coefficients") {
  TwoTermParams p{Complex(Real::zero(192), r("0.1")), Complex(Real::zero(192), r("0.5")), Regime::BothImaginary};
  Potential v = from_two_term(p, 192);
  CHECK(abs(v.coeff(2).re - r("0.1")) < tiny());
  CHECK(abs(v.coeff(-4).re - r("0.01")) < tiny());
  CHECK(v.coeff(2).im.is_zero());
  CHECK(v.is_real_valued());
}

TEST_CASE("general complex regime uses conjugates for negative frequencies") {
  TwoTermParams p{Complex(r("0.1"), r("0.2")), Complex(r("1"), r("-0.5")), Regime::GeneralComplex};
  Potential v = from_two_term(p, 192);
  CHECK(v.coeff(-2) == conj(v.coeff(2)));
  CHECK(v.coeff(-4) == conj(v.coeff(4)));
  CHECK(v.is_real_valued());
  CHECK_FALSE(v.has_real_coefficients());
}

TEST_CASE("regime validation") {
  TwoTermParams bad{Complex(r("0.1"), r("0.1")), Complex(r("1")), Regime::BothReal};
  CHECK_THROWS_AS(from_two_term(bad), Error);
  TwoTermParams bad2{Complex(r("0.1")), Complex(Real::zero(192), r("1")), Regime::BothImaginary};
  CHECK_THROWS_AS(from_two_term(bad2), Error);
}

TEST_CASE("coefficient pair and Mathieu") {
  Potential m = mathieu(r("0.3"), 192);
  CHECK(m.coeff(2) == Complex(r("0.3")));
  CHECK(m.coeff(-2) == Complex(r("0.3")));
  CHECK(m.find(4) == nullptr);
  CHECK(m.degree_bound() == 2);
  CHECK(from_coeff_pair(Complex::zero(64), Complex::zero(64), 64).is_zero());

  Real alpha = r("0.1"), t = r("1.5");
  Potential a = from_coeff_pair(Complex(-2 * alpha * t), Complex(-(alpha * alpha)), 192);
  Potential b = from_two_term({Complex(alpha), Complex(t), Regime::BothReal}, 192);
  CHECK(a == b);
}

TEST_CASE("l2 norm") {
  Potential v = from_two_term({Complex(r("0.1")), Complex(r("1")), Regime::BothReal}, 192);
  CHECK(abs(v.l2_norm_squared() - r("0.0802")) < tiny());
  CHECK(mathieu(r("1"), 128).l2_norm_squared() == 2);

  // sqrt(8|t|^2|a|^2 + 2|a|^4) on a complex sample
  Complex alpha(r("0.03"), r("-0.07")), t(r("1.1"), r("0.4"));
  Potential w = from_two_term({alpha, t, Regime::GeneralComplex}, 192);
  Real expect = sqrt(8 * norm(t) * norm(alpha) + 2 * norm(alpha) * norm(alpha));
  CHECK(abs(w.l2_norm() - expect) <= ldexp(expect, -188));
}

TEST_CASE("scale_by") {
  Potential m = mathieu(r("0.05"), 192);
  Potential s = m.scale_by(2);
  CHECK(s.coeff(4) == Complex(4 * r("0.05")));
  CHECK(s.find(2) == nullptr);
  CHECK(m.scale_by(1) == m);
  Potential v = from_two_term({Complex(r("0.1")), Complex(r("1.5")), Regime::BothReal}, 192);
  CHECK(v.scale_by(2).scale_by(3) == v.scale_by(6));
  CHECK_THROWS_AS(v.scale_by(0), Error);
}

TEST_CASE("constructor rejects odd keys and nonzero mean") {
  std::map<int, Complex> odd{{1, Complex(Real(1))}, {-1, Complex(Real(1))}};
  CHECK_THROWS_AS(Potential(odd, 64), Error);
  std::map<int, Complex> mean{{0, Complex(Real(1))}};
  CHECK_THROWS_AS(Potential(mean, 64), Error);
  std::map<int, Complex> explicit_zero{{0, Complex::zero(64)}, {2, Complex::zero(64)}};
  CHECK(Potential(explicit_zero, 64).is_zero());
}

TEST_CASE("real-valued flag") {
  std::map<int, Complex> one_sided{{2, Complex(Real(1))}};
  CHECK_FALSE(Potential(one_sided, 64).is_real_valued());
}

TEST_CASE("JSON round trip") {
  Potential v = from_two_term({Complex(r("0.1")), Complex(r("1.5")), Regime::BothReal}, 192);
  const std::string js = v.to_json();
  Potential w = Potential::from_json(js);
  CHECK(w == v);
  CHECK(w.to_json() == js);
  CHECK(w.provenance().two_term.has_value());

  Potential n = Potential::from_json(R"({"coeffs": [[-2, 0.25, 0], [2, "0.25", "0"]], "precision_bits": 80})");
  CHECK(n.precision_bits() == 80);
  CHECK(n.is_real_valued());
  CHECK_THROWS_AS(Potential::from_json("{"), Error);
  CHECK_THROWS_AS(Potential::from_json(R"({"coeffs": [[3, 1, 0]], "precision_bits": 64})"), Error);
}
