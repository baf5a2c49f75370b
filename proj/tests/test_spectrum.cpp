#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "hillgap/errors.hpp"
#include "hillgap/spectrum.hpp"
#include "oracles.hpp"

using namespace hillgap;

namespace {
Real r(const char* s, Bits bits = 128) { return Real::parse(s, bits); }
Potential two_term(const char* alpha, const char* t, Bits bits = 128) {
  return from_two_term({Complex(r(alpha, bits)), Complex(r(t, bits)), Regime::BothReal}, bits);
}
bool close(const Real& a, const Real& b, double rel) {
  return abs(a - b) <= Real::with_bits(rel, a.bits()) * max(abs(b), Real::with_bits(1e-300, a.bits()));
}
}  // namespace

TEST_CASE("build_truncated entries") {
  auto zero = build_truncated(Potential::zero(128), Parity::PerPlus, 4);
  REQUIRE(zero.dim() == 5);
  const long diag[] = {16, 4, 0, 4, 16};
  for (int i = 0; i < 5; ++i) CHECK(zero.entry(i, i).re == diag[i]);

  auto m = build_truncated(mathieu(r("0.3")), Parity::PerMinus, 3);
  REQUIRE(m.dim() == 4);
  CHECK(m.sites() == std::vector<int>{-3, -1, 1, 3});
  CHECK(m.entry(0, 0).re == 9);
  CHECK(m.entry(1, 1).re == 1);
  CHECK(m.entry(0, 1) == Complex(r("0.3")));
  CHECK(m.entry(2, 1) == Complex(r("0.3")));
  CHECK(m.entry(0, 2).is_zero());

  auto w = build_truncated(two_term("0.1", "1.5"), Parity::PerPlus, 4);
  CHECK(w.half_bandwidth() == 2);
  CHECK(w.entry(0, 1).re == -2 * r("0.1") * r("1.5"));
  CHECK(w.entry(0, 2).re == -(r("0.1") * r("0.1")));
  CHECK(w.entry(0, 3).is_zero());
}

TEST_CASE("build_truncated errors") {
  std::map<int, Complex> one_sided{{2, Complex(Real(1))}};
  CHECK_THROWS_AS(build_truncated(Potential(one_sided, 64), Parity::PerPlus, 8), Error);
  try {
    build_truncated(two_term("0.1", "1"), Parity::PerPlus, 2);
    FAIL("expected TruncationTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TruncationTooSmall);
  }
}

TEST_CASE("free operator eigenvalues are exact") {
  auto ev = eigenvalues(build_truncated(Potential::zero(128), Parity::PerPlus, 4));
  const long plus[] = {0, 4, 4, 16, 16};
  for (int i = 0; i < 5; ++i) CHECK(ev[i] == plus[i]);
  auto em = eigenvalues(build_truncated(Potential::zero(128), Parity::PerMinus, 3));
  const long minus[] = {1, 1, 9, 9};
  for (int i = 0; i < 4; ++i) CHECK(em[i] == minus[i]);
}

TEST_CASE("Mathieu a=0.1 antiperiodic pair near 1 matches a dense Jacobi solve") {
  Potential v = mathieu(r("0.1"));
  auto op = build_truncated(v, Parity::PerMinus, 64);
  auto ev = eigenvalues(op);
  auto ref = oracle::dense_hill_eigenvalues(v, 1, 64, 128);
  REQUIRE(ev.size() == ref.size());
  for (std::size_t i = 0; i < ev.size(); ++i) CHECK(abs(ev[i] - ref[i]) < ldexp(Real(1), -100));
  const Real gap = ev[1] - ev[0];
  CHECK(abs(ev[0] - 1) < 0.2);
  CHECK(abs(ev[1] - 1) < 0.2);
  CHECK(abs(gap / Real(0.2) - 1) < 0.01);
}

TEST_CASE("Mathieu a=1 reproduces tabulated characteristic values") {
  // -y'' + 2 cos(2x) y = lambda y is Mathieu's equation with q = -1; the
  // values below are a_0, b_1, a_1, b_2, a_2 at q = 1 from standard tables.
  Potential v = mathieu(r("1"));
  auto plus = build_truncated(v, Parity::PerPlus, 40);
  auto minus = build_truncated(v, Parity::PerMinus, 41);
  CHECK(abs(plus.eigenvalue(0) - r("-0.4551386041")) < 1e-9);
  CHECK(abs(minus.eigenvalue(0) - r("-0.1102488170")) < 1e-9);
  CHECK(abs(minus.eigenvalue(1) - r("1.8591080725")) < 1e-9);
  CHECK(abs(plus.eigenvalue(1) - r("3.9170247730")) < 1e-9);
  CHECK(abs(plus.eigenvalue(2) - r("4.3713009827")) < 1e-9);
}

TEST_CASE("complex Hermitian band matches realified dense solve") {
  Potential v = from_two_term({Complex(r("0.3"), r("0.2")), Complex(r("1.1"), r("-0.7")), Regime::GeneralComplex}, 128);
  REQUIRE_FALSE(v.has_real_coefficients());
  for (int parity : {0, 1}) {
    auto op = build_truncated(v, parity == 0 ? Parity::PerPlus : Parity::PerMinus, 20);
    CHECK_FALSE(op.is_real());
    auto ev = eigenvalues(op);
    auto ref = oracle::dense_hill_eigenvalues(v, parity, 20, 128);
    REQUIRE(ev.size() == ref.size());
    for (std::size_t i = 0; i < ev.size(); ++i) CHECK(abs(ev[i] - ref[i]) < ldexp(Real(1), -100));
  }
}

TEST_CASE("two-term band matches dense solve") {
  Potential v = two_term("0.7", "-1.3");
  auto op = build_truncated(v, Parity::PerPlus, 24);
  auto ev = eigenvalues(op);
  auto ref = oracle::dense_hill_eigenvalues(v, 0, 24, 128);
  for (std::size_t i = 0; i < ev.size(); ++i) CHECK(abs(ev[i] - ref[i]) < ldexp(Real(1), -100));
}

TEST_CASE("spectrum_slices of the zero potential") {
  auto res = spectrum_slices(Potential::zero(128), 5, r("1e-6"));
  REQUIRE(res.slices.size() == 5);
  for (const auto& s : res.slices) {
    CHECK(s.gamma.is_zero());
    CHECK(s.lambda_minus == static_cast<long>(s.n) * s.n);
    CHECK(s.lambda_plus == static_cast<long>(s.n) * s.n);
    CHECK(s.degenerate);
    CHECK(s.localized == std::optional<bool>(true));
  }
  CHECK(res.lambda0.is_zero());
}

TEST_CASE("Mathieu a=0.05 first gap is close to 2a") {
  auto res = spectrum_slices(mathieu(r("0.05")), 1, r("1e-8"));
  const Real ratio = res.slices[0].gamma / (2 * r("0.05"));
  CHECK(ratio >= 0.9);
  CHECK(ratio <= 1.1);
  CHECK(res.slices[0].localized == std::optional<bool>(true));
}

TEST_CASE("two-term second gap approaches 2 alpha^2 |t^2 - 1| with shrinking error") {
  auto rel_err = [](const char* alpha) {
    Potential v = two_term(alpha, "1.5", 192);
    auto res = spectrum_slices(v, 2, r("1e-10"));
    const Real a = r(alpha, 192);
    const Real pred = 2 * a * a * r("1.25", 192);
    return abs(res.slices[1].gamma / pred - 1);
  };
  const Real e1 = rel_err("0.05");
  const Real e2 = rel_err("0.025");
  CHECK(e1 < 0.05);  // O(alpha) relative error
  CHECK(e2 < e1);
  // gamma_2 at alpha = 0.05 is about 0.00625
  Potential v = two_term("0.05", "1.5", 192);
  auto res = spectrum_slices(v, 2, r("1e-10"));
  CHECK(abs(res.slices[1].gamma - r("0.00625")) < r("0.0004"));
}

TEST_CASE("slices agree with dense solve at fixed truncation") {
  Potential v = two_term("0.3", "0.8");
  auto res = spectrum_slices(v, 6, r("1e-12"));
  auto plus = oracle::dense_hill_eigenvalues(v, 0, 24, 128);
  auto minus = oracle::dense_hill_eigenvalues(v, 1, 25, 128);
  CHECK(abs(res.lambda0 - plus[0]) < 1e-25);
  for (const auto& s : res.slices) {
    const auto& ref = s.n % 2 == 0 ? plus : minus;
    CHECK(abs(s.lambda_minus - ref[s.n - 1]) < 1e-25);
    CHECK(abs(s.lambda_plus - ref[s.n]) < 1e-25);
    CHECK(s.lambda_minus <= s.lambda_plus);
  }
}

TEST_CASE("localization_check") {
  SpectrumSlice zero;
  zero.n = 3;
  zero.lambda_minus = Real(9);
  zero.lambda_plus = Real(9);
  CHECK(localization_check(zero, Real(0)));

  Potential v = mathieu(r("0.1"));
  auto res = spectrum_slices(v, 1, r("1e-8"));
  CHECK(localization_check(res.slices[0], v.l2_norm()));
  CHECK_THROWS_AS(localization_check(res.slices[0], r("0.3")), Error);
}

TEST_CASE("each disc holds exactly two eigenvalues when ||v|| <= 1/4") {
  for (const auto& v : {mathieu(r("0.17")), two_term("0.1", "0.5"), two_term("0.05", "-1.2")}) {
    const Real norm = v.l2_norm();
    REQUIRE(norm <= 0.25);
    auto plus = build_truncated(v, Parity::PerPlus, 40);
    auto minus = build_truncated(v, Parity::PerMinus, 41);
    CHECK(count_in_interval(plus, -4 * norm, 4 * norm) == 1);
    for (int n = 1; n <= 12; ++n) {
      const auto& op = n % 2 == 0 ? plus : minus;
      const Real n2 = Real(static_cast<long>(n) * n);
      CHECK(count_in_interval(op, n2 - 4 * norm, n2 + 4 * norm) == 2);
    }
  }
}

TEST_CASE("lattice resolvent sum bound away from the resonant pair") {
  PrecisionScope scope(128);
  for (int n : {1, 2, 3, 5, 10}) {
    const long lo = static_cast<long>(n - 1) * (n - 1), hi = static_cast<long>(n + 1) * (n + 1);
    for (int s = 0; s <= 8; ++s) {
      Real lambda = Real(lo) + (Real(hi - lo) * s) / 8;
      CHECK(offdisc_resolvent_sum(n, lambda, 10000) < Real(9) / (n * n));
    }
  }
}

TEST_CASE("empirical n0") {
  CHECK(empirical_n0(mathieu(r("0.1")), 8) == std::optional<int>(1));
  // A strong potential pushes the low eigenvalues out of their unit windows.
  auto n0 = empirical_n0(mathieu(r("3")), 12);
  REQUIRE(n0.has_value());
  CHECK(*n0 > 1);
  CHECK(*n0 <= 12);
}

TEST_CASE("default precision rule") {
  CHECK(default_spectrum_precision(mathieu(r("0.1")), 8) == 128);
  // 64 + ceil(10 log2(2/0.5)) + 40
  CHECK(default_spectrum_precision(two_term("0.5", "1"), 10) == 124);
}

TEST_CASE("CSV output is deterministic") {
  auto res = spectrum_slices(mathieu(r("0.2")), 3, r("1e-8"));
  std::ostringstream a, b;
  write_slices_csv(a, res.slices);
  write_slices_csv(b, spectrum_slices(mathieu(r("0.2")), 3, r("1e-8")).slices);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("n,lambda_minus,lambda_plus,gamma,method,M_used,precision_bits\n", 0) == 0);
}
