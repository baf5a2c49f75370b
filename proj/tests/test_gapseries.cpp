#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <sstream>

#include <json.hpp>

#include "hillgap/errors.hpp"
#include "hillgap/gapseries.hpp"

using namespace hillgap;

namespace {

Real r(const char* s, Bits bits = 160) { return Real::parse(s, bits); }
Potential two_term(const char* alpha, const char* t, Bits bits = 160) {
  return from_two_term({Complex(r(alpha, bits)), Complex(r(t, bits)), Regime::BothReal}, bits);
}
Real rel(const Real& a, const Real& b) { return abs(a - b) / abs(b); }

// Direct sum over every walk -n -> target with k intermediate vertices
// j_1..j_k != +-n, steps of size 2..2K, for k = 1..depth.
Complex walk_sum(const Potential& v, int n, int start, int target, const Real& z, int depth) {
  const int K = v.half_bandwidth();
  const Real n2 = Real::with_bits(long(n) * n, z.bits());
  Complex total = Complex::zero(z.bits());
  std::vector<int> path;
  std::function<void(int, Complex)> go = [&](int at, Complex weight) {
    // Close the walk from the current vertex.
    if (!path.empty()) {
      const Complex close = v.coeff(at - target);  // V(j_k -+ n) with target = -+n
      total += weight * close;
    }
    if (static_cast<int>(path.size()) == depth) return;
    for (int e = -K; e <= K; ++e) {
      if (e == 0) continue;
      const int next = at + 2 * e;
      if (next == n || next == -n) continue;
      // First factor V(start - j_1) for the seed, V(j_{s-1} - j_s) afterwards.
      Complex w = weight * v.coeff(at - next);
      Real d = n2 - long(next) * next;
      d += z;
      w = w / Complex(d);
      path.push_back(next);
      go(next, w);
      path.pop_back();
    }
  };
  go(start, Complex(Real::with_bits(1L, z.bits())));
  return total;
}

}  // namespace

TEST_CASE("zero potential has vanishing entries") {
  SEntries e = s_entries(Potential::zero(128), 3, Real::zero(128), 5);
  CHECK(e.alpha_n.is_zero());
  CHECK(e.s21.is_zero());
  CHECK(e.s12.is_zero());
  ZSolution zs = solve_z(Potential::zero(128), 2, Branch::Plus);
  CHECK(zs.z.is_zero());
  CHECK(gap_series(Potential::zero(128), 4).slice.gamma.is_zero());
}

TEST_CASE("order zero is the direct coupling") {
  SeriesConfig cfg;
  cfg.allow_outside_validity = true;
  const Real a = r("0.3");
  SEntries e = s_entries(mathieu(a), 1, Real::zero(160), 0, {}, cfg);
  CHECK(e.s21.re == a);
  CHECK(e.s12.re == a);
  CHECK(e.alpha_n.is_zero());
}

TEST_CASE("two-term n=2 at order one") {
  const Real alpha = r("0.05"), t = r("1.5");
  SEntries e = s_entries(two_term("0.05", "1.5"), 2, Real::zero(160), 1);
  const Real expect = alpha * alpha * (t * t - 1);
  CHECK(abs(e.s21.re - expect) < ldexp(Real(1), -150));
  CHECK(e.lattice_cut == 2 + 2 * 2 * 1);
}

TEST_CASE("transfer recursion equals explicit walk enumeration") {
  SeriesConfig cfg;
  cfg.allow_outside_validity = true;
  const Real z = r("0.3");
  for (const auto& v : {two_term("0.2", "0.7"), mathieu(r("0.4")),
                        from_two_term({Complex(r("0.1"), r("0.2")), Complex(r("1.2"), r("-0.3")), Regime::GeneralComplex}, 160)}) {
    for (int n = 1; n <= 6; ++n) {
      for (int d = 1; d <= 4; ++d) {
        SEntries e = s_entries(v, n, z, d, {}, cfg);
        const Complex s21 = v.coeff(2 * n) + walk_sum(v, n, n, -n, z, d);
        const Complex s11 = walk_sum(v, n, -n, -n, z, d);
        const Complex s12 = v.coeff(-2 * n) + walk_sum(v, n, -n, n, z, d);
        const Complex s22 = walk_sum(v, n, n, n, z, d);
        const Real eps = ldexp(Real(1), -140);
        CHECK(abs(e.s21 - s21) < eps);
        CHECK(abs(e.alpha_n - s11) < eps);
        CHECK(abs(e.s12 - s12) < eps);
        CHECK(abs(e.s22 - s22) < eps);
      }
    }
  }
}

TEST_CASE("symmetries of the reduced entries") {
  // S^11 = S^22 for any potential, S^12 = conj S^21 at real z for real v.
  SeriesConfig cfg;
  cfg.allow_outside_validity = true;
  for (const auto& v : {two_term("0.1", "1.5"), mathieu(r("0.1")),
                        from_two_term({Complex(r("0.03"), r("0.04")), Complex(r("1.1"), r("0.5")), Regime::GeneralComplex}, 160)}) {
    for (int n : {1, 2, 3, 5, 8}) {
      for (const char* z : {"0", "0.5", "-0.9"}) {
        SEntries e = s_entries_auto(v, n, r(z), cfg);
        const Real tol = exp2_neg(150, 160) * max(Real(1), e.abs_sum_alpha);
        CHECK(abs(e.alpha_n - e.s22) <= tol);
        CHECK(abs(e.s12 - conj(e.s21)) <= tol);
      }
    }
  }
}

TEST_CASE("validity region is enforced") {
  try {
    s_entries_auto(mathieu(r("1")), 1, Real::zero(160));
    FAIL("expected ValidityRegion");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidityRegion);
  }
  CHECK_THROWS_AS(s_entries(mathieu(r("0.01")), 1, r("1.5"), 2), Error);
}

TEST_CASE("Mathieu a=0.05 first gap") {
  SeriesGap g = gap_series(mathieu(r("0.05")), 1);
  const Real ratio = g.slice.gamma / (2 * r("0.05"));
  CHECK(ratio >= 0.9);
  CHECK(ratio <= 1.1);
  CHECK(g.slice.method == Method::Series);
  CHECK(g.within_bounds);
}

TEST_CASE("z brackets match matrix eigenvalues") {
  Potential v = two_term("0.05", "1.5");
  auto res = spectrum_slices(v, 3, r("1e-12"), {.precision_bits = 160});
  ZSolution zp = solve_z(v, 3, Branch::Plus);
  ZSolution zm = solve_z(v, 3, Branch::Minus);
  const auto& s = res.slices[2];
  CHECK(rel(zp.z, s.lambda_plus - 9) < 1e-6);
  CHECK(rel(zm.z, s.lambda_minus - 9) < 1e-6);
  CHECK(abs(zp.residual) < ldexp(Real(1), -140));
}

TEST_CASE("Mathieu a=0.02 second gap against a^2/2") {
  const auto ratio = [](const char* a) {
    SeriesGap g = gap_series(mathieu(r(a)), 2);
    return g.slice.gamma / (r(a) * r(a) / 2);
  };
  const Real q = ratio("0.02");
  CHECK(q >= 0.95);
  CHECK(q <= 1.05);
  // The error shrinks when a is halved.
  CHECK(abs(ratio("0.01") - 1) < abs(q - 1));
}

TEST_CASE("imaginary two-term parameters match the matrix gap") {
  Potential v = from_two_term({Complex(Real::zero(160), r("0.1")), Complex(Real::zero(160), r("0.5")), Regime::BothImaginary}, 160);
  SeriesGap g = gap_series(v, 2);
  auto res = spectrum_slices(v, 2, r("1e-12"), {.precision_bits = 160});
  CHECK(rel(g.slice.gamma, res.slices[1].gamma) < 1e-6);
}

TEST_CASE("series and matrix agree for n <= 8 inside the validity region") {
  for (const auto& v : {two_term("0.05", "1.5"), mathieu(r("0.08")), two_term("0.03", "-2.5")}) {
    auto res = spectrum_slices(v, 8, r("1e-12"), {.precision_bits = 160});
    for (int n = 1; n <= 8; ++n) {
      if (!series_valid(v, n)) continue;
      SeriesGap g = gap_series(v, n);
      const Real& gm = res.slices[n - 1].gamma;
      if (res.slices[n - 1].degenerate) {
        CHECK(g.slice.gamma < ldexp(Real(1), -100));
      } else {
        CHECK(rel(g.slice.gamma, gm) <= 1e-6);
      }
    }
  }
}

TEST_CASE("derivative bounds by finite differences") {
  CHECK(lemma5_fd_check(Potential::zero(128), 2, Real::zero(128), r("1e-4", 128)));
  CHECK(lemma5_fd_check(mathieu(r("0.1")), 3, Real::zero(160), r("1e-4")));
  CHECK(lemma5_fd_check(two_term("0.05", "2"), 5, r("0.5"), r("1e-4")));
  for (int n : {4, 7, 9})
    for (const char* z0 : {"-0.8", "0", "0.8"}) CHECK(lemma5_fd_check(two_term("0.1", "1.5"), n, r(z0), r("1e-3")));
}

TEST_CASE("fixed-point steps contract") {
  for (const auto& v : {two_term("0.1", "1.5"), mathieu(r("0.1"))}) {
    const Real q = 2 * v.l2_norm_squared();
    for (int n : {4, 5, 7}) {
      for (Branch b : {Branch::Plus, Branch::Minus}) {
        ZSolution zs = solve_z(v, n, b);
        const auto& it = zs.log.iterates;
        for (std::size_t k = 2; k < it.size(); ++k) {
          const Real d1 = abs(it[k].z - it[k - 1].z);
          const Real d0 = abs(it[k - 1].z - it[k - 2].z);
          CHECK(d1 <= q / (n * n) * d0 + exp2_neg(150, 160));
        }
      }
    }
  }
}

TEST_CASE("gap sandwich holds at z^+") {
  for (const auto& v : {two_term("0.1", "1.5"), mathieu(r("0.1")), two_term("0.05", "0.3")})
    for (int n = 4; n <= 9; ++n) {
      SeriesGap g = gap_series(v, n);
      CHECK(g.within_bounds);
      CHECK(g.lower_bound <= g.upper_bound);
    }
}

TEST_CASE("trace emits JSON lines") {
  std::ostringstream os;
  SeriesConfig cfg;
  cfg.trace = &os;
  solve_z(mathieu(r("0.05")), 1, Branch::Plus, cfg);
  std::istringstream in(os.str());
  std::string line;
  int orders = 0, iterates = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    if (j.contains("k")) ++orders;
    if (j.contains("iter")) {
      ++iterates;
      CHECK(j.contains("abs_beta"));
      CHECK(j.contains("residual"));
    }
  }
  CHECK(orders > 0);
  CHECK(iterates > 0);
}
