#pragma once

// Gap lengths from the reduced 2x2 system.  For z near 0 the eigenvalue
// lambda = n^2 + z solves (z - alpha_n(z))^2 = |beta_n(z)|^2, where
//
//   S^{ij}(n, z) = sum_k S^{ij}_k,
//   S^{11}_k = sum_{j_1..j_k != +-n} V(-n-j_1) V(j_1-j_2) ... V(j_k+n)
//                                    / prod_s (n^2 - j_s^2 + z),
//
// and alpha_n = S^{11} = S^{22}, beta_n = S^{21}.  The walk sums are evaluated
// by a transfer recursion over the lattice n + 2Z: a state vector indexed by
// the current vertex is pushed through the kernel V(j' - j) / (n^2 - j^2 + z)
// once per order, then contracted with the closing factor V(j -+ n).

#include <iosfwd>
#include <optional>
#include <vector>

#include "hillgap/numeric.hpp"
#include "hillgap/potential.hpp"
#include "hillgap/spectrum.hpp"

namespace hillgap {

struct SeriesConfig {
  /// Working precision; defaults to the potential's precision.
  std::optional<Bits> precision_bits;
  /// Relative size at which the series is considered converged; default 2^-(p-8).
  std::optional<Real> tail_tol;
  /// Fixed-point step size at which solve_z stops; default 2^-(p-8).
  std::optional<Real> z_tol;
  int max_iterations = 100;
  /// Hard cap on the series order; default max(4n, p).
  std::optional<int> depth_cap;
  /// Skip the 9||v|| <= n precondition (the series may still converge for
  /// small n).  The gap sandwich is then recorded but not enforced.
  bool allow_outside_validity = false;
  /// JSON-lines trace of orders and fixed-point iterates.
  std::ostream* trace = nullptr;
};

struct SEntries {
  int n = 0;
  Real z;
  Complex alpha_n;  // S^{11}, from the e_{-n} row
  Complex s22;      // from the e_n row
  Complex s21;      // beta_n
  Complex s12;
  int depth_used = 0;
  int lattice_cut = 0;
  /// Sum of |order contribution| per entry; the rounding floor for cancellations.
  Real abs_sum_alpha;
  Real abs_sum_s21;
  /// Largest |contribution| over the last two orders (zero for explicit depth 0).
  Real last_orders;
};

/// Partial sums through order `depth` on the window |j| <= J (default n + 2K depth).
/// No tail check is made: the result is the exact truncated sum.
SEntries s_entries(const Potential& v, int n, const Real& z, int depth, std::optional<int> J = {},
                   const SeriesConfig& cfg = {});

/// Sums until two consecutive orders fall below tail_tol relative to every
/// entry (or below the rounding floor of that entry), past the minimal order
/// at which walks from -n reach n.  Throws TailNotConverged at the depth cap.
SEntries s_entries_auto(const Potential& v, int n, const Real& z, const SeriesConfig& cfg = {});

enum class Branch { Plus, Minus };

struct FixedPointLog {
  struct Iterate {
    int iter;
    Real z;
    Real alpha;
    Real abs_beta;
    Real residual;
  };
  std::vector<Iterate> iterates;
};

struct ZSolution {
  Real z;
  Real residual;
  int iterations = 0;
  SEntries entries;
  FixedPointLog log;
};

/// Fixed point of z <- Re alpha_n(z) +- |beta_n(z)| from z = 0.
ZSolution solve_z(const Potential& v, int n, Branch branch, const SeriesConfig& cfg = {});

struct SeriesGap {
  SpectrumSlice slice;  // method = series, M_used = lattice cut
  ZSolution plus;
  ZSolution minus;
  Real abs_beta_plus;  // |beta_n(z^+)|
  Real lower_bound;    // 2|beta_n(z^+)| (1 - 3||v||^2/n^2)
  Real upper_bound;    // 2|beta_n(z^+)| (1 + 3||v||^2/n^2)
  bool within_bounds = true;
  bool inside_validity = true;
};

/// gamma_n = z^+ - z^- with the gap sandwich evaluated at z^+.
SeriesGap gap_series(const Potential& v, int n, const SeriesConfig& cfg = {});

struct DerivativeCheck {
  Real d_alpha;
  Real d_beta;
  Real bound;  // ||v||^2 / n^2
  Real slack;  // 10 h^2 ||v||^2
  bool ok = false;
};

/// Central differences of alpha_n, beta_n at z0 with step h against ||v||^2/n^2.
DerivativeCheck lemma5_fd(const Potential& v, int n, const Real& z0, const Real& h, const SeriesConfig& cfg = {});
bool lemma5_fd_check(const Potential& v, int n, const Real& z0, const Real& h, const SeriesConfig& cfg = {});

/// True when 9 ||v|| <= n.
bool series_valid(const Potential& v, int n);

}  // namespace hillgap
