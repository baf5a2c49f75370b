#include "hillgap/exactcomb.hpp"

#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hillgap/errors.hpp"

namespace hillgap {

std::vector<int> Walk::vertices(int n) const {
  std::vector<int> out;
  int at = -n;
  for (std::size_t s = 0; s + 1 < steps.size(); ++s) {
    at += steps[s];
    out.push_back(at);
  }
  return out;
}

namespace {

void compose(int remaining, int K, Walk& walk, const std::function<void(const Walk&)>& visit) {
  if (remaining == 0) {
    visit(walk);
    return;
  }
  for (int step = 2; step <= std::min(2 * K, remaining); step += 2) {
    walk.steps.push_back(step);
    compose(remaining - step, K, walk, visit);
    walk.steps.pop_back();
  }
}

std::string rational_string(const mpq_class& q) { return q.get_num().get_str() + "/" + q.get_den().get_str(); }

// prod over intermediate vertices of (n^2 - j^2), exact.
mpz_class vertex_product(const Walk& w, int n) {
  mpz_class prod = 1;
  int at = -n;
  for (std::size_t s = 0; s + 1 < w.steps.size(); ++s) {
    at += w.steps[s];
    prod *= static_cast<long>(n) * n - static_cast<long>(at) * at;
  }
  return prod;
}

void check_n(int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "n must be positive");
}

}  // namespace

void enumerate_positive_walks(int n, int K, const std::function<void(const Walk&)>& visit) {
  check_n(n);
  if (K < 1) fail(ErrorCode::InvalidArgument, "K must be positive");
  Walk w;
  compose(2 * n, K, w, visit);
}

mpz_class count_positive_walks(int n, int K) {
  check_n(n);
  if (K < 1) fail(ErrorCode::InvalidArgument, "K must be positive");
  // c(s) = sum_{d=1..K} c(s - d) on half-lengths, c(0) = 1.
  std::vector<mpz_class> c(n + 1, 0);
  c[0] = 1;
  for (int s = 1; s <= n; ++s)
    for (int d = 1; d <= std::min(K, s); ++d) c[s] += c[s - d];
  return c[n];
}

void GapPolynomial::add(const Exponents& e, const mpq_class& c) {
  if (static_cast<int>(e.size()) != vars_) fail(ErrorCode::InvalidArgument, "exponent vector has the wrong length");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

mpq_class GapPolynomial::coeff(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? mpq_class(0) : it->second;
}

int GapPolynomial::degree() const {
  int best = -1;
  for (const auto& [e, c] : terms_) {
    int d = 0;
    for (int x : e) d += x;
    best = std::max(best, d);
  }
  return best;
}

mpq_class GapPolynomial::evaluate(const std::vector<mpq_class>& at) const {
  if (static_cast<int>(at.size()) != vars_) fail(ErrorCode::InvalidArgument, "wrong number of evaluation points");
  mpq_class sum = 0;
  for (const auto& [e, c] : terms_) {
    mpq_class term = c;
    for (int i = 0; i < vars_; ++i)
      for (int p = 0; p < e[i]; ++p) term *= at[i];
    sum += term;
  }
  return sum;
}

GapPolynomial GapPolynomial::operator*(const GapPolynomial& other) const {
  if (vars_ != other.vars_) fail(ErrorCode::InvalidArgument, "variable count mismatch");
  GapPolynomial out(n_, vars_);
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : other.terms_) {
      Exponents e(vars_);
      for (int i = 0; i < vars_; ++i) e[i] = ea[i] + eb[i];
      out.add(e, ca * cb);
    }
  return out;
}

GapPolynomial& GapPolynomial::operator*=(const mpq_class& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

std::string GapPolynomial::to_json() const {
  nlohmann::json j;
  j["n"] = n_;
  j["terms"] = nlohmann::json::array();
  for (const auto& [e, c] : terms_) {
    nlohmann::json row = nlohmann::json::array();
    for (int x : e) row.push_back(x);
    row.push_back(rational_string(c));
    j["terms"].push_back(row);
  }
  return j.dump();
}

std::string GapPolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Highest degree first.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    mpq_class mag = abs(c);
    if (first) os << (c < 0 ? "-" : "");
    else os << (c < 0 ? " - " : " + ");
    first = false;
    bool has_var = false;
    for (int x : e) has_var |= x > 0;
    if (mag != 1 || !has_var) os << mag.get_str() << (has_var ? "*" : "");
    bool first_var = true;
    for (int i = 0; i < vars_; ++i) {
      if (e[i] == 0) continue;
      if (!first_var) os << "*";
      first_var = false;
      os << (vars_ == 1 ? "t" : "t" + std::to_string(i + 1));
      if (e[i] > 1) os << "^" << e[i];
    }
  }
  return os.str();
}

mpq_class leading_coefficient(int n) {
  check_n(n);
  mpz_class fact;
  mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(n - 1));
  mpz_class den = fact * fact;
  den <<= n;  // 2^n ((n-1)!)^2
  mpq_class c(n % 2 == 0 ? 8 : -8, 1);
  c /= den;
  c.canonicalize();
  return c;
}

GapPolynomial p_polynomial_exact(int n) {
  check_n(n);
  GapPolynomial p(n, 1);
  enumerate_positive_walks(n, 2, [&](const Walk& w) {
    int twos = 0, fours = 0;
    for (int s : w.steps) (s == 2 ? twos : fours)++;
    // 2 * (-2t)^twos * (-1)^fours / prod (n^2 - j^2)
    mpz_class num = 2;
    mpz_class pow2;
    mpz_ui_pow_ui(pow2.get_mpz_t(), 2, static_cast<unsigned long>(twos));
    num *= pow2;
    if ((twos + fours) % 2 != 0) num = -num;
    mpq_class term(num, vertex_product(w, n));
    term.canonicalize();
    p.add({twos}, term);
  });
  return p;
}

GapPolynomial p_polynomial_closed(int n) {
  check_n(n);
  GapPolynomial p(n, 1);
  p.add({0}, leading_coefficient(n));
  const int m = (n + 1) / 2;
  auto quad = [&](long root) {  // t^2 - root^2
    GapPolynomial q(n, 1);
    q.add({2}, 1);
    q.add({0}, mpq_class(-root * root));
    return q;
  };
  if (n % 2 == 0) {
    for (int k = 1; k <= n / 2; ++k) p = p * quad(2 * k - 1);
  } else {
    GapPolynomial t(n, 1);
    t.add({1}, 1);
    p = p * t;
    for (int k = 1; k <= m - 1; ++k) p = p * quad(2 * k);
  }
  return p;
}

GapPolynomial p_polynomial_general(int n, int K) {
  check_n(n);
  if (K < 1) fail(ErrorCode::InvalidArgument, "K must be positive");
  GapPolynomial p(n, K - 1);
  enumerate_positive_walks(n, K, [&](const Walk& w) {
    GapPolynomial::Exponents e(K - 1, 0);
    for (int s : w.steps)
      if (s / 2 < K) ++e[s / 2 - 1];
    mpq_class term(2, vertex_product(w, n));
    term.canonicalize();
    p.add(e, term);
  });
  return p;
}

namespace {

// Sum over strictly increasing k-tuples from [lo, hi] with consecutive gaps
// >= gap of prod f(i_s).
template <typename F>
mpz_class tuple_sum(int lo, int hi, int k, int gap, F f) {
  mpz_class total = 0;
  std::function<void(int, int, const mpz_class&)> rec = [&](int from, int left, const mpz_class& prod) {
    if (left == 0) {
      total += prod;
      return;
    }
    // Leave room for the remaining (left - 1) picks.
    for (int i = from; i + (left - 1) * gap <= hi; ++i) rec(i + gap, left - 1, prod * f(i));
  };
  rec(lo, k, mpz_class(1));
  return total;
}

}  // namespace

IdentitySides identity_sides(int m, int k, IdentityParity parity) {
  if (m < 1 || k < 1) fail(ErrorCode::RangeError, "identity needs m, k >= 1");
  IdentitySides out;
  if (parity == IdentityParity::Even) {
    if (k > m) fail(ErrorCode::RangeError, "even identity needs k <= m");
    const long mm = static_cast<long>(m) * m;
    out.lhs = tuple_sum(-m + 1, m - 1, k, 2, [&](int i) { return mpz_class(mm - static_cast<long>(i) * i); });
    out.rhs = tuple_sum(1, m, k, 1, [](int j) {
      const long v = 2L * j - 1;
      return mpz_class(v * v);
    });
  } else {
    if (k > m - 1) fail(ErrorCode::RangeError, "odd identity needs k <= m - 1");
    const long top = (2L * m - 1) * (2L * m - 1);
    out.lhs = tuple_sum(-m + 2, m - 1, k, 2, [&](int i) {
      const long v = 2L * i - 1;
      return mpz_class(top - v * v);
    });
    out.rhs = tuple_sum(1, m - 1, k, 1, [](int j) {
      const long v = 4L * j;
      return mpz_class(v * v);
    });
  }
  return out;
}

void write_identity_csv(std::ostream& os, int m, IdentityParity parity, bool header) {
  if (header) os << "m,k,parity,lhs,rhs,equal\n";
  const int kmax = parity == IdentityParity::Even ? m : m - 1;
  for (int k = 1; k <= kmax; ++k) {
    const IdentitySides s = identity_sides(m, k, parity);
    os << m << ',' << k << ',' << (parity == IdentityParity::Even ? "even" : "odd") << ',' << s.lhs.get_str() << ','
       << s.rhs.get_str() << ',' << (s.lhs == s.rhs ? "true" : "false") << '\n';
  }
}

}  // namespace hillgap
