#include "hillgap/potential.hpp"

#include <algorithm>
#include <cstdlib>

#include <json.hpp>

#include "hillgap/errors.hpp"

namespace hillgap {

namespace {

Complex rounded(const Complex& z, Bits bits) { return {z.re.rounded_to(bits), z.im.rounded_to(bits)}; }

Real json_real(const nlohmann::json& j, Bits bits) {
  if (j.is_string()) return Real::parse(j.get<std::string>(), bits);
  if (j.is_number_integer()) return Real::with_bits(j.get<long>(), bits);
  if (j.is_number()) return Real::with_bits(j.get<double>(), bits);
  fail(ErrorCode::InvalidPotential, "coefficient must be a number or numeric string");
}

}  // namespace

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::BothReal: return "both-real";
    case Regime::BothImaginary: return "both-imaginary";
    case Regime::GeneralComplex: return "general-complex";
  }
  return "general-complex";
}

Regime regime_from_string(std::string_view text) {
  if (text == "both-real") return Regime::BothReal;
  if (text == "both-imaginary") return Regime::BothImaginary;
  if (text == "general-complex") return Regime::GeneralComplex;
  fail(ErrorCode::InvalidArgument, "unknown regime '" + std::string(text) + "'");
}

void TwoTermParams::validate() const {
  switch (regime) {
    case Regime::BothReal:
      if (!alpha.im.is_zero() || !t.im.is_zero())
        fail(ErrorCode::InvalidArgument, "both-real regime requires real alpha and t");
      break;
    case Regime::BothImaginary:
      if (!alpha.re.is_zero() || !t.re.is_zero())
        fail(ErrorCode::InvalidArgument, "both-imaginary regime requires pure imaginary alpha and t");
      break;
    case Regime::GeneralComplex:
      break;
  }
}

Potential::Potential(const std::map<int, Complex>& coeffs, Bits bits, Provenance provenance)
    : bits_(bits), provenance_(std::move(provenance)) {
  if (bits < 2) fail(ErrorCode::InvalidArgument, "precision must be at least 2 bits");
  for (const auto& [m, value] : coeffs) {
    if (m % 2 != 0)
      fail(ErrorCode::InvalidPotential, "frequency " + std::to_string(m) + " is odd; pi-periodic potentials use even m");
    if (value.is_zero()) continue;
    if (m == 0) fail(ErrorCode::InvalidPotential, "V(0) must vanish (zero-mean potential)");
    coeffs_.emplace(m, rounded(value, bits));
  }
  for (const auto& [m, value] : coeffs_) {
    degree_bound_ = std::max(degree_bound_, std::abs(m));
    if (!value.im.is_zero()) real_coefficients_ = false;
    const Complex* mirror = find(-m);
    if (mirror == nullptr || !(*mirror == conj(value))) real_valued_ = false;
  }
}

Potential Potential::zero(Bits bits) { return Potential({}, bits); }

Complex Potential::coeff(int m) const {
  if (const Complex* c = find(m)) return *c;
  return Complex::zero(bits_);
}

const Complex* Potential::find(int m) const {
  auto it = coeffs_.find(m);
  return it == coeffs_.end() ? nullptr : &it->second;
}

Real Potential::l2_norm_squared() const {
  Real sum = Real::zero(bits_);
  for (const auto& [m, value] : coeffs_) sum += norm(value);
  return sum;
}

Real Potential::l2_norm() const { return sqrt(l2_norm_squared()); }

Potential Potential::scale_by(int m) const {
  if (m < 1) fail(ErrorCode::InvalidArgument, "scale factor must be a positive integer");
  std::map<int, Complex> scaled;
  const Real m2 = Real::with_bits(static_cast<long>(m) * m, bits_);
  for (const auto& [k, value] : coeffs_) scaled.emplace(m * k, value * m2);
  Provenance prov = provenance_;
  prov.scale *= m;
  return Potential(scaled, bits_, std::move(prov));
}

std::string Potential::to_json() const {
  nlohmann::json j;
  j["coeffs"] = nlohmann::json::array();
  for (const auto& [m, value] : coeffs_)
    j["coeffs"].push_back({m, to_sci(value.re), to_sci(value.im)});
  j["precision_bits"] = bits_;
  if (provenance_.two_term) {
    const auto& tt = *provenance_.two_term;
    j["provenance"] = {{"alpha", {to_sci(tt.alpha.re), to_sci(tt.alpha.im)}},
                       {"t", {to_sci(tt.t.re), to_sci(tt.t.im)}},
                       {"regime", std::string(to_string(tt.regime))},
                       {"scale", provenance_.scale}};
  }
  return j.dump();
}

Potential Potential::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidPotential, std::string("malformed potential JSON: ") + e.what());
  }
  if (!j.contains("coeffs") || !j["coeffs"].is_array() || !j.contains("precision_bits"))
    fail(ErrorCode::InvalidPotential, "potential JSON needs 'coeffs' and 'precision_bits'");
  const Bits bits = j["precision_bits"].get<long>();
  std::map<int, Complex> coeffs;
  for (const auto& row : j["coeffs"]) {
    if (!row.is_array() || row.size() != 3) fail(ErrorCode::InvalidPotential, "coefficient rows are [m, re, im]");
    const int m = row[0].get<int>();
    if (coeffs.count(m)) fail(ErrorCode::InvalidPotential, "duplicate frequency " + std::to_string(m));
    coeffs.emplace(m, Complex(json_real(row[1], bits), json_real(row[2], bits)));
  }
  Provenance prov;
  if (j.contains("provenance")) {
    const auto& p = j["provenance"];
    TwoTermParams tt;
    tt.alpha = Complex(json_real(p["alpha"][0], bits), json_real(p["alpha"][1], bits));
    tt.t = Complex(json_real(p["t"][0], bits), json_real(p["t"][1], bits));
    tt.regime = regime_from_string(p["regime"].get<std::string>());
    prov.two_term = tt;
    prov.scale = p.value("scale", 1);
  }
  return Potential(coeffs, bits, std::move(prov));
}

bool operator==(const Potential& a, const Potential& b) {
  if (a.bits_ != b.bits_ || a.coeffs_.size() != b.coeffs_.size()) return false;
  return std::equal(a.coeffs_.begin(), a.coeffs_.end(), b.coeffs_.begin(),
                    [](const auto& x, const auto& y) { return x.first == y.first && x.second == y.second; });
}

Potential from_two_term(const TwoTermParams& p, Bits bits) {
  p.validate();
  bits = std::max({bits, p.alpha.bits(), p.t.bits()});
  const Complex alpha = rounded(p.alpha, bits);
  const Complex t = rounded(p.t, bits);
  Complex v2 = alpha * t * Real::with_bits(-2L, bits);
  Complex v4 = -(alpha * alpha);
  std::map<int, Complex> coeffs;
  coeffs.emplace(-2, conj(v2));
  coeffs.emplace(2, std::move(v2));
  coeffs.emplace(-4, conj(v4));
  coeffs.emplace(4, std::move(v4));
  Provenance prov;
  prov.two_term = p;
  return Potential(coeffs, bits, std::move(prov));
}

Potential from_coeff_pair(const Complex& a1, const Complex& a2, Bits bits) {
  bits = std::max({bits, a1.bits(), a2.bits()});
  std::map<int, Complex> coeffs;
  coeffs.emplace(2, a1);
  coeffs.emplace(-2, conj(a1));
  coeffs.emplace(4, a2);
  coeffs.emplace(-4, conj(a2));
  Provenance prov;
  prov.a1 = a1;
  prov.a2 = a2;
  return Potential(coeffs, bits, std::move(prov));
}

Potential mathieu(const Real& a, Bits bits) {
  bits = std::max(bits, a.bits());
  return from_coeff_pair(Complex(a.rounded_to(bits)), Complex::zero(bits), bits);
}

}  // namespace hillgap
