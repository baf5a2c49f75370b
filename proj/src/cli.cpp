#include "hillgap/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hillgap/asymptotics.hpp"
#include "hillgap/errors.hpp"
#include "hillgap/exactcomb.hpp"
#include "hillgap/gapseries.hpp"
#include "hillgap/potential.hpp"
#include "hillgap/qes.hpp"
#include "hillgap/spectrum.hpp"

namespace hillgap {

namespace {

using nlohmann::json;

constexpr Bits kDefaultBits = 192;

struct RunConfig {
  std::optional<Bits> precision_bits;  // explicit flag or HILLGAP_PRECISION
  std::string rel_tol = "1e-10";
  std::string format = "csv";
  int threads = 0;

  Bits bits() const { return precision_bits.value_or(kDefaultBits); }
};

[[noreturn]] void bad_arg(const std::string& msg) { fail(ErrorCode::InvalidArgument, msg); }

Real parse_real(const std::string& text, Bits bits) {
  try {
    return Real::parse(text, bits);
  } catch (const std::exception&) {
    bad_arg("not a number: '" + text + "'");
  }
}

// "x" or "x,y" for x + iy.
Complex parse_complex(const std::string& text, Bits bits) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return Complex(parse_real(text, bits));
  return {parse_real(text.substr(0, comma), bits), parse_real(text.substr(comma + 1), bits)};
}

Regime infer_regime(const Complex& alpha, const Complex& t) {
  if (alpha.im.is_zero() && t.im.is_zero()) return Regime::BothReal;
  if (alpha.re.is_zero() && t.re.is_zero()) return Regime::BothImaginary;
  return Regime::GeneralComplex;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad_arg("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct PotentialArgs {
  bool zero = false;
  std::string mathieu;
  std::vector<std::string> two_term;
  std::string json_path;
  int scale = 1;

  Potential build(Bits bits) const {
    const int chosen = int(zero) + int(!mathieu.empty()) + int(!two_term.empty()) + int(!json_path.empty());
    if (chosen != 1) bad_arg("choose exactly one of --zero, --mathieu, --two-term, --potential-json");
    Potential v = [&] {
      if (zero) return Potential({}, bits);
      if (!mathieu.empty()) return hillgap::mathieu(parse_real(mathieu, bits), bits);
      if (!two_term.empty()) {
        const Complex a = parse_complex(two_term[0], bits), t = parse_complex(two_term[1], bits);
        return from_two_term({a, t, infer_regime(a, t)}, bits);
      }
      return Potential::from_json(read_file(json_path));
    }();
    if (scale != 1) v = v.scale_by(scale);
    return v;
  }
};

void add_potential_options(CLI::App* cmd, PotentialArgs& p) {
  cmd->add_flag("--zero", p.zero, "v = 0");
  cmd->add_option("--mathieu", p.mathieu, "Mathieu potential 2a cos 2x");
  cmd->add_option("--two-term", p.two_term, "alpha t (complex as re,im)")->expected(2);
  cmd->add_option("--potential-json", p.json_path, "potential exported by --export-potential");
  cmd->add_option("--scale", p.scale, "replace v(x) by v(m x)")->check(CLI::PositiveNumber);
}

std::string sci(const Real& x) { return to_sci(x); }

std::string fmt_rel_diff(const Real& a, const Real& b) {
  const Real scale = max(abs(a), abs(b));
  if (scale.is_zero()) return to_sci(Real::zero(a.bits()), 6);
  return to_sci(abs(a - b) / scale, 6);
}

// --- gaps -----------------------------------------------------------------

struct GapsArgs {
  PotentialArgs pot;
  int nmax = 5;
  std::string method = "matrix";
  bool outside_validity = false;
  std::string export_path;
};

void cmd_gaps(const GapsArgs& a, const RunConfig& cfg, std::ostream& out) {
  if (a.method != "matrix" && a.method != "series" && a.method != "both") bad_arg("--method is matrix, series or both");
  if (a.nmax < 1) bad_arg("--nmax must be positive");
  const Potential v = a.pot.build(cfg.bits());
  if (!a.export_path.empty()) {
    std::ofstream f(a.export_path);
    if (!f) bad_arg("cannot write " + a.export_path);
    f << v.to_json() << '\n';
  }
  const Real rel_tol = parse_real(cfg.rel_tol, 64);
  std::vector<SpectrumSlice> matrix, series;
  if (a.method != "series") {
    SpectrumOptions opts;
    opts.precision_bits = cfg.precision_bits;
    opts.threads = cfg.threads;
    matrix = spectrum_slices(v, a.nmax, rel_tol, opts).slices;
  }
  if (a.method != "matrix") {
    SeriesConfig sc;
    sc.precision_bits = cfg.bits();
    sc.allow_outside_validity = a.outside_validity;
    for (int n = 1; n <= a.nmax; ++n) series.push_back(gap_series(v, n, sc).slice);
  }
  const bool both = a.method == "both";
  std::vector<std::pair<const SpectrumSlice*, std::string>> rows;
  for (int n = 1; n <= a.nmax; ++n) {
    std::string diff;
    if (both) diff = fmt_rel_diff(matrix[n - 1].gamma, series[n - 1].gamma);
    if (!matrix.empty()) rows.emplace_back(&matrix[n - 1], diff);
    if (!series.empty()) rows.emplace_back(&series[n - 1], diff);
  }
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& [s, diff] : rows) {
      json r = {{"n", s->n},
                {"lambda_minus", sci(s->lambda_minus)},
                {"lambda_plus", sci(s->lambda_plus)},
                {"gamma", sci(s->gamma)},
                {"method", std::string(to_string(s->method))},
                {"M_used", s->M_used},
                {"precision_bits", s->precision_bits}};
      if (both) r["cross_rel_diff"] = diff;
      arr.push_back(r);
    }
    out << arr.dump() << '\n';
    return;
  }
  out << "n,lambda_minus,lambda_plus,gamma,method,M_used,precision_bits" << (both ? ",cross_rel_diff" : "") << '\n';
  for (const auto& [s, diff] : rows) {
    out << s->n << ',' << sci(s->lambda_minus) << ',' << sci(s->lambda_plus) << ',' << sci(s->gamma) << ','
        << to_string(s->method) << ',' << s->M_used << ',' << s->precision_bits;
    if (both) out << ',' << diff;
    out << '\n';
  }
}

// --- predict --------------------------------------------------------------

struct PredictArgs {
  std::string regime = "alpha_to_zero";
  std::string alpha, t, a1, a2, a;
  int nmin = 1, nmax = 8;
};

void cmd_predict(const PredictArgs& p, const RunConfig& cfg, std::ostream& out) {
  const Bits bits = cfg.bits();
  const PredictionRegime regime = prediction_regime_from_string(p.regime);
  if (p.nmin < 1 || p.nmax < p.nmin) bad_arg("bad --nmin/--nmax range");
  auto need = [](const std::string& v, const char* name) {
    if (v.empty()) bad_arg(std::string("--") + name + " is required for this regime");
    return v;
  };
  std::vector<GapPrediction> rows;
  for (int n = p.nmin; n <= p.nmax; ++n) {
    switch (regime) {
      case PredictionRegime::AlphaToZero:
        rows.push_back(predict_alpha_to_zero(parse_complex(need(p.alpha, "alpha"), bits),
                                             parse_complex(need(p.t, "t"), bits), n));
        break;
      case PredictionRegime::NToInfty:
        rows.push_back(predict_n_to_infty(parse_complex(need(p.alpha, "alpha"), bits),
                                          parse_complex(need(p.t, "t"), bits), n));
        break;
      case PredictionRegime::CoeffForm:
        rows.push_back(predict_coeff_form(parse_complex(need(p.a1, "a1"), bits), parse_complex(need(p.a2, "a2"), bits), n));
        break;
      default: rows.push_back(predict_mathieu(parse_real(need(p.a, "a"), bits), n, regime));
    }
  }
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& g : rows) {
      json in = json::object();
      for (const auto& [k, v] : g.inputs) in[k] = {sci(v.re), sci(v.im)};
      arr.push_back({{"n", g.n}, {"regime", std::string(to_string(g.regime))}, {"value", sci(g.value)}, {"inputs", in}});
    }
    out << arr.dump() << '\n';
    return;
  }
  out << "n,regime,value\n";
  for (const auto& g : rows) out << g.n << ',' << to_string(g.regime) << ',' << sci(g.value) << '\n';
}

// --- ratio ----------------------------------------------------------------

struct RatioArgs {
  std::string family = "two-term";
  std::string t = "1.5";
  std::string prediction;
  std::string method = "auto";
  std::string alpha;
  std::vector<std::string> ladder;
  int n = 0, nmin = 0, nmax = 0;
};

void cmd_ratio(const RatioArgs& r, const RunConfig& cfg, std::ostream& out) {
  const Bits bits = cfg.bits();
  RatioSpec spec;
  spec.bits = bits;
  spec.rel_tol = parse_real(cfg.rel_tol, 64);
  spec.method = gap_method_from_string(r.method);
  if (r.family == "mathieu") {
    spec.family = RatioSpec::Family::Mathieu;
    spec.prediction = PredictionRegime::MathieuSmallA;
  } else if (r.family == "two-term") {
    spec.t = parse_complex(r.t, bits);
    spec.regime = spec.t.re.is_zero() && !spec.t.im.is_zero() ? Regime::BothImaginary : Regime::BothReal;
  } else {
    bad_arg("--family is two-term or mathieu");
  }
  if (!r.prediction.empty()) spec.prediction = prediction_regime_from_string(r.prediction);
  std::vector<RatioRow> rows;
  if (!r.ladder.empty()) {
    if (r.n < 1) bad_arg("--ladder needs --n");
    std::vector<Real> alphas;
    for (const auto& s : r.ladder) alphas.push_back(parse_real(s, bits));
    rows = ratio_ladder(spec, r.n, alphas);
  } else {
    if (r.alpha.empty() || r.nmin < 1 || r.nmax < r.nmin) bad_arg("give --ladder with --n, or --alpha with --nmin/--nmax");
    rows = ratio_over_n(spec, parse_real(r.alpha, bits), r.nmin, r.nmax, cfg.threads);
  }
  if (cfg.format == "json") out << ratio_json(rows) << '\n';
  else write_ratio_csv(out, rows);
}

// --- poly -----------------------------------------------------------------

void cmd_poly(int n, int K, const RunConfig& cfg, std::ostream& out) {
  if (n < 1) bad_arg("--n must be positive");
  if (K < 1) bad_arg("--K must be positive");
  const GapPolynomial p = K == 2 ? p_polynomial_exact(n) : p_polynomial_general(n, K);
  if (cfg.format == "json") {
    json j = json::parse(p.to_json());
    j["K"] = K;
    j["expanded"] = p.to_string();
    out << j.dump() << '\n';
    return;
  }
  if (K == 2) out << "power,coefficient\n";
  else {
    for (int i = 1; i < K; ++i) out << "t" << i << "_power,";
    out << "coefficient\n";
  }
  for (const auto& [e, c] : p.terms()) {
    for (int x : e) out << x << ',';
    out << c.get_num().get_str() << '/' << c.get_den().get_str() << '\n';
  }
}

// --- identity -------------------------------------------------------------

void cmd_identity(bool even, bool odd, int m, const RunConfig& cfg, std::ostream& out) {
  if (even == odd) bad_arg("choose one of --even, --odd");
  if (m < 1) bad_arg("--m must be positive");
  const IdentityParity parity = even ? IdentityParity::Even : IdentityParity::Odd;
  if (cfg.format == "json") {
    json arr = json::array();
    const int kmax = even ? m : m - 1;
    for (int k = 1; k <= kmax; ++k) {
      const IdentitySides s = identity_sides(m, k, parity);
      arr.push_back({{"m", m}, {"k", k}, {"parity", even ? "even" : "odd"}, {"lhs", s.lhs.get_str()},
                     {"rhs", s.rhs.get_str()}, {"equal", s.lhs == s.rhs}});
    }
    out << arr.dump() << '\n';
    return;
  }
  write_identity_csv(out, m, parity);
}

// --- qes ------------------------------------------------------------------

void cmd_qes(const std::string& alpha, long t, int nmax, const std::string& tol, const RunConfig& cfg, std::ostream& out) {
  if (nmax < 1) bad_arg("--nmax must be positive");
  const Bits bits = cfg.bits();
  const Real a = parse_real(alpha, bits);
  const ScanReport rep = tol.empty() ? closed_gap_scan(a, t, nmax) : closed_gap_scan(a, t, nmax, parse_real(tol, bits));
  if (cfg.format == "json") out << scan_json(rep) << '\n';
  else write_scan_csv(out, rep);
}

bool is_argument_error(ErrorCode c) {
  return c == ErrorCode::InvalidArgument || c == ErrorCode::InvalidPotential || c == ErrorCode::RangeError;
}

void error_object(std::ostream& err, const std::string& kind, const std::string& message, const std::string& diag) {
  err << json{{"error", kind}, {"message", message}, {"diagnostics", diag}}.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral gaps of Hill operators", "hillgap-cli"};
  app.require_subcommand(1);
  RunConfig cfg;
  long bits_flag = 0;
  app.add_option("--precision-bits", bits_flag, "working precision (>= 64)");
  app.add_option("--rel-tol", cfg.rel_tol, "relative tolerance in (0, 0.1]");
  app.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", cfg.threads, "worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);

  GapsArgs gaps;
  auto* g = app.add_subcommand("gaps", "instability zone lengths");
  add_potential_options(g, gaps.pot);
  g->add_option("--nmax", gaps.nmax, "largest zone index");
  g->add_option("--method", gaps.method, "matrix, series or both");
  g->add_flag("--allow-outside-validity", gaps.outside_validity, "run the series where 9||v|| > n");
  g->add_option("--export-potential", gaps.export_path, "write the potential as JSON");

  PredictArgs pred;
  auto* p = app.add_subcommand("predict", "closed-form gap predictions");
  p->add_option("--regime", pred.regime, "alpha_to_zero, n_to_infty, coeff_form, mathieu_small_a, mathieu_large_n");
  p->add_option("--alpha", pred.alpha);
  p->add_option("--t", pred.t);
  p->add_option("--a1", pred.a1);
  p->add_option("--a2", pred.a2);
  p->add_option("--a", pred.a, "Mathieu amplitude");
  p->add_option("--nmin", pred.nmin);
  p->add_option("--nmax", pred.nmax);

  RatioArgs ratio;
  auto* r = app.add_subcommand("ratio", "computed gaps against predictions");
  r->add_option("--family", ratio.family, "two-term or mathieu");
  r->add_option("--t", ratio.t);
  r->add_option("--prediction", ratio.prediction, "prediction regime");
  r->add_option("--method", ratio.method, "auto, matrix or series");
  r->add_option("--ladder", ratio.ladder, "alpha values at fixed --n")->delimiter(',');
  r->add_option("--n", ratio.n);
  r->add_option("--alpha", ratio.alpha);
  r->add_option("--nmin", ratio.nmin);
  r->add_option("--nmax", ratio.nmax);

  int poly_n = 0, poly_k = 2;
  auto* po = app.add_subcommand("poly", "exact leading polynomial P_n");
  po->add_option("--n", poly_n)->required();
  po->add_option("--K", poly_k, "largest step is 2K");

  bool even = false, odd = false;
  int m = 0;
  auto* id = app.add_subcommand("identity", "integer identity certificates");
  id->add_flag("--even", even);
  id->add_flag("--odd", odd);
  id->add_option("--m", m)->required();

  std::string q_alpha, q_tol;
  long q_t = 0;
  int q_nmax = 10;
  auto* q = app.add_subcommand("qes", "closed-zone scan at integer t");
  q->add_option("--alpha", q_alpha)->required();
  q->add_option("--t", q_t)->required();
  q->add_option("--nmax", q_nmax);
  q->add_option("--tol", q_tol, "closed/open threshold");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    error_object(err, "argument", e.what(), "");
    return 1;
  }

  try {
    if (bits_flag != 0) {
      cfg.precision_bits = static_cast<Bits>(bits_flag);
    } else if (const char* env = std::getenv("HILLGAP_PRECISION")) {
      try {
        cfg.precision_bits = static_cast<Bits>(std::stol(env));
      } catch (const std::exception&) {
        bad_arg("HILLGAP_PRECISION is not an integer");
      }
    }
    if (cfg.precision_bits && *cfg.precision_bits < 64) bad_arg("precision must be at least 64 bits");
    const Real rt = parse_real(cfg.rel_tol, 64);
    if (rt.sign() <= 0 || rt > Real(0.1)) bad_arg("--rel-tol must lie in (0, 0.1]");
    PrecisionScope scope(cfg.bits());

    if (*g) cmd_gaps(gaps, cfg, out);
    else if (*p) cmd_predict(pred, cfg, out);
    else if (*r) cmd_ratio(ratio, cfg, out);
    else if (*po) cmd_poly(poly_n, poly_k, cfg, out);
    else if (*id) cmd_identity(even, odd, m, cfg, out);
    else if (*q) cmd_qes(q_alpha, q_t, q_nmax, q_tol, cfg, out);
  } catch (const Error& e) {
    const bool arg = is_argument_error(e.code());
    error_object(err, std::string(to_string(e.code())), e.what(), e.diagnostics());
    return arg ? 1 : 2;
  } catch (const std::exception& e) {
    error_object(err, "internal", e.what(), "");
    return 2;
  }
  return 0;
}

}  // namespace hillgap
