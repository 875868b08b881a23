#include "dcmicro/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "dcmicro/corpus.hpp"
#include "dcmicro/errors.hpp"
#include "dcmicro/extension.hpp"
#include "dcmicro/fbi.hpp"
#include "dcmicro/nonlinear.hpp"
#include "dcmicro/sequence.hpp"

namespace dcmicro {

using nlohmann::json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string to_csv(const Table& t) {
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += field(cells[i]);
    }
    out += "\r\n";
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

namespace {

const std::map<std::string, std::set<std::string>>& kind_metrics() {
  static const std::map<std::string, std::set<std::string>> m = {
      {"seq", {"validation_pass", "laws_pass", "law_violations", "c", "c_moderate"}},
      {"extend",
       {"delta", "C", "Q", "decay_finite", "decay_stable", "decay_conforms", "envelope_violations", "max_residual",
        "jet_slopes_pass", "min_jet_slope", "boundary_error"}},
      {"fbi",
       {"cells", "regular_cells", "exponential_cells", "none_cells", "all_regular", "all_exponential", "none_regular",
        "regular_xi_neg", "regular_xi_pos", "min_xi_F", "max_xi_F"}},
      {"wf", {"scanned", "flagged_count", "flagged_outside"}},
      {"invert", {"max_error", "rel_error", "sup_u"}},
      {"nonlinear",
       {"residual", "admitted", "holomorphy_residual", "max_h0", "max_commutator", "max_substitution", "wf_pass",
        "flagged_count", "max_flag_distance"}},
  };
  return m;
}

const std::map<std::string, std::set<std::string>>& kind_keys() {
  static const std::set<std::string> common = {"kind", "name", "sequence", "seed", "assert", "description"};
  static const std::map<std::string, std::set<std::string>> m = [] {
    std::map<std::string, std::set<std::string>> k = {
        {"seq", {"K", "grid_points", "j_max", "random_cases"}},
        {"extend",
         {"function", "chart", "mode", "kappa", "eps", "C", "V", "u_points", "shells", "K_test", "stability", "jets",
          "min_slope", "class_grid", "class_K"}},
        {"fbi",
         {"member", "chart", "lambda", "points", "directions", "ladder", "K_test", "stability", "noise_floor"}},
        {"wf",
         {"member", "chart", "lambda", "points", "directions", "ladder", "K_test", "stability", "expected_singular",
          "radius"}},
        {"invert", {"member", "x_min", "x_max", "x_points", "cutoff", "eps_ladder", "richardson_order", "R_factor"}},
        {"nonlinear",
         {"system", "solution", "points", "directions", "margin", "ladder", "random_points", "tolerance"}},
    };
    for (auto& [_, s] : k) s.insert(common.begin(), common.end());
    return k;
  }();
  return m;
}

RegularSequence sequence_of(const json& doc) {
  if (!doc.contains("sequence")) return RegularSequence::gevrey(2.0);
  return RegularSequence::from_json(doc.at("sequence"));
}

std::vector<std::vector<double>> points_of(const json& j) {
  std::vector<std::vector<double>> out;
  for (const auto& p : j) {
    if (p.is_number())
      out.push_back({p.get<double>()});
    else
      out.push_back(p.get<std::vector<double>>());
  }
  return out;
}

Ladder ladder_of(const json& doc, Ladder def) {
  if (!doc.contains("ladder")) return def;
  const auto& l = doc.at("ladder");
  return Ladder{l.value("zeta_min", def.zeta_min), l.value("rungs", def.rungs)};
}

Box box_of(const json& j) { return Box{j.at("lo").get<std::vector<double>>(), j.at("hi").get<std::vector<double>>()}; }

std::string default_chart(int m) { return m == 1 ? "chart_flat" : "chart_flat2"; }

struct Outcome {
  json summary;
  json metrics;
  std::vector<Table> tables;
};

// ---------------------------------------------------------------------------

Outcome run_seq(const ExperimentConfig& cfg) {
  const auto& d = cfg.params;
  const auto seq = sequence_of(d);
  const int K = d.value("K", seq.k_max());
  const auto val = validate(seq, K);
  const auto laws = check_laws(seq, d.value("grid_points", 100), d.value("j_max", 12), d.value("random_cases", 10000),
                               cfg.seed);
  Outcome o;
  long long violations = 0;
  for (const auto& c : laws.checks)
    if (c.gating) violations += c.violations;
  o.summary = {{"sequence", seq.describe()}, {"validation", val.to_json()}, {"laws", laws.to_json()}};
  o.metrics = {{"validation_pass", val.all_pass()}, {"laws_pass", laws.all_pass()}, {"law_violations", violations},
               {"c", seq.c()}, {"c_moderate", seq.c_moderate()}};

  AssociatedEvaluator A(seq);
  Table t{"associated", {"r", "h", "h1", "N"}, {}};
  const int n = d.value("grid_points", 100);
  for (int i = 0; i < n; ++i) {
    const double r = std::pow(10.0, -4.0 + 4.0 * (i + 0.5) / n);
    t.rows.push_back({format_number(r), format_number(A.h(r)), format_number(A.h1(r)), std::to_string(A.bigN(r))});
  }
  Table w{"weights", {"k", "ln_m", "ln_M"}, {}};
  for (int k = 0; k <= seq.k_max(); ++k)
    w.rows.push_back({std::to_string(k), format_number(seq.log_m(k)), format_number(seq.log_M(k))});
  o.tables = {t, w};
  return o;
}

Outcome run_extend(const ExperimentConfig& cfg) {
  const auto& d = cfg.params;
  const auto seq = sequence_of(d);
  auto f = corpus_function(d.at("function").get<std::string>());
  ExtensionConfig ec;
  ec.eps = d.value("eps", ec.eps);
  const std::string mode = d.value("mode", std::string("moderate_growth"));
  if (mode == "fixed_kappa")
    ec.mode = ExtensionMode::fixed_kappa;
  else if (mode != "moderate_growth")
    throw ConfigError("extend: mode must be moderate_growth or fixed_kappa");
  ec.kappa = d.value("kappa", 0);
  ec.class_grid = d.value("class_grid", ec.class_grid);
  ec.class_K = d.value("class_K", ec.class_K);
  if (d.contains("C")) ec.C = d.at("C").get<double>();
  if (d.contains("V")) ec.V = box_of(d.at("V"));

  ChartPtr chart;
  if (d.contains("chart")) chart = corpus_chart(d.at("chart").get<std::string>());
  const ExtensionOperator op =
      chart ? ExtensionOperator::on_chart(seq, chart, f, ec) : ExtensionOperator(seq, f, ec);
  const int m = op.m();
  const auto shells = default_shells(op.delta(), d.value("shells", 8));
  const auto grid = box_grid(op.V(), d.value("u_points", 9));
  const int K_test = d.value("K_test", 8);
  const double stability = d.value("stability", 0.10);

  Outcome o;
  Table field{"field", {}, {}};
  for (int i = 0; i < m; ++i) field.header.push_back("u" + std::to_string(i + 1));
  for (int i = 0; i < m; ++i) {
    const std::string var = chart ? "z" : "v";
    field.header.push_back("re_" + var + std::to_string(i + 1));
    field.header.push_back("im_" + var + std::to_string(i + 1));
  }
  for (const char* h : {"re_F", "im_F", "residual", "dist"}) field.header.push_back(h);

  DecayReport rep;
  double max_res = 0.0;
  if (!chart) {
    const auto fld = build_field(op, grid, shells);
    for (const auto& s : fld.samples) {
      std::vector<std::string> row;
      for (double x : s.u) row.push_back(format_number(x));
      for (double x : s.v) {
        row.push_back(format_number(x));
        row.push_back("0");
      }
      row.insert(row.end(), {format_number(s.F.real()), format_number(s.F.imag()), format_number(s.residual),
                             format_number(std::sqrt(std::inner_product(s.v.begin(), s.v.end(), s.v.begin(), 0.0)))});
      field.rows.push_back(row);
      max_res = std::max(max_res, s.residual);
    }
    rep = fit_decay(fld, seq, K_test, stability);
  } else {
    // z = Z(u) + i v; the dbar residual is measured against dist(z, Sigma).
    std::map<double, double> by_dist;
    for (const auto& u : grid)
      for (double rho : shells)
        for (const auto& dir : shell_directions(m)) {
          const VecC Z = chart->Z(u);
          VecC z = Z;
          std::vector<double> v;
          for (int i = 0; i < m; ++i) {
            v.push_back(rho * dir[i]);
            z[i] += cplx(0.0, v[i]);
          }
          const auto r = dbar_residual_on_manifold(*chart, op, z);
          double res = 0.0;
          for (const auto& c : r.dbar) res = std::max(res, std::abs(c));
          max_res = std::max(max_res, res);
          auto& slot = by_dist[r.dist];
          slot = std::max(slot, res);
          const cplx F = evaluate_extension(op, u, v);
          std::vector<std::string> row;
          for (double x : u) row.push_back(format_number(x));
          for (int i = 0; i < m; ++i) {
            row.push_back(format_number(z[i].real()));
            row.push_back(format_number(z[i].imag()));
          }
          row.insert(row.end(),
                     {format_number(F.real()), format_number(F.imag()), format_number(res), format_number(r.dist)});
          field.rows.push_back(row);
        }
    rep = fit_decay(by_dist, seq, K_test, stability);
  }

  int env_viol = 0;
  for (const auto& [rho, margins] : rep.per_k_margin)
    for (double mg : margins)
      if (mg < -1e-9) ++env_viol;

  // F restricted to v = 0+ must reproduce f.
  double boundary = 0.0;
  const std::vector<double> tiny(m, 1e-9 / std::sqrt(static_cast<double>(m)));
  for (const auto& u : grid) boundary = std::max(boundary, std::abs(evaluate_extension(op, u, tiny) - f->eval(u)));

  json jets = json::array();
  bool slopes_pass = true;
  double min_slope = std::numeric_limits<double>::infinity();
  Table jt{"jet_consistency", {"beta", "gamma", "rho", "D"}, {}};
  if (d.contains("jets")) {
    const double ms = d.value("min_slope", 0.9);
    std::vector<double> u0(m);
    for (int i = 0; i < m; ++i) u0[i] = 0.5 * (op.V().lo[i] + op.V().hi[i]);
    for (const auto& jj : d.at("jets")) {
      const auto beta = jj.at("beta").get<std::vector<int>>();
      const auto gamma = jj.at("gamma").get<std::vector<int>>();
      const auto s = jet_consistency(op, u0, beta, gamma, shells, ms);
      slopes_pass = slopes_pass && s.pass;
      if (!s.exact) min_slope = std::min(min_slope, s.slope);
      json e = s.to_json();
      e["beta"] = beta;
      e["gamma"] = gamma;
      jets.push_back(e);
      for (size_t i = 0; i < s.rho.size(); ++i)
        jt.rows.push_back({json(beta).dump(), json(gamma).dump(), format_number(s.rho[i]), format_number(s.D[i])});
    }
  }
  if (!std::isfinite(min_slope)) min_slope = 0.0;

  Table shells_t{"shells", {"rho", "sup_residual"}, {}};
  for (const auto& [rho, s] : rep.per_shell_sup) shells_t.rows.push_back({format_number(rho), format_number(s)});

  o.summary = {{"operator", op.describe()}, {"decay", rep.to_json()}, {"jets", jets}, {"boundary_error", boundary}};
  if (chart) o.summary["chart"] = chart->name();
  o.metrics = {{"delta", op.delta()},
               {"C", op.C()},
               {"Q", rep.Q},
               {"decay_finite", rep.finite},
               {"decay_stable", rep.stable},
               {"decay_conforms", rep.conforms()},
               {"envelope_violations", env_viol},
               {"max_residual", max_res},
               {"jet_slopes_pass", slopes_pass},
               {"min_jet_slope", min_slope},
               {"boundary_error", boundary}};
  o.tables = {field, shells_t};
  if (!jt.rows.empty()) o.tables.push_back(jt);
  return o;
}

struct ScanSetup {
  CorpusMember member;
  FBIKernel kernel;
  std::vector<std::vector<double>> points;
  std::vector<std::vector<double>> directions;
  Ladder ladder;
  DecayFitOptions dopt;
};

ScanSetup scan_setup(const json& d, Ladder def_ladder) {
  ScanSetup s;
  s.member = corpus_member(d.at("member").get<std::string>());
  const int m = s.member.m;
  s.kernel.lambda = d.value("lambda", 1.0);
  s.kernel.chart = corpus_chart(d.value("chart", default_chart(m)));
  if (s.kernel.chart->dim() != m) throw ConfigError("chart dimension does not match the member");
  if (d.contains("points"))
    s.points = points_of(d.at("points"));
  else
    s.points = {std::vector<double>(m, 0.0)};
  for (const auto& p : s.points)
    if (static_cast<int>(p.size()) != m) throw ConfigError("point dimension does not match the member");
  s.directions = unit_directions(m, d.value("directions", 8));
  s.ladder = ladder_of(d, def_ladder);
  s.dopt.K_test = d.value("K_test", s.dopt.K_test);
  s.dopt.stability = d.value("stability", s.dopt.stability);
  s.dopt.noise_floor = d.value("noise_floor", s.dopt.noise_floor);
  return s;
}

Table cells_table(const std::vector<ScanCell>& cells, int m, const std::string& name) {
  Table t{name, {}, {}};
  for (int i = 0; i < m; ++i) t.header.push_back("x" + std::to_string(i + 1));
  for (int i = 0; i < m; ++i) t.header.push_back("xi" + std::to_string(i + 1));
  for (const char* h : {"class", "A", "A_drop", "rate", "power", "rel_residual"}) t.header.push_back(h);
  for (const auto& c : cells) {
    std::vector<std::string> row;
    for (double x : c.point) row.push_back(format_number(x));
    for (double x : c.direction) row.push_back(format_number(x));
    row.insert(row.end(), {to_string(c.fit.cls), format_number(c.fit.A), format_number(c.fit.A_drop),
                           format_number(c.fit.rate), format_number(c.fit.power), format_number(c.fit.rel_residual)});
    t.rows.push_back(row);
  }
  return t;
}

Outcome run_fbi(const ExperimentConfig& cfg) {
  const auto& d = cfg.params;
  const auto seq = sequence_of(d);
  const auto s = scan_setup(d, Ladder{});
  const int m = s.member.m;
  const auto scan = wavefront_scan(s.member, s.kernel, s.points, s.directions, seq, s.ladder, {}, s.dopt);

  Table samples{"samples", {}, {}};
  for (int i = 0; i < m; ++i) samples.header.push_back("x" + std::to_string(i + 1));
  for (int i = 0; i < m; ++i) samples.header.push_back("xi" + std::to_string(i + 1));
  for (const char* h : {"abs_zeta", "re_F", "im_F"}) samples.header.push_back(h);

  int regular = 0, expo = 0, none = 0;
  bool neg_all = true, pos_all = true;
  double min_xf = std::numeric_limits<double>::infinity(), max_xf = 0.0;
  json cells = json::array();
  for (const auto& c : scan.cells) {
    if (c.fit.regular()) ++regular;
    if (c.fit.cls == DecayClass::exponential) ++expo;
    if (c.fit.cls == DecayClass::none) ++none;
    if (m == 1 && c.direction[0] < 0) neg_all = neg_all && c.fit.regular();
    if (m == 1 && c.direction[0] > 0) pos_all = pos_all && c.fit.regular();
    for (size_t k = 0; k < c.ladder.size(); ++k) {
      const double xf = c.ladder[k] * std::abs(c.values[k]);
      min_xf = std::min(min_xf, xf);
      max_xf = std::max(max_xf, xf);
      std::vector<std::string> row;
      for (double x : c.point) row.push_back(format_number(x));
      for (double x : c.direction) row.push_back(format_number(x));
      row.insert(row.end(),
                 {format_number(c.ladder[k]), format_number(c.values[k].real()), format_number(c.values[k].imag())});
      samples.rows.push_back(row);
    }
    json e = c.fit.to_json();
    e["point"] = c.point;
    e["direction"] = c.direction;
    cells.push_back(e);
  }
  const int n = static_cast<int>(scan.cells.size());
  Outcome o;
  o.summary = {{"member", s.member.name},
               {"chart", s.kernel.chart->name()},
               {"lambda", s.kernel.lambda},
               {"ladder", s.ladder.values()},
               {"cells", cells}};
  o.metrics = {{"cells", n},
               {"regular_cells", regular},
               {"exponential_cells", expo},
               {"none_cells", none},
               {"all_regular", regular == n},
               {"all_exponential", expo == n},
               {"none_regular", regular == 0},
               {"regular_xi_neg", m == 1 && neg_all},
               {"regular_xi_pos", m == 1 && pos_all},
               {"min_xi_F", std::isfinite(min_xf) ? min_xf : 0.0},
               {"max_xi_F", max_xf}};
  o.tables = {samples, cells_table(scan.cells, m, "classification")};
  return o;
}

Outcome run_wf(const ExperimentConfig& cfg) {
  const auto& d = cfg.params;
  const auto seq = sequence_of(d);
  const auto s = scan_setup(d, Ladder{});
  const int m = s.member.m;
  const auto scan = wavefront_scan(s.member, s.kernel, s.points, s.directions, seq, s.ladder, {}, s.dopt);
  const auto expected = d.contains("expected_singular") ? points_of(d.at("expected_singular"))
                                                        : std::vector<std::vector<double>>{};
  const double radius = d.value("radius", 1e-9);
  std::vector<ScanCell> flagged;
  int outside = 0;
  for (const ScanCell* c : scan.flagged()) {
    flagged.push_back(*c);
    bool near = false;
    for (const auto& e : expected) {
      double dd = 0.0;
      for (int i = 0; i < m; ++i) dd += (c->point[i] - e[i]) * (c->point[i] - e[i]);
      near = near || std::sqrt(dd) <= radius;
    }
    if (!near) ++outside;
  }
  Outcome o;
  json fl = json::array();
  for (const auto& c : flagged) fl.push_back({{"point", c.point}, {"direction", c.direction}});
  o.summary = {{"member", s.member.name}, {"chart", s.kernel.chart->name()}, {"ladder", s.ladder.values()},
               {"flagged", fl}};
  o.metrics = {{"scanned", static_cast<int>(scan.cells.size())},
               {"flagged_count", static_cast<int>(flagged.size())},
               {"flagged_outside", outside}};
  o.tables = {cells_table(scan.cells, m, "scan"), cells_table(flagged, m, "flagged")};
  return o;
}

Outcome run_invert(const ExperimentConfig& cfg) {
  const auto& d = cfg.params;
  const auto u = corpus_member(d.at("member").get<std::string>());
  if (u.m != 1) throw ConfigError("invert: only m = 1 members");
  Cutoff chi{{0.0}, 0.5, 0.9};
  if (d.contains("cutoff")) {
    const auto& c = d.at("cutoff");
    chi.center = {c.value("center", 0.0)};
    chi.a = c.value("a", chi.a);
    chi.b = c.value("b", chi.b);
  }
  const double lo = d.value("x_min", chi.center[0] - 0.5 * chi.b), hi = d.value("x_max", chi.center[0] + 0.5 * chi.b);
  const int n = d.value("x_points", 11);
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
  InversionOptions io;
  if (d.contains("eps_ladder")) io.eps_ladder = d.at("eps_ladder").get<std::vector<double>>();
  io.richardson_order = d.value("richardson_order", io.richardson_order);
  io.R_factor = d.value("R_factor", io.R_factor);
  const auto r = inversion(u, corpus_chart("chart_flat"), xs, chi, io);
  Table t{"inversion", {"x", "re_rec", "im_rec", "target"}, {}};
  for (size_t i = 0; i < xs.size(); ++i)
    t.rows.push_back({format_number(xs[i]), format_number(r.reconstructed[i].real()),
                      format_number(r.reconstructed[i].imag()), format_number(r.target[i])});
  Outcome o;
  o.summary = r.to_json();
  o.summary["member"] = u.name;
  o.metrics = {{"max_error", r.max_error},
               {"rel_error", r.sup_u > 0 ? r.max_error / r.sup_u : r.max_error},
               {"sup_u", r.sup_u}};
  o.tables = {t};
  return o;
}

Outcome run_nonlinear(const ExperimentConfig& cfg) {
  const auto& d = cfg.params;
  const auto sys = corpus_system(d.at("system").get<std::string>());
  const std::string sol = d.value("solution", sys.solutions.empty() ? std::string() : sys.solutions.front());
  if (sol.empty()) throw ConfigError("nonlinear: system has no corpus solution");
  const auto u = corpus_function(sol);
  const double tol = d.value("tolerance", 1e-6);
  const auto check = check_solution(sys, *u, box_grid(u->domain(), 5), tol);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> U(-0.5, 0.5), T(0.0, 2.0 * std::acos(-1.0));
  const int samples = d.value("random_points", 100);
  double h0 = 0.0, comm = 0.0, subst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double theta = T(rng);
    std::vector<cplx> args(sys.nargs() + sys.n);
    for (int i = 0; i < sys.d + sys.n; ++i) args[i] = U(rng);
    for (size_t i = sys.d + sys.n; i < args.size(); ++i) args[i] = cplx(U(rng), U(rng));
    for (int j = 0; j < sys.n; ++j) h0 = std::max(h0, std::abs(hamiltonian_coeffs(sys, theta, j, args)[0]));
    if (sys.n >= 2) {
      std::vector<cplx> lp(lifted_nvars(sys));
      for (auto& v : lp) v = cplx(U(rng), U(rng));
      comm = std::max(comm, hamiltonian_commutator(sys, theta, lp));
    }
    std::vector<double> xtr;
    const Box& dom = u->domain();
    for (int i = 0; i < sys.d + sys.n; ++i) {
      const double c = 0.5 * (dom.lo[i] + dom.hi[i]), w = 0.25 * (dom.hi[i] - dom.lo[i]);
      xtr.push_back(c + 2.0 * w * U(rng));
    }
    for (int j = 0; j < sys.n; ++j) xtr.push_back(U(rng));
    subst = std::max(subst, substitution_identity_residual(sys, *u, theta, xtr));
  }

  Outcome o;
  o.summary = {{"system", sys.name}, {"solution", sol}, {"residual", check.residual}, {"admitted", check.admitted}};
  o.metrics = {{"residual", check.residual},
               {"admitted", check.admitted},
               {"holomorphy_residual", holomorphy_residual(sys, 50, cfg.seed)},
               {"max_h0", h0},
               {"max_commutator", comm},
               {"max_substitution", subst},
               {"wf_pass", false},
               {"flagged_count", 0},
               {"max_flag_distance", 0.0}};

  if (sys.d + sys.n == 2 && check.admitted) {
    WfInclusionConfig wc;
    if (d.contains("points")) wc.points = points_of(d.at("points"));
    wc.directions = d.value("directions", wc.directions);
    wc.margin = d.value("margin", wc.margin);
    wc.ladder = ladder_of(d, wc.ladder);
    const auto rep = wf_inclusion_experiment(sys, sol, wc);
    double worst = 0.0;
    Table t{"flagged", {"x", "t", "xi", "tau", "characteristic", "distance_to_char"}, {}};
    for (const auto& f : rep.flagged) {
      worst = std::max(worst, f.distance_to_char);
      t.rows.push_back({format_number(f.point[0]), format_number(f.point[1]), format_number(f.direction[0]),
                        format_number(f.direction[1]), f.characteristic ? "true" : "false",
                        format_number(f.distance_to_char)});
    }
    o.summary["wf"] = rep.to_json();
    o.metrics["wf_pass"] = rep.pass;
    o.metrics["flagged_count"] = static_cast<int>(rep.flagged.size());
    o.metrics["max_flag_distance"] = worst;
    o.tables.push_back(t);
  }
  return o;
}

bool compare(const json& actual, const std::string& op, const json& expected) {
  if (actual.is_boolean() || expected.is_boolean()) {
    if (op != "==") return false;
    return actual == expected;
  }
  const double a = actual.get<double>(), e = expected.get<double>();
  if (op == "<=") return a <= e;
  if (op == ">=") return a >= e;
  if (op == "<") return a < e;
  if (op == ">") return a > e;
  return a == e;
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> k = {"extend", "fbi", "invert", "nonlinear", "seq", "wf"};
  return k;
}

ExperimentConfig parse_config(const json& doc) {
  try {
    if (!doc.is_object()) throw ConfigError("config must be an object");
    ExperimentConfig cfg;
    cfg.kind = doc.at("kind").get<std::string>();
    const auto km = kind_metrics().find(cfg.kind);
    if (km == kind_metrics().end()) throw ConfigError("unknown experiment kind '" + cfg.kind + "'");
    const auto& keys = kind_keys().at(cfg.kind);
    for (const auto& [k, _] : doc.items())
      if (!keys.count(k)) throw ConfigError("unknown key '" + k + "' for kind " + cfg.kind);
    cfg.name = doc.value("name", cfg.kind);
    if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos)
      throw ConfigError("name must be a plain file stem");
    cfg.seed = doc.value("seed", std::uint64_t{0});
    cfg.params = doc;
    (void)sequence_of(doc);

    // Resolve every corpus name now so typos are config errors.
    if (doc.contains("function")) (void)corpus_function(doc.at("function").get<std::string>());
    if (doc.contains("member")) (void)corpus_member(doc.at("member").get<std::string>());
    if (doc.contains("chart")) (void)corpus_chart(doc.at("chart").get<std::string>());
    if (doc.contains("system")) {
      const auto sys = corpus_system(doc.at("system").get<std::string>());
      if (doc.contains("solution")) (void)corpus_function(doc.at("solution").get<std::string>());
    }
    for (const char* req : {"function", "member", "system"}) {
      const bool needed = (cfg.kind == "extend" && std::string(req) == "function") ||
                          ((cfg.kind == "fbi" || cfg.kind == "wf" || cfg.kind == "invert") &&
                           std::string(req) == "member") ||
                          (cfg.kind == "nonlinear" && std::string(req) == "system");
      if (needed && !doc.contains(req)) throw ConfigError(cfg.kind + ": missing '" + req + "'");
    }

    if (doc.contains("assert")) {
      const auto& a = doc.at("assert");
      if (!a.is_object()) throw ConfigError("assert must be an object");
      for (const auto& [metric, spec] : a.items()) {
        if (!km->second.count(metric)) throw ConfigError("unknown metric '" + metric + "' for kind " + cfg.kind);
        if (spec.is_object()) {
          if (spec.size() != 1) throw ConfigError("assertion on " + metric + " needs exactly one operator");
          const auto& [op, val] = *spec.items().begin();
          static const std::set<std::string> ops = {"<=", ">=", "<", ">", "=="};
          if (!ops.count(op)) throw ConfigError("unknown operator '" + op + "'");
          if (!val.is_number() && !val.is_boolean()) throw ConfigError("assertion value must be a number or bool");
          cfg.assertions.push_back({metric, op, val});
        } else if (spec.is_boolean() || spec.is_number()) {
          cfg.assertions.push_back({metric, "==", spec});
        } else {
          throw ConfigError("assertion on " + metric + " must be a value or {op: value}");
        }
      }
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult res;
  Outcome o;
  try {
    if (cfg.kind == "seq")
      o = run_seq(cfg);
    else if (cfg.kind == "extend")
      o = run_extend(cfg);
    else if (cfg.kind == "fbi")
      o = run_fbi(cfg);
    else if (cfg.kind == "wf")
      o = run_wf(cfg);
    else if (cfg.kind == "invert")
      o = run_invert(cfg);
    else
      o = run_nonlinear(cfg);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    res.summary = {{"kind", cfg.kind}, {"name", cfg.name}, {"seed", cfg.seed}, {"error", e.what()}};
    res.pass = false;
    for (const auto& a : cfg.assertions) res.assertions.push_back({a, nullptr, false});
    res.summary["pass"] = false;
    return res;
  }
  res.summary = o.summary;
  res.summary["kind"] = cfg.kind;
  res.summary["name"] = cfg.name;
  res.summary["seed"] = cfg.seed;
  res.metrics = o.metrics;
  res.tables = std::move(o.tables);
  json verdicts = json::array();
  for (const auto& a : cfg.assertions) {
    AssertionResult r{a, o.metrics.at(a.metric), false};
    r.pass = compare(r.actual, a.op, a.expected);
    res.pass = res.pass && r.pass;
    verdicts.push_back({{"metric", a.metric}, {"op", a.op}, {"expected", a.expected}, {"actual", r.actual},
                        {"pass", r.pass}});
    res.assertions.push_back(r);
  }
  res.summary["metrics"] = o.metrics;
  res.summary["assertions"] = verdicts;
  res.summary["pass"] = res.pass;
  return res;
}

void write_artifacts(const ExperimentConfig& cfg, const RunResult& res, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto write = [&](const std::string& file, const std::string& text) {
    std::ofstream out(out_dir / file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (out_dir / file).string());
    out << text;
  };
  write(cfg.name + ".json", res.summary.dump(2) + "\n");
  for (const auto& t : res.tables) write(cfg.name + "_" + t.name + ".csv", to_csv(t));
  const auto failures = out_dir / (cfg.name + "_failures.json");
  if (!res.pass) {
    json f = json::array();
    for (const auto& a : res.assertions)
      if (!a.pass)
        f.push_back({{"metric", a.assertion.metric}, {"op", a.assertion.op}, {"expected", a.assertion.expected},
                     {"actual", a.actual}});
    json manifest = {{"name", cfg.name}, {"kind", cfg.kind}, {"failed", f}};
    if (res.summary.contains("error")) manifest["error"] = res.summary["error"];
    write(cfg.name + "_failures.json", manifest.dump(2) + "\n");
  } else if (std::filesystem::exists(failures)) {
    std::filesystem::remove(failures);
  }
}

}  // namespace dcmicro
