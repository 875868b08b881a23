#pragma once

// Almost-analytic extension of a C^M vector along a commuting frame:
// F(u, v) = |v|^{-2m} int psi((z - v)/|v|) sum_{|alpha| <= N(|z|)} f_alpha(u) z^alpha d lambda(z),
// f_alpha = s^{|alpha|} X^alpha f / alpha!  (s = 1 on R^m, s = i on a maximally real chart).

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dcmicro/jets.hpp"
#include "dcmicro/manifold.hpp"
#include "dcmicro/mollifier.hpp"
#include "dcmicro/sequence.hpp"

namespace dcmicro {

enum class ExtensionMode { moderate_growth, fixed_kappa };

struct ExtensionConfig {
  double eps = 0.5;
  ExtensionMode mode = ExtensionMode::moderate_growth;
  int kappa = 0;
  int class_K = 24;                  // orders used to fit the class constant C
  int class_grid = 9;                // grid points per axis for the fit
  std::optional<double> C;           // overrides the fitted class constant
  std::optional<Box> V;              // inner box; default: the frame's box or f's domain shrunk by 10%
  int trunc_cap = 0;                 // 0: 40 for m = 1, 12 for m = 2
};

class ExtensionOperator {
 public:
  // Flat space: coordinate frame, s = 1.
  ExtensionOperator(const RegularSequence& seq, JetPtr f, ExtensionConfig cfg = {});
  // General commuting frame with the given s.
  ExtensionOperator(const RegularSequence& seq, VectorFrame frame, JetPtr f, cplx s, ExtensionConfig cfg = {});
  // Manifold variant: frame of the chart, s = i, V = chart box.
  static ExtensionOperator on_chart(const RegularSequence& seq, const ChartPtr& chart, JetPtr f, ExtensionConfig cfg = {});

  int m() const { return m_; }
  const RegularSequence& sequence() const { return *seq_; }
  const JetFunction& function() const { return *f_; }
  const VectorFrame& frame() const { return frame_; }
  const ClassFit& class_fit() const { return fit_; }
  const ExtensionConfig& config() const { return cfg_; }
  const RadialCutoff& cutoff() const { return psi_; }
  const BallRule& rule() const { return rule_; }
  const Box& V() const { return V_; }
  cplx s() const { return s_; }
  double C() const { return C_; }
  double c_eff() const { return c_eff_; }
  // (1 + eps) c_eff e m C
  double factor() const { return factor_; }
  double delta() const { return delta_; }
  int trunc_cap() const { return cap_; }
  // N(factor * r), clamped to the cap.
  int trunc(double r) const;

  // Coefficient table g_alpha = s^{|alpha|} X^{alpha + gamma} f(u) / alpha!, |alpha| <= order.
  Taylor coefficients(std::span<const double> u, std::span<const int> gamma, int order) const;

  nlohmann::json describe() const;

 private:
  void init();

  std::shared_ptr<const RegularSequence> seq_;
  JetPtr f_;
  VectorFrame frame_;
  cplx s_;
  ExtensionConfig cfg_;
  int m_;
  ClassFit fit_;
  RadialCutoff psi_;
  BallRule rule_;
  Box V_;
  double C_ = 0.0, c_eff_ = 1.0, factor_ = 0.0, delta_ = 0.0;
  int cap_ = 40;
  std::shared_ptr<AssociatedEvaluator> assoc_;
};

// F(u, v); v real, 0 <= |v| < delta (v = 0 returns f(u)).
cplx evaluate_extension(const ExtensionOperator& op, std::span<const double> u, std::span<const double> v);
// X^gamma F(u, v).
cplx evaluate_extension(const ExtensionOperator& op, std::span<const double> u, std::span<const double> v,
                        std::span<const int> gamma);
// d_v^beta X^gamma F(u, v) for |beta| <= 2, as a series in v of order 2 (coeff(beta) = derivative / beta!).
Taylor extension_v_jet(const ExtensionOperator& op, std::span<const double> u, std::span<const double> v,
                       std::span<const int> gamma);

// (d/dv_j - s X_j) F(u, v), from the exact decomposition of the integral.
cplx lj_residual(const ExtensionOperator& op, std::span<const double> u, std::span<const double> v, int j);
// Same with d/dv_j by central differences of F (step h).
cplx lj_residual_fd(const ExtensionOperator& op, std::span<const double> u, std::span<const double> v, int j, double h);

// |v| = delta 2^{-j}, j = 1 .. J.
std::vector<double> default_shells(double delta, int J = 8);
// Unit directions of R^m used on each shell.
std::vector<std::vector<double>> shell_directions(int m);

struct ExtensionField {
  std::vector<double> shells;
  struct Sample {
    std::vector<double> u;
    std::vector<double> v;
    cplx F;
    double residual;  // max_j |L_j F|
  };
  std::vector<Sample> samples;
  std::map<double, double> per_shell_sup() const;
};

ExtensionField build_field(const ExtensionOperator& op, const std::vector<std::vector<double>>& u_grid,
                           const std::vector<double>& shells);

struct DecayReport {
  double Q = 0.0;
  bool finite = true;
  bool stable = true;      // Q within 10% of the fit without the smallest shell
  double Q_without_smallest = 0.0;
  int K_test = 0;
  std::map<double, double> per_shell_sup;
  // margin[shell][k] = ln(Q^{k+1} m_k rho^k) - ln(sup residual); >= 0 when conforming
  std::map<double, std::vector<double>> per_k_margin;
  bool conforms() const { return finite && stable; }
  nlohmann::json to_json() const;
};

DecayReport fit_decay(const std::map<double, double>& per_shell_sup, const RegularSequence& seq, int K_test,
                      double stability = 0.10);
DecayReport fit_decay(const ExtensionField& field, const RegularSequence& seq, int K_test, double stability = 0.10);

struct SlopeReport {
  std::vector<double> rho;
  std::vector<double> D;
  double slope = 0.0;
  bool exact = false;  // D vanishes to rounding on every shell
  bool pass = false;
  nlohmann::json to_json() const;
};

// D(rho) = sup_shell |d_v^beta X^gamma F - s^{|beta|} X^{beta + gamma} f| and its log-log slope.
SlopeReport jet_consistency(const ExtensionOperator& op, std::span<const double> u, std::span<const int> beta,
                            std::span<const int> gamma, const std::vector<double>& shells, double min_slope = 0.9);

struct DbarResult {
  std::vector<cplx> dbar;  // d/dz-bar_j F
  double dist = 0.0;       // dist(z, Sigma)
  std::vector<double> u, v;
};

// z = Z(u) + i v; F is the chart extension of f.  Exact decomposition.
DbarResult dbar_residual_on_manifold(const MaximallyRealChart& chart, const ExtensionOperator& op, const VecC& z);
// Same by central differences of F in (Re z, Im z) with step h.
DbarResult dbar_residual_fd(const MaximallyRealChart& chart, const ExtensionOperator& op, const VecC& z, double h);

// (u, v) with z = Z(u) + i v: u = Re z, v = Im z - phi(u).
std::pair<std::vector<double>, std::vector<double>> chart_coordinates(const MaximallyRealChart& chart, const VecC& z);

}  // namespace dcmicro
