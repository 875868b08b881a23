#pragma once

// First-order nonlinear systems du/dt_j = f_j(x, t, u, u_x): linearization
// along a solution, the theta-rotated systems, their Hamiltonian lifts, and
// the characteristic-set test.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dcmicro/fbi.hpp"
#include "dcmicro/jets.hpp"

namespace dcmicro {

struct NonlinearSystem {
  std::string name;
  std::string description;
  int d = 1;  // space dimension (x)
  int n = 1;  // number of equations / time variables (t)
  // Arguments ordered (x_1..x_d, t_1..t_n, zeta_0, zeta_1..zeta_d); returns f_1..f_n.
  std::function<std::vector<cplx>(const std::vector<cplx>&)> f;
  std::function<std::vector<Taylor>(const std::vector<Taylor>&)> f_series;
  std::vector<std::string> solutions;  // corpus functions of (x, t) solving the system
  std::string regularity = "analytic";

  int nargs() const { return d + n + 1 + d; }
};

template <class F>
NonlinearSystem make_system(std::string name, int d, int n, F formula, std::vector<std::string> solutions,
                            std::string description) {
  NonlinearSystem s;
  s.name = std::move(name);
  s.d = d;
  s.n = n;
  s.f = [formula](const std::vector<cplx>& v) { return formula(v); };
  s.f_series = [formula](const std::vector<Taylor>& v) { return formula(v); };
  s.solutions = std::move(solutions);
  s.description = std::move(description);
  return s;
}

const std::vector<std::string>& system_names();
NonlinearSystem corpus_system(const std::string& name);

// Cauchy-Riemann residual of f in (zeta_0, zeta) at sampled points.
double holomorphy_residual(const NonlinearSystem& sys, int samples, unsigned long long seed = 0);

struct SolutionReport {
  double residual = 0.0;
  double scale = 1.0;
  bool admitted = false;
};
// sup_j |du/dt_j - f_j(x, t, u, u_x)| over the grid; admitted iff <= tol * scale.
SolutionReport check_solution(const NonlinearSystem& sys, const JetFunction& u,
                              const std::vector<std::vector<double>>& grid, double tol = 1e-6);

// a_jk = df_j/dzeta_k (x, t, u, u_x); rows j = 0..n-1.  `point` is (x, t).
std::vector<std::vector<cplx>> linearize(const NonlinearSystem& sys, const JetFunction& u, std::span<const double> point);
// Same by central differences in zeta_k (cross-check).
std::vector<std::vector<cplx>> linearize_fd(const NonlinearSystem& sys, const JetFunction& u, std::span<const double> point);

struct CharacteristicResult {
  bool characteristic = false;
  double margin = 0.0;     // max over j and the theta grid
  double reduction = 0.0;  // max_j max(|Im a_j.xi|, |tau_j - Re a_j.xi|)
  double tolerance = 0.0;
};
CharacteristicResult characteristic_test(const std::vector<std::vector<cplx>>& a, std::span<const double> xi,
                                         std::span<const double> tau, int theta_points = 64);

// f^theta_j = e^{-i theta}(tau_j - f_j); arguments (x, t, zeta_0, zeta, tau).
struct ThetaSystem {
  const NonlinearSystem* base;
  double theta;
  int nargs() const { return base->nargs() + base->n; }
  std::vector<cplx> eval(const std::vector<cplx>& args) const;
  std::vector<Taylor> eval_series(const std::vector<Taylor>& args) const;
  // d f^theta_j / d args[k]
  std::vector<std::vector<cplx>> partials(const std::vector<cplx>& args) const;
};
ThetaSystem theta_system(const NonlinearSystem& sys, double theta);

// (h_j0, h_j1, ..., h_j(d+n)) at args = (x, t, zeta_0, zeta, tau).
std::vector<cplx> hamiltonian_coeffs(const NonlinearSystem& sys, double theta, int j, const std::vector<cplx>& args);

// Variables of the lifted space: (x, t, r, zeta_0, zeta, tau).
int lifted_nvars(const NonlinearSystem& sys);
// max over probes and pairs j < k of |[H_j, H_k] Phi| at the lifted point.
double hamiltonian_commutator(const NonlinearSystem& sys, double theta, const std::vector<cplx>& lifted_point);
// |(L_j^theta)^u Phi^u - (H_j^theta Phi)^u| maximised over probes and j at (x, t, r).
double substitution_identity_residual(const NonlinearSystem& sys, const JetFunction& u, double theta,
                                      std::span<const double> xtr);

struct FlaggedDirection {
  std::vector<double> point;  // (x, t)
  std::vector<double> direction;  // (xi, tau), unit
  bool characteristic = false;
  double distance_to_char = 0.0;  // distance of the unit direction to the characteristic set
};

struct WfInclusionConfig {
  std::vector<std::vector<double>> points;  // (x, t) base points
  int directions = 16;
  double margin = 0.05;
  std::string sequence = "gevrey2";
  Ladder ladder{4.0, 7};
};

struct WfInclusionReport {
  std::string system;
  std::string solution;
  double residual = 0.0;
  std::vector<FlaggedDirection> flagged;
  int scanned = 0;
  bool pass = false;
  nlohmann::json to_json() const;
};

WfInclusionReport wf_inclusion_experiment(const NonlinearSystem& sys, const std::string& solution,
                                          const WfInclusionConfig& cfg);

}  // namespace dcmicro
