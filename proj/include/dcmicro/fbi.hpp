#pragma once

// FBI transforms on maximally real charts, decay classification against
// Denjoy-Carleman envelopes, wave-front scans, inversion and wedge boundary
// values.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dcmicro/corpus.hpp"
#include "dcmicro/manifold.hpp"
#include "dcmicro/sequence.hpp"

namespace dcmicro {

// Gevrey plateau cutoff: 1 for |y - c| <= a, 0 for |y - c| >= b.
struct Cutoff {
  std::vector<double> center;
  double a = 4.0;
  double b = 5.0;
  double operator()(std::span<const double> y) const;
};

struct FBIKernel {
  double lambda = 1.0;
  ChartPtr chart;
};

// det(Id + i z (x) zeta/<zeta>) = 1 + i z.zeta/<zeta>.
cplx jacobian_delta(const VecC& z, const VecC& zeta);
// Determinant of the complex Jacobian of zeta -> zeta + i z <zeta>, by
// central differences (cross-check for the closed form).
cplx jacobian_delta_numeric(const VecC& z, const VecC& zeta);
bool delta_degenerate(const VecC& z, const VecC& zeta, double tol = 1e-8);

struct FBIOptions {
  int points_per_panel = 24;
  double window = 6.5;            // integrate over |x' - x| <= window / sqrt(lambda Re<zeta>)
  std::optional<Cutoff> cutoff;   // default: applied when the member is not compactly supported
  bool no_cutoff = false;
  std::vector<double> eps_ladder; // overrides a boundary-value member's ladder
};

// Default cutoff for a member: none when compactly supported.
std::optional<Cutoff> default_cutoff(const CorpusMember& u);

cplx fbi_transform(const CorpusMember& u, const FBIKernel& kernel, const VecC& z, const VecC& zeta,
                   const FBIOptions& opt = {});
// Classic transform: e^{i(x-y).xi - |xi|(x-y)^2}, no Jacobian factor.
cplx fbi_euclidean(const CorpusMember& u, std::span<const double> x, std::span<const double> xi,
                   const FBIOptions& opt = {});

struct Ladder {
  double zeta_min = 2.0;
  int rungs = 6;
  std::vector<double> values() const;
};

enum class DecayClass { m_regular, exponential, none };
std::string to_string(DecayClass c);

struct DecayFitOptions {
  int K_test = 40;
  double stability = 0.15;       // M-regular if A / A_without_top <= 1 + stability
  double exp_residual = 0.10;     // max relative residual of the fit of log|F|
  double exp_significance = 4.0;  // c (zeta_max - zeta_min) needed to call the decay exponential
  double noise_floor = 1e-12;    // rungs below noise_floor * max|F| are excluded
  bool small_m = false;          // envelope C^{k+1} m_k / |zeta|^k instead of A^{k+1} M_k / |zeta|^k
};

struct DecayClassification {
  DecayClass cls = DecayClass::none;
  double A = 0.0;
  double A_drop = 0.0;
  double rate = 0.0;
  double rel_residual = 0.0;
  double power = 0.0;  // fitted polynomial prefactor exponent
  int valid_rungs = 0;
  std::string normalization = "M";
  bool regular() const { return cls != DecayClass::none; }
  nlohmann::json to_json() const;
};

DecayClassification decay_fit(std::span<const double> ladder, std::span<const cplx> values, const RegularSequence& seq,
                              const DecayFitOptions& opt = {});

struct ScanCell {
  std::vector<double> point;
  std::vector<double> direction;  // unit real xi
  std::vector<double> ladder;
  std::vector<cplx> values;
  DecayClassification fit;
};

struct ScanResult {
  std::vector<ScanCell> cells;
  std::vector<const ScanCell*> flagged() const;
};

ScanResult wavefront_scan(const CorpusMember& u, const FBIKernel& kernel, const std::vector<std::vector<double>>& points,
                          const std::vector<std::vector<double>>& directions, const RegularSequence& seq,
                          const Ladder& ladder = {}, const FBIOptions& fopt = {}, const DecayFitOptions& dopt = {});

// Unit directions: {-1, +1} for m = 1, `count` equally spaced angles for m = 2.
std::vector<std::vector<double>> unit_directions(int m, int count);

struct InversionOptions {
  // Empty: {0.1, 0.03, 0.01} scale^2 with scale = plateau radius of the cutoff.
  std::vector<double> eps_ladder;
  int richardson_order = 2;
  double R_factor = 6.0;  // |zeta| <= R_factor / sqrt(eps)
  int points_per_panel = 16;
};

struct InversionResult {
  std::vector<double> x;
  std::vector<cplx> reconstructed;
  std::vector<std::vector<cplx>> per_eps;  // per_eps[e][i]
  std::vector<double> target;              // chi(x) u(x)
  double max_error = 0.0;
  double sup_u = 0.0;
  nlohmann::json to_json() const;
};

InversionResult inversion(const CorpusMember& u, const ChartPtr& chart, const std::vector<double>& xs,
                          const Cutoff& chi, const InversionOptions& opt = {});

// Almost-analytic function on a wedge Z(V) + i Gamma with a slow-growth
// certificate |f(Z(x) + i v)| <= C / |v|^N.
struct WedgeFunction {
  int m = 1;
  Box V;
  std::vector<double> gamma;  // a direction inside the cone Gamma
  double height = 1.0;
  std::function<cplx(const VecC&)> eval;
  double growth_C = 1.0;
  int growth_N = 1;
  double aa_constant = 0.0;
  std::vector<double> singular_points;  // m = 1 edge points where panels are graded
};

struct BoundaryValueOptions {
  std::vector<double> t_ladder = {0.04, 0.02, 0.01, 0.005, 0.0025};
  int points_per_panel = 24;
};

cplx boundary_value(const WedgeFunction& f, const ChartPtr& chart, const std::function<double(std::span<const double>)>& test,
                    const BoundaryValueOptions& opt = {});

}  // namespace dcmicro
