#pragma once

// Maximally real charts Z(x) = x + i phi(x), their dual frames, real
// structure directions and the sampled well-positioned certificate.

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dcmicro/jets.hpp"

namespace dcmicro {

using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

class MaximallyRealChart : public FrameCoefficients, public std::enable_shared_from_this<MaximallyRealChart> {
 public:
  // phi expanded around x: one Taylor series (order `order`) per component.
  using PhiSeries = std::function<std::vector<Taylor>(std::span<const double> x, int order)>;

  MaximallyRealChart(std::string name, int m, Box U, PhiSeries phi, bool flat);

  const std::string& name() const { return name_; }
  int dim() const override { return m_; }
  const Box& box() const { return U_; }
  bool flat() const { return flat_; }
  // Same chart restricted to another box.
  std::shared_ptr<MaximallyRealChart> with_box(Box U) const;

  std::vector<double> phi(std::span<const double> x) const;
  VecC Z(std::span<const double> x) const;
  // [Zx]_{jl} = delta_jl + i dphi_j/dx_l
  MatC Zx(std::span<const double> x) const;
  // a = transpose-inverse of Zx; X_k = sum_l a_kl d/dx_l.
  MatC a(std::span<const double> x) const;
  std::vector<Taylor> coefficient_series(std::span<const double> x, int order) const override;
  std::vector<Taylor> phi_series(std::span<const double> x, int order) const { return phi_(x, order); }

  double condition_number(std::span<const double> x) const;

 private:
  std::string name_;
  int m_;
  Box U_;
  PhiSeries phi_;
  bool flat_;
};

using ChartPtr = std::shared_ptr<const MaximallyRealChart>;

VectorFrame chart_frame(const ChartPtr& chart);

struct StructureDirection {
  std::vector<double> x;
  std::vector<double> xi;
  VecC zeta;
  double cone_ratio = 0.0;  // |Im zeta| / |Re zeta|
};

StructureDirection structure_direction(const MaximallyRealChart& chart, std::span<const double> x, std::span<const double> xi);

// Principal square root of zeta . zeta; requires |Im zeta| < |Re zeta|.
cplx bracket(const VecC& zeta);
// <z> for z in C^m without the cone requirement (principal branch).
cplx bracket_unchecked(const VecC& z);

struct WellPositionedCertificate {
  double lambda = 1.0;
  double kappa = 0.0;        // max sampled |Im zeta| / |Re zeta|
  double kappa_prime = 0.0;  // min sampled -Re{...} / (|zeta| |z - z'|^2)
  bool pass = false;
  int samples = 0;
  std::string failure;
  std::vector<double> worst_x, worst_xp, worst_xi;
  nlohmann::json to_json() const;
};

// Samples pairs x, x' in the chart box and real xi, mapping xi through the
// structure fibres at both x and x'.  Deterministic given the seed.
WellPositionedCertificate check_well_positioned(const MaximallyRealChart& chart, double lambda, int sample_budget,
                                                unsigned long long seed = 0);

double lipschitz_estimate(const MaximallyRealChart& chart, int samples_per_axis);

// Closest point of the chart graph to z (damped Gauss-Newton, seeded at Re z).
struct Projection {
  std::vector<double> x;
  double dist = 0.0;
  int iterations = 0;
};
Projection project_to_chart(const MaximallyRealChart& chart, const VecC& z, double tol = 1e-10);

}  // namespace dcmicro
