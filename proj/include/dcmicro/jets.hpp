#pragma once

// Functions with derivative oracles, commuting vector-field frames, and
// Denjoy-Carleman class-constant fits.

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dcmicro/sequence.hpp"
#include "dcmicro/taylor.hpp"

namespace dcmicro {

enum class JetKind { exact, finite_difference, tabulated, pairing_only };
std::string to_string(JetKind k);

struct Box {
  std::vector<double> lo, hi;
  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(std::span<const double> x, double slack = 0.0) const;
  static Box cube(int m, double half_width);
};

class JetFunction {
 public:
  // Taylor expansion of f around a real point, truncated at `order`.
  using Expander = std::function<Taylor(std::span<const double> x, int order)>;
  using HoloEval = std::function<cplx(std::span<const cplx> z)>;

  JetFunction(std::string name, int m, Box domain, int max_order, JetKind kind, Expander expand);

  const std::string& name() const { return name_; }
  int dim() const { return m_; }
  const Box& domain() const { return domain_; }
  int max_order() const { return max_order_; }
  JetKind kind() const { return kind_; }

  cplx eval(std::span<const double> x) const;
  // d^alpha f(x).
  cplx jet(std::span<const int> alpha, std::span<const double> x) const;
  Taylor expand(std::span<const double> x, int order) const;

  // Optional continuation to complex arguments (entire / holomorphic members).
  bool has_holomorphic() const { return static_cast<bool>(holo_); }
  cplx eval_complex(std::span<const cplx> z) const;
  void set_holomorphic(HoloEval h) { holo_ = std::move(h); }
  // Optional fast value path (no series allocation).
  void set_value(std::function<cplx(std::span<const double>)> v) { value_ = std::move(v); }

  // Points (m = 1) or hyperplanes a.x = b (m = 2, stored as {a1, a2, b}) where
  // f is not smooth; quadrature panels are split there.
  std::vector<std::vector<double>> kinks;
  // Support, when compact.  Empty means "not compactly supported".
  std::vector<Box> support;
  std::string description;

 private:
  void check_point(std::span<const double> x) const;

  std::string name_;
  int m_;
  Box domain_;
  int max_order_;
  JetKind kind_;
  Expander expand_;
  HoloEval holo_;
  std::function<cplx(std::span<const double>)> value_;
};

using JetPtr = std::shared_ptr<const JetFunction>;

// Wraps the values of `base` in a finite-difference jet oracle (orders <= 3):
// nested central differences with step eps^{1/3} * scale, Richardson-extrapolated.
JetPtr finite_difference_jets(JetPtr base, double scale = 1.0);

// m = 1 table read from CSV: columns x, f, f', f'', ...  (header row required).
// Jets at table points are returned exactly; elsewhere the nearest row's Taylor
// polynomial is used.
JetPtr load_tabulated_csv(const std::string& path, const std::string& name);

// Frame coefficients: a(x) is the m x m matrix with X_k = sum_l a_kl d/dx_l.
// The series variant returns each a_kl expanded around x to the given order.
class FrameCoefficients {
 public:
  virtual ~FrameCoefficients() = default;
  virtual int dim() const = 0;
  virtual std::vector<Taylor> coefficient_series(std::span<const double> x, int order) const = 0;  // row-major k*m+l
};

enum class FrameKind { coordinate, chart };

class VectorFrame {
 public:
  static VectorFrame coordinate(int m);
  static VectorFrame chart(std::shared_ptr<const FrameCoefficients> coeffs);

  int dim() const { return m_; }
  FrameKind kind() const { return kind_; }
  cplx coeff(int k, int l, std::span<const double> x) const;
  std::vector<Taylor> coefficient_series(std::span<const double> x, int order) const;

 private:
  int m_ = 1;
  FrameKind kind_ = FrameKind::coordinate;
  std::shared_ptr<const FrameCoefficients> coeffs_;
};

// All frame derivatives X^alpha g(x) for |alpha| <= K, computed from a Taylor
// expansion of g around x.  The result stores X^alpha g(x) as coeff(alpha).
Taylor frame_jets_from_series(const VectorFrame& frame, const Taylor& g, std::span<const double> x);
Taylor frame_jets(const VectorFrame& frame, const JetFunction& f, std::span<const double> x, int K);

// X^alpha f(x), with X_1 applied last (X^alpha = X_1^{a_1} o ... o X_m^{a_m}).
cplx frame_apply(const VectorFrame& frame, const JetFunction& f, std::span<const int> alpha, std::span<const double> x);
// f_alpha(u) = X^alpha f(u) / alpha!
cplx taylor_coefficient(const JetFunction& f, const VectorFrame& frame, std::span<const int> alpha, std::span<const double> u);

// Numeric commutator [X_j, X_k] g at x for a probe g, via series arithmetic.
cplx frame_commutator(const VectorFrame& frame, const JetFunction& g, int j, int k, std::span<const double> x);

struct ClassFit {
  double C = 0.0;
  bool finite = true;
  int K = 0;
  std::vector<double> sup_per_order;  // sup over grid and |alpha| = k of |X^alpha f|
  std::vector<double> C_up_to;        // fit using orders <= k
  bool stable = true;                 // C(K) <= 1.1 * C(K - 2)
  std::string failure;                // why the fit is infinite, if it is
  nlohmann::json to_json() const;
};

ClassFit class_constant_fit(const JetFunction& f, const VectorFrame& frame, const RegularSequence& seq, int K,
                            const std::vector<std::vector<double>>& grid);

// Tensor grid of n points per axis over a box (n = 1 gives the centre).
std::vector<std::vector<double>> box_grid(const Box& box, int n);

int factorial_int(int n);
double multi_factorial(std::span<const int> alpha);
// Multi-indices of length m with total degree exactly d (lexicographic).
std::vector<std::vector<int>> multi_indices(int m, int d);

}  // namespace dcmicro
