#pragma once

// Regular Denjoy-Carleman weight sequences M_k = k! m_k and their associated
// functions h, h1 and N.
//
// Weights are kept in the log domain: M_k overflows a double near k = 170 and
// products such as M_n M_{k-n} overflow much earlier.

#include <map>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dcmicro {

enum class SequenceKind { gevrey, table };
enum class Tristate { holds, fails, unchecked };

std::string to_string(Tristate t);

class RegularSequence {
 public:
  static constexpr int default_k_max = 60;
  static constexpr double c_margin = 1.05;

  // M_k = (k!)^s, s > 1.
  static RegularSequence gevrey(double s, int k_max = default_k_max);
  // Explicit ln(m_k) table, k = 0 .. log_m.size() - 1.
  static RegularSequence table(std::vector<double> log_m);
  // {"kind": "gevrey", "s": 2.0, "k_max": 60} or {"kind": "table", "log_m": [...]}
  static RegularSequence from_json(const nlohmann::json& j);

  SequenceKind kind() const { return kind_; }
  double gevrey_s() const { return s_; }
  int k_max() const { return static_cast<int>(log_m_.size()) - 1; }
  const std::vector<double>& log_m() const { return log_m_; }

  double log_m(int k) const;
  double log_M(int k) const;  // ln M_k = ln m_k + ln k!
  double m_value(int k) const;
  double M_value(int k) const;

  // Structural constant: margin times the
  // finite-range supremum of (m_{k+1}/m_k)^{1/k} (and, when requested, of the
  // moderate-growth ratio (M_k / min_n M_n M_{k-n})^{1/(k+1)}).
  double choose_c(int K, bool moderate_growth) const;

  // c without / with the moderate-growth term, fixed at construction over K_max.
  double c() const { return c_; }
  double c_moderate() const { return c_moderate_; }
  Tristate moderate_growth() const { return moderate_growth_; }

  std::string describe() const;

 private:
  RegularSequence(SequenceKind kind, double s, std::vector<double> log_m);

  SequenceKind kind_;
  double s_ = 0.0;
  std::vector<double> log_m_;
  std::vector<double> log_fact_;
  double c_ = 0.0;
  double c_moderate_ = 0.0;
  Tristate moderate_growth_ = Tristate::unchecked;
};

struct ValidationItem {
  std::string condition;  // "a" .. "e"
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  int K = 0;
  double c = 0.0;
  std::vector<ValidationItem> items;
  bool all_pass() const;
  nlohmann::json to_json() const;
};

// Checks conditions (a)-(d) of a regular sequence and (e) moderate growth
// over 0 <= k <= K.  Failures are data, never exceptions.
ValidationReport validate(const RegularSequence& seq, int K);

// h, h1 and N for one sequence.  Memoized; safe to share between threads.
class AssociatedEvaluator {
 public:
  explicit AssociatedEvaluator(const RegularSequence& seq) : seq_(&seq) {}
  AssociatedEvaluator(const AssociatedEvaluator& o) : seq_(o.seq_) {}

  const RegularSequence& sequence() const { return *seq_; }

  double h(double r) const;
  double h1(double r) const;
  int bigN(double r) const;
  // ln h and ln h1, usable where h underflows.
  double log_h(double r) const;
  double log_h1(double r) const;

 private:
  struct Entry {
    double log_h;
    double log_h1;
    int N;
  };
  Entry compute(double r) const;
  Entry lookup(double r) const;

  const RegularSequence* seq_;
  mutable std::shared_mutex mu_;
  mutable std::map<double, Entry> cache_;
};

// Numerical checks of the inequalities a regular sequence must satisfy:
//   h(r) <= h1(r) <= h(c r) on a log grid of (0, 1),
//   h1(r) / r^j <= c^{j(j+1)/2} h1(c^j r) for j <= j_max,
//   m_k r^k <= m_n r^n for random n <= k <= N(r),
//   m_k <= (c^kappa)^k m_n for k - n <= kappa, and M_k <= c^{k+1} M_n M_{k-n}.
// The same kappa estimate written with M_k is reported but does not gate:
// it drops the factor k!/n! and fails e.g. for Gevrey 1.5.
struct LawCheck {
  std::string law;
  bool gating = true;
  long long cases = 0;
  long long violations = 0;
  double worst = 0.0;  // largest ln(lhs / rhs) seen
};

struct LawReport {
  std::vector<LawCheck> checks;
  bool all_pass() const;
  nlohmann::json to_json() const;
};

LawReport check_laws(const RegularSequence& seq, int grid_points = 100, int j_max = 12, int random_cases = 10000,
                     unsigned long long seed = 0);

}  // namespace dcmicro
