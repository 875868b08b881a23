#include "dcmicro/sequence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

#include "dcmicro/errors.hpp"
#include "dcmicro/log.hpp"

namespace dcmicro {

namespace {
std::mutex g_log_mu;
std::set<std::string> g_seen;
std::atomic<bool> g_enabled{true};
}  // namespace

void log_warning(const std::string& msg) {
  std::lock_guard<std::mutex> lock(g_log_mu);
  if (!g_seen.insert(msg).second) return;
  if (g_enabled) std::cerr << "warning: " << msg << "\n";
}

void set_warnings_enabled(bool on) { g_enabled = on; }

int warning_count() {
  std::lock_guard<std::mutex> lock(g_log_mu);
  return static_cast<int>(g_seen.size());
}

std::string to_string(Tristate t) {
  switch (t) {
    case Tristate::holds: return "holds";
    case Tristate::fails: return "fails";
    default: return "unchecked";
  }
}

RegularSequence::RegularSequence(SequenceKind kind, double s, std::vector<double> log_m)
    : kind_(kind), s_(s), log_m_(std::move(log_m)) {
  if (k_max() < 8) throw PreconditionError("RegularSequence: K_max must be at least 8");
  log_fact_.resize(log_m_.size());
  for (size_t k = 0; k < log_m_.size(); ++k) log_fact_[k] = std::lgamma(static_cast<double>(k) + 1.0);
  c_ = choose_c(k_max(), false);
  c_moderate_ = choose_c(k_max(), true);
  auto report = validate(*this, k_max());
  moderate_growth_ = Tristate::unchecked;
  for (const auto& item : report.items)
    if (item.condition == "e") moderate_growth_ = item.pass ? Tristate::holds : Tristate::fails;
}

RegularSequence RegularSequence::gevrey(double s, int k_max) {
  if (!(s > 1.0)) throw PreconditionError("gevrey: exponent s must exceed 1");
  std::vector<double> lm(k_max + 1);
  for (int k = 0; k <= k_max; ++k) lm[k] = (s - 1.0) * std::lgamma(k + 1.0);
  return RegularSequence(SequenceKind::gevrey, s, std::move(lm));
}

RegularSequence RegularSequence::table(std::vector<double> log_m) {
  return RegularSequence(SequenceKind::table, 0.0, std::move(log_m));
}

RegularSequence RegularSequence::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gevrey")
    return gevrey(j.at("s").get<double>(), j.value("k_max", default_k_max));
  if (kind == "table") return table(j.at("log_m").get<std::vector<double>>());
  throw ConfigError("sequence: unknown kind '" + kind + "'");
}

double RegularSequence::log_m(int k) const {
  if (k < 0 || k > k_max())
    throw RangeError("sequence index " + std::to_string(k) + " beyond K_max = " + std::to_string(k_max()));
  return log_m_[k];
}

double RegularSequence::log_M(int k) const { return log_m(k) + log_fact_[k]; }
double RegularSequence::m_value(int k) const { return std::exp(log_m(k)); }
double RegularSequence::M_value(int k) const { return std::exp(log_M(k)); }

double RegularSequence::choose_c(int K, bool moderate_growth) const {
  if (K < 2) throw PreconditionError("choose_c: insufficient range, need K >= 2");
  K = std::min(K, k_max());
  double best = 1.0;
  for (int k = 1; k <= K - 1; ++k) best = std::max(best, std::exp((log_m_[k + 1] - log_m_[k]) / k));
  if (moderate_growth) {
    for (int k = 0; k <= K; ++k) {
      double lmin = std::numeric_limits<double>::infinity();
      for (int n = 0; n <= k; ++n) lmin = std::min(lmin, log_M(n) + log_M(k - n));
      best = std::max(best, std::exp((log_M(k) - lmin) / (k + 1)));
    }
  }
  return c_margin * best;
}

std::string RegularSequence::describe() const {
  std::ostringstream os;
  if (kind_ == SequenceKind::gevrey)
    os << "gevrey(s=" << s_ << ", k_max=" << k_max() << ")";
  else
    os << "table(k_max=" << k_max() << ")";
  return os.str();
}

bool ValidationReport::all_pass() const {
  return std::all_of(items.begin(), items.end(), [](const auto& i) { return i.pass; });
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json j;
  j["K"] = K;
  j["c"] = c;
  j["all_pass"] = all_pass();
  for (const auto& i : items) j["conditions"].push_back({{"condition", i.condition}, {"pass", i.pass}, {"detail", i.detail}});
  return j;
}

ValidationReport validate(const RegularSequence& seq, int K) {
  if (K > seq.k_max()) throw RangeError("validate: K beyond K_max = " + std::to_string(seq.k_max()));
  if (K < 4) throw PreconditionError("validate: need K >= 4");
  const auto& lm = seq.log_m();
  ValidationReport rep;
  rep.K = K;
  rep.c = seq.choose_c(K, true);
  constexpr double tol = 1e-12;

  {
    bool ok = lm[0] == 0.0 && lm[1] == 0.0;
    rep.items.push_back({"a", ok, ok ? "m_0 = m_1 = 1" : "m_0 or m_1 differs from 1"});
  }
  {
    int bad = -1;
    for (int k = 1; k <= K - 1 && bad < 0; ++k)
      if (lm[k - 1] + lm[k + 1] - 2.0 * lm[k] < -tol) bad = k;
    rep.items.push_back({"b", bad < 0, bad < 0 ? "log-convex" : "log-convexity fails at k = " + std::to_string(bad)});
  }
  {
    // Finite-range boundedness: the ratio may not keep growing over the tail.
    std::vector<double> rho;
    for (int k = 1; k <= K - 1; ++k) rho.push_back((lm[k + 1] - lm[k]) / k);
    const size_t half = rho.size() / 2;
    const double head = *std::max_element(rho.begin(), rho.begin() + half);
    const double tail = *std::max_element(rho.begin() + half, rho.end());
    bool ok = std::isfinite(tail) && tail - head <= std::log(2.0);
    std::ostringstream d;
    d << "sup (m_{k+1}/m_k)^{1/k}: head " << std::exp(head) << ", tail " << std::exp(tail);
    rep.items.push_back({"c", ok, d.str()});
  }
  {
    // m_k^{1/k} must increase across the range and be nondecreasing on the tail.
    auto g = [&](int k) { return lm[k] / k; };
    bool mono = true;
    for (int k = K / 2; k < K; ++k)
      if (g(k + 1) < g(k) - tol) mono = false;
    const bool grows = g(K) > g(std::max(2, K / 2)) + 1e-9;
    std::ostringstream d;
    d << "m_k^{1/k}: k=" << K / 2 << " -> " << std::exp(g(std::max(2, K / 2))) << ", k=" << K << " -> " << std::exp(g(K));
    rep.items.push_back({"d", mono && grows, d.str()});
  }
  {
    // Moderate growth: the inequality with c = choose_c(K, true), plus the
    // ratio must not keep growing (doubling between K/2 and K flags divergence).
    const double lc = std::log(rep.c);
    bool ineq = true;
    std::vector<double> lr(K + 1);
    for (int k = 0; k <= K; ++k) {
      double lmin = std::numeric_limits<double>::infinity();
      for (int n = 0; n <= k; ++n) lmin = std::min(lmin, seq.log_M(n) + seq.log_M(k - n));
      lr[k] = (seq.log_M(k) - lmin) / (k + 1);
      if (seq.log_M(k) > (k + 1) * lc + lmin + tol) ineq = false;
    }
    const double head = *std::max_element(lr.begin(), lr.begin() + K / 2 + 1);
    const double tail = *std::max_element(lr.begin() + K / 2, lr.end());
    bool ok = ineq && std::isfinite(tail) && tail - head <= std::log(2.0);
    std::ostringstream d;
    d << "c = " << rep.c << ", sup ratio head " << std::exp(head) << ", tail " << std::exp(tail);
    rep.items.push_back({"e", ok, d.str()});
  }
  return rep;
}

AssociatedEvaluator::Entry AssociatedEvaluator::compute(double r) const {
  const auto& lm = seq_->log_m();
  const int K = seq_->k_max();
  const double lr = std::log(r);
  constexpr double tie = 1e-12;
  Entry e{};
  // h: k -> m_k r^k is unimodal by log-convexity; stop at the first k with
  // m_{k+1} r >= m_k.
  int k = 0;
  while (k < K && lm[k + 1] - lm[k] + lr < -tie) ++k;
  if (k == K) log_warning("associated function h truncated at K_max = " + std::to_string(K));
  e.log_h = lm[k] + k * lr;
  // h1 and N: same ratio test from k = 1; near-ties resolve to the smaller index.
  k = 1;
  while (k < K && lm[k + 1] - lm[k] + lr < -tie) ++k;
  if (k == K) log_warning("associated function N truncated at K_max = " + std::to_string(K));
  e.log_h1 = lm[k] + (k - 1) * lr;
  e.N = k;
  return e;
}

AssociatedEvaluator::Entry AssociatedEvaluator::lookup(double r) const {
  if (!(r > 0.0)) throw DomainError("associated functions need r > 0");
  {
    std::shared_lock lock(mu_);
    auto it = cache_.find(r);
    if (it != cache_.end()) return it->second;
  }
  Entry e = compute(r);
  std::unique_lock lock(mu_);
  if (cache_.size() > 100000) cache_.clear();
  cache_.emplace(r, e);
  return e;
}

double AssociatedEvaluator::h(double r) const { return std::exp(lookup(r).log_h); }
double AssociatedEvaluator::h1(double r) const { return std::exp(lookup(r).log_h1); }
double AssociatedEvaluator::log_h(double r) const { return lookup(r).log_h; }
double AssociatedEvaluator::log_h1(double r) const { return lookup(r).log_h1; }
int AssociatedEvaluator::bigN(double r) const { return lookup(r).N; }

}  // namespace dcmicro

namespace dcmicro {

bool LawReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const LawCheck& c) { return !c.gating || c.violations == 0; });
}

nlohmann::json LawReport::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : checks)
    out.push_back({{"law", c.law}, {"gating", c.gating}, {"cases", c.cases}, {"violations", c.violations}, {"worst_log_ratio", c.worst}});
  return {{"all_pass", all_pass()}, {"checks", out}};
}

LawReport check_laws(const RegularSequence& seq, int grid_points, int j_max, int random_cases,
                     unsigned long long seed) {
  if (grid_points < 2) throw PreconditionError("check_laws: grid_points < 2");
  constexpr double tol = 1e-10;  // slack on log inequalities
  AssociatedEvaluator A(seq);
  const double c = seq.c(), lc = std::log(c);
  LawReport rep;
  auto record = [](LawCheck& chk, double log_ratio) {
    ++chk.cases;
    if (chk.cases == 1 || log_ratio > chk.worst) chk.worst = log_ratio;
    if (log_ratio > tol) ++chk.violations;
  };

  std::vector<double> grid;
  for (int i = 0; i < grid_points; ++i) grid.push_back(std::pow(10.0, -4.0 + 4.0 * (i + 0.5) / grid_points));

  LawCheck lo{"h <= h1"}, hi{"h1 <= h(c r)"}, hj{"h1(r)/r^j <= c^{j(j+1)/2} h1(c^j r)"};
  for (double r : grid) {
    record(lo, A.log_h(r) - A.log_h1(r));
    record(hi, A.log_h1(r) - A.log_h(c * r));
    for (int j = 0; j <= j_max; ++j) {
      const double rhs = 0.5 * j * (j + 1) * lc + A.log_h1(std::pow(c, j) * r);
      record(hj, A.log_h1(r) - j * std::log(r) - rhs);
    }
  }

  LawCheck lemma{"m_k r^k <= m_n r^n for n <= k <= N(r)"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> expo(-4.0, 0.0);
  for (int i = 0; i < random_cases; ++i) {
    const double r = std::pow(10.0, expo(rng));
    const int N = A.bigN(r);
    const int n = std::uniform_int_distribution<int>(0, N)(rng);
    const int k = std::uniform_int_distribution<int>(n, N)(rng);
    const double lr = std::log(r);
    record(lemma, (seq.log_m(k) + k * lr) - (seq.log_m(n) + n * lr));
  }

  LawCheck kap{"m_k <= (c^kappa)^k m_n for k - n <= kappa"}, mod{"M_k <= c^{k+1} M_n M_{k-n}"};
  LawCheck kapM{"M_k <= (c^kappa)^k M_n for k - n <= kappa", false};
  const int K = seq.k_max();
  const double lcm = std::log(seq.c_moderate());
  for (int k = 0; k <= K; ++k)
    for (int n = 0; n <= k; ++n) {
      const int kappa = k - n;
      record(kap, seq.log_m(k) - (kappa * k * lc + seq.log_m(n)));
      record(kapM, seq.log_M(k) - (kappa * k * lc + seq.log_M(n)));
      record(mod, seq.log_M(k) - ((k + 1) * lcm + seq.log_M(n) + seq.log_M(k - n)));
    }

  rep.checks = {lo, hi, hj, lemma, kap, mod, kapM};
  return rep;
}

}  // namespace dcmicro
