#pragma once

// Named inputs: functions with exact jets, distributions, charts, systems.

#include <functional>
#include <string>
#include <vector>

#include "dcmicro/jets.hpp"
#include "dcmicro/manifold.hpp"

namespace dcmicro {

inline int series_order(cplx) { return 0; }
inline int series_order(const Taylor& t) { return t.order(); }
inline cplx one_like(cplx) { return 1.0; }
inline Taylor one_like(const Taylor& t) { return Taylor(t.nvars(), t.order(), 1.0); }

// Builds an exact-jet member from a formula written once for cplx and Taylor.
// The formula receives the coordinate variables as a vector.
template <class F>
JetPtr make_exact_jet(std::string name, int m, Box domain, int max_order, F formula, bool holomorphic,
                      std::string description) {
  auto expand = [formula, m](std::span<const double> x, int order) {
    std::vector<Taylor> v;
    for (int i = 0; i < m; ++i) v.push_back(Taylor::variable(m, order, i, x[i]));
    return formula(v);
  };
  auto f = std::make_shared<JetFunction>(std::move(name), m, std::move(domain), max_order, JetKind::exact, expand);
  f->description = std::move(description);
  f->set_value([formula, m](std::span<const double> x) {
    std::vector<cplx> v(x.begin(), x.begin() + m);
    return formula(v);
  });
  if (holomorphic)
    f->set_holomorphic([formula](std::span<const cplx> z) {
      std::vector<cplx> v(z.begin(), z.end());
      return formula(v);
    });
  return f;
}

enum class MemberKind { function, dirac, boundary_value };

// Anything the FBI module can pair against its kernel.
struct CorpusMember {
  std::string name;
  int m = 1;
  MemberKind kind = MemberKind::function;
  JetPtr f;                          // function members (also Heaviside)
  std::vector<double> point;         // Dirac location
  // Boundary value lim_{eps -> 0+} g(x, eps), e.g. 1/(x + i eps).
  std::function<cplx(double, double)> regularized;
  std::vector<double> eps_ladder;
  std::vector<double> singular_points;  // m = 1 points needing graded panels
  std::string description;
};

JetPtr corpus_function(const std::string& name);
CorpusMember corpus_member(const std::string& name);
ChartPtr corpus_chart(const std::string& name);
ChartPtr corpus_chart(const std::string& name, const Box& U);

struct CorpusRow {
  std::string category;
  std::string name;
  int m;
  std::string jet_order;
  std::string description;
};
// Sorted by (category, name).  The filter matches a substring of either.
std::vector<CorpusRow> list_corpus(const std::string& filter = "");
std::string format_corpus_table(const std::vector<CorpusRow>& rows);

}  // namespace dcmicro
