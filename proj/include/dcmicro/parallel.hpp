#pragma once

// Runtime switch between the OpenMP kernels and their serial reference.
// Kernels write per-index results and reduce them in index order, so both
// paths produce identical numbers.

namespace dcmicro {

bool parallel_enabled();
void set_parallel(bool on);
void set_threads(int n);

class SerialScope {
 public:
  SerialScope();
  ~SerialScope();
  SerialScope(const SerialScope&) = delete;
  SerialScope& operator=(const SerialScope&) = delete;

 private:
  bool saved_;
};

}  // namespace dcmicro
