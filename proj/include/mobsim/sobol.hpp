#pragma once

#include <cstdint>
#include <vector>

namespace mobsim {

// Sobol low-discrepancy sequence in [0,1]^D, Gray-code order, with the
// all-zero leading point skipped (the first returned point is the
// midpoint 0.5^D). Direction numbers cover up to 16 dimensions.
class SobolSequence {
 public:
  static constexpr int kMaxDim = 16;

  explicit SobolSequence(int dim);

  std::vector<double> next();
  void skip(std::uint64_t n);

 private:
  int dim_;
  std::uint64_t index_ = 0;                 // points generated so far
  std::vector<std::uint32_t> state_;        // current integer coordinates
  std::vector<std::vector<std::uint32_t>> v_;  // direction numbers per dim
};

// First `count` Sobol points plus, when requested, all 2^D corners of
// the unit box (appended after the sequence points, lexicographic,
// low-coordinate first). Deterministic.
std::vector<std::vector<double>> sobol_init(int dim, int count, bool include_corners);

}  // namespace mobsim
