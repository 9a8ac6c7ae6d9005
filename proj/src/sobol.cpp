#include "mobsim/sobol.hpp"

#include <bit>
#include <stdexcept>

namespace mobsim {

namespace {

// Primitive-polynomial degree s, coefficient word a, and initial
// direction numbers m for dimensions 2..16 (dimension 1 needs none).
struct Direction {
  int s;
  std::uint32_t a;
  std::uint32_t m[6];
};

constexpr Direction kDirections[] = {
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
};

constexpr int kBits = 32;

}  // namespace

SobolSequence::SobolSequence(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("Sobol dimension must be in [1, 16], got " +
                                std::to_string(dim));
  state_.assign(static_cast<size_t>(dim), 0);
  v_.resize(static_cast<size_t>(dim));

  for (int j = 0; j < dim; ++j) {
    auto& v = v_[static_cast<size_t>(j)];
    v.resize(kBits);
    if (j == 0) {
      for (int i = 0; i < kBits; ++i) v[static_cast<size_t>(i)] = 1u << (kBits - 1 - i);
      continue;
    }
    const Direction& d = kDirections[j - 1];
    for (int i = 0; i < d.s; ++i)
      v[static_cast<size_t>(i)] = d.m[i] << (kBits - 1 - i);
    for (int i = d.s; i < kBits; ++i) {
      std::uint32_t x = v[static_cast<size_t>(i - d.s)];
      x ^= x >> d.s;
      for (int k = 1; k < d.s; ++k)
        if ((d.a >> (d.s - 1 - k)) & 1u) x ^= v[static_cast<size_t>(i - k)];
      v[static_cast<size_t>(i)] = x;
    }
  }
}

std::vector<double> SobolSequence::next() {
  // Gray-code step: index n -> n+1 flips the bit at the position of the
  // lowest zero bit of n. Index 0 (the all-zero point) is skipped.
  int c = std::countr_one(index_);
  ++index_;
  std::vector<double> out(static_cast<size_t>(dim_));
  for (int j = 0; j < dim_; ++j) {
    state_[static_cast<size_t>(j)] ^= v_[static_cast<size_t>(j)][static_cast<size_t>(c)];
    out[static_cast<size_t>(j)] =
        static_cast<double>(state_[static_cast<size_t>(j)]) / 4294967296.0;
  }
  return out;
}

void SobolSequence::skip(std::uint64_t n) {
  for (std::uint64_t i = 0; i < n; ++i) next();
}

std::vector<std::vector<double>> sobol_init(int dim, int count, bool include_corners) {
  if (count < 0) throw std::invalid_argument("sobol_init: negative count");
  if (include_corners && dim > 16)
    throw std::invalid_argument("sobol_init: corners requested for dimension " +
                                std::to_string(dim) + " (limit 16)");
  std::vector<std::vector<double>> pts;
  pts.reserve(static_cast<size_t>(count) +
              (include_corners ? (1u << dim) : 0u));
  SobolSequence seq(dim);
  for (int i = 0; i < count; ++i) pts.push_back(seq.next());
  if (include_corners)
    for (std::uint32_t mask = 0; mask < (1u << dim); ++mask) {
      std::vector<double> corner(static_cast<size_t>(dim));
      for (int j = 0; j < dim; ++j)
        corner[static_cast<size_t>(j)] = (mask >> j) & 1u ? 1.0 : 0.0;
      pts.push_back(std::move(corner));
    }
  return pts;
}

}  // namespace mobsim
