#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "weakbw/rat.hpp"

namespace weakbw {

// Finitely supported rational vector <r_0, ..., r_m>.
// Invariant: either m = 0 or r_m != 0 (the zero vector is <0>).
class FinVec {
 public:
  FinVec() : coords_(1, Rat(0)) {}
  explicit FinVec(std::vector<Rat> coords);

  // Builds from possibly trailing-zero data, truncating to canonical form.
  static FinVec normalized(std::vector<Rat> coords);

  std::size_t length() const { return coords_.size(); }
  // Coordinate j, zero beyond the stored length.
  const Rat& coord(std::size_t j) const;

  const std::vector<Rat>& coords() const { return coords_; }
  bool is_zero() const { return coords_.size() == 1 && coords_[0].is_zero(); }

  bool operator==(const FinVec& o) const { return coords_ == o.coords_; }
  bool operator!=(const FinVec& o) const { return !(*this == o); }

 private:
  std::vector<Rat> coords_;
};

FinVec vec_add(const FinVec& u, const FinVec& v);
FinVec vec_sub(const FinVec& u, const FinVec& v);
FinVec vec_scale(const Rat& q, const FinVec& v);

// The defining finite sum  sum_{i<=max(n,m)} r_i s_i, exact in Rat.
Rat inner_fin(const FinVec& u, const FinVec& v);
Rat norm_sq(const FinVec& u);

// e_n: n zeros followed by 1.
FinVec basis(std::size_t n);

// Zeroes every coordinate whose index fails the predicate; exact and
// 1-Lipschitz. The span-of-basis-subset projection in coordinate form.
FinVec project_indices(const FinVec& v, const std::function<bool(std::size_t)>& keep);

// Serialization: array of canonical rational strings.
std::vector<std::string> vec_to_strings(const FinVec& v);
FinVec vec_from_strings(const std::vector<std::string>& ss);

}  // namespace weakbw
