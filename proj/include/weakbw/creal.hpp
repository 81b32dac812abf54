#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "weakbw/rat.hpp"

namespace weakbw {

// A real number given as a precision-indexed family of rational
// approximations: |x - approx(k)| <= 2^-k for every k >= 0.
//
// Approximation functions must be pure (same k, same Rat); results are
// memoized, so repeated queries are cheap and evaluation is deterministic.
class CReal {
 public:
  using Fn = std::function<Rat(int)>;

  CReal() : CReal(Rat(0)) {}
  explicit CReal(Rat constant);
  explicit CReal(Fn fn, std::string label = {});

  Rat approx(int k) const;

  const std::string& label() const { return impl_->label; }

 private:
  struct Impl {
    Fn fn;
    std::string label;
    mutable std::map<int, Rat> memo;
    mutable std::mutex mu;
  };
  std::shared_ptr<const Impl> impl_;
};

CReal creal_add(const CReal& a, const CReal& b);
CReal creal_sub(const CReal& a, const CReal& b);
CReal creal_mul_rat(const Rat& q, const CReal& a);

// Square root of a nonnegative real. Approximants of the input may dip
// below zero within their error; they are clamped. Computed by rational
// interval bisection on the square, no floating point involved.
CReal creal_sqrt_nonneg(const CReal& a);

enum class Gap { LT, GT, NEAR };

// Gapped comparison: LT implies a < b, GT implies a > b,
// NEAR implies |a - b| <= 2^-(k-1) (stronger than the required 2^-k+2).
Gap cmp_gap(const CReal& a, const CReal& b, int k);

// sqrt of an exact rational, to 2^-k, by bisection on the square.
Rat rat_sqrt_approx(const Rat& r, int k);

// Dyadic upper bound on sqrt(r) with error at most 2^-k (r >= 0).
Rat rat_sqrt_upper(const Rat& r, int k);

}  // namespace weakbw
