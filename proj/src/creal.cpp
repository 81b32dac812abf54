#include "weakbw/creal.hpp"

#include <stdexcept>
#include <utility>

namespace weakbw {

CReal::CReal(Rat constant) {
  auto impl = std::make_shared<Impl>();
  Rat c = std::move(constant);
  impl->fn = [c](int) { return c; };
  impl->label = "const";
  impl_ = std::move(impl);
}

CReal::CReal(Fn fn, std::string label) {
  auto impl = std::make_shared<Impl>();
  impl->fn = std::move(fn);
  impl->label = std::move(label);
  impl_ = std::move(impl);
}

Rat CReal::approx(int k) const {
  if (k < 0) k = 0;
  {
    std::lock_guard<std::mutex> lock(impl_->mu);
    auto it = impl_->memo.find(k);
    if (it != impl_->memo.end()) return it->second;
  }
  Rat r = impl_->fn(k);
  std::lock_guard<std::mutex> lock(impl_->mu);
  return impl_->memo.emplace(k, std::move(r)).first->second;
}

CReal creal_add(const CReal& a, const CReal& b) {
  // Both operands at k+1: 2^-(k+1) + 2^-(k+1) = 2^-k.
  return CReal([a, b](int k) { return a.approx(k + 1) + b.approx(k + 1); }, "add");
}

CReal creal_sub(const CReal& a, const CReal& b) {
  return CReal([a, b](int k) { return a.approx(k + 1) - b.approx(k + 1); }, "sub");
}

CReal creal_mul_rat(const Rat& q, const CReal& a) {
  if (q.is_zero()) return CReal(Rat(0));
  long shift = q.mag2_bound();
  return CReal([q, a, shift](int k) { return q * a.approx(k + static_cast<int>(shift)); },
               "mul_rat");
}

Rat rat_sqrt_approx(const Rat& r, int k) {
  if (r.sign() < 0) throw std::domain_error("rat_sqrt_approx: negative input");
  if (r.is_zero()) return Rat(0);
  Rat lo(0);
  Rat hi = max(Rat(1), r);  // sqrt(r) <= max(1, r)
  Rat tol = Rat::pow2(-k);
  while (hi - lo > tol) {
    Rat mid = (lo + hi) * Rat(1, 2);
    if (mid.square() <= r)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

Rat rat_sqrt_upper(const Rat& r, int k) {
  if (r.sign() <= 0) return Rat(0);
  if (mpz_perfect_square_p(r.num().get_mpz_t()) &&
      mpz_perfect_square_p(r.den().get_mpz_t())) {
    mpz_class n, d;
    mpz_sqrt(n.get_mpz_t(), r.num().get_mpz_t());
    mpz_sqrt(d.get_mpz_t(), r.den().get_mpz_t());
    return Rat(n, d);
  }
  return rat_sqrt_approx(r, k + 1) + Rat::pow2(-k);
}

CReal creal_sqrt_nonneg(const CReal& a) {
  return CReal(
      [a](int k) {
        // |x - r| <= 2^-(2k+2) gives |sqrt(x) - sqrt(max(r,0))| <= 2^-(k+1),
        // by the 1/2-Hoelder bound |sqrt(s)-sqrt(t)| <= sqrt(|s-t|).
        Rat r = max(Rat(0), a.approx(2 * k + 2));
        return rat_sqrt_approx(r, k + 1);
      },
      "sqrt");
}

Gap cmp_gap(const CReal& a, const CReal& b, int k) {
  Rat x = a.approx(k + 1);
  Rat y = b.approx(k + 1);
  Rat gap = Rat::pow2(-k);
  if (x - y > gap) return Gap::GT;
  if (y - x > gap) return Gap::LT;
  return Gap::NEAR;
}

}  // namespace weakbw
