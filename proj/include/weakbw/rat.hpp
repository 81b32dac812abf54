#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace weakbw {

// Exact rational scalar. Canonical form is maintained by GMP:
// denominator > 0 and gcd(|num|, den) = 1.
class Rat {
 public:
  Rat() : v_(0) {}
  Rat(long n) : v_(n) {}                      // NOLINT(google-explicit-constructor)
  Rat(long n, long d) : v_(n, d) { canonicalize(); }
  explicit Rat(const mpz_class& n) : v_(n) {}
  Rat(const mpz_class& n, const mpz_class& d) : v_(n, d) { canonicalize(); }
  explicit Rat(const mpq_class& q) : v_(q) { canonicalize(); }

  // Parses "p", "p/q" or "-p/q"; "/1" is permitted on input.
  static Rat parse(std::string_view s);

  const mpz_class& num() const { return v_.get_num(); }
  const mpz_class& den() const { return v_.get_den(); }

  bool is_zero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }
  bool is_integer() const { return v_.get_den() == 1; }

  Rat operator+(const Rat& o) const { return Rat(mpq_class(v_ + o.v_)); }
  Rat operator-(const Rat& o) const { return Rat(mpq_class(v_ - o.v_)); }
  Rat operator*(const Rat& o) const { return Rat(mpq_class(v_ * o.v_)); }
  Rat operator/(const Rat& o) const {
    if (o.is_zero()) throw std::domain_error("Rat: division by zero");
    return Rat(mpq_class(v_ / o.v_));
  }
  Rat operator-() const { return Rat(mpq_class(-v_)); }
  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }

  bool operator==(const Rat& o) const { return v_ == o.v_; }
  bool operator!=(const Rat& o) const { return v_ != o.v_; }
  bool operator<(const Rat& o) const { return v_ < o.v_; }
  bool operator<=(const Rat& o) const { return v_ <= o.v_; }
  bool operator>(const Rat& o) const { return v_ > o.v_; }
  bool operator>=(const Rat& o) const { return v_ >= o.v_; }

  Rat abs() const { return Rat(mpq_class(::abs(v_))); }
  Rat square() const { return *this * *this; }

  // 2^k for k of either sign.
  static Rat pow2(long k);

  // Smallest s >= 0 with |*this| <= 2^s; used for error-budget shifts.
  long mag2_bound() const;

  // Canonical output: integers as "p", otherwise "p/q" in lowest terms.
  std::string str() const;

  const mpq_class& raw() const { return v_; }

 private:
  void canonicalize() { v_.canonicalize(); }
  mpq_class v_;
};

inline Rat abs(const Rat& r) { return r.abs(); }
Rat min(const Rat& a, const Rat& b);
Rat max(const Rat& a, const Rat& b);

}  // namespace weakbw
