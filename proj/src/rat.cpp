#include "weakbw/rat.hpp"

namespace weakbw {

Rat Rat::parse(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("Rat: empty string");
  mpq_class q;
  if (q.set_str(std::string(s), 10) != 0)
    throw std::invalid_argument("Rat: malformed rational '" + std::string(s) + "'");
  if (q.get_den() == 0) throw std::invalid_argument("Rat: zero denominator");
  q.canonicalize();
  return Rat(q);
}

Rat Rat::pow2(long k) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(k >= 0 ? k : -k));
  return k >= 0 ? Rat(p) : Rat(1, p);
}

long Rat::mag2_bound() const {
  if (is_zero()) return 0;
  // ceil(log2(|num|/den)) <= bits(|num|) - bits(den) + 1, clamped at 0.
  long b = static_cast<long>(mpz_sizeinbase(v_.get_num().get_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(v_.get_den().get_mpz_t(), 2)) + 1;
  return b > 0 ? b : 0;
}

std::string Rat::str() const {
  if (is_integer()) return v_.get_num().get_str();
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

Rat min(const Rat& a, const Rat& b) { return a <= b ? a : b; }
Rat max(const Rat& a, const Rat& b) { return a >= b ? a : b; }

}  // namespace weakbw
