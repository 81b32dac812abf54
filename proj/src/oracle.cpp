#include "weakbw/oracle.hpp"

#include <algorithm>

namespace weakbw {

const char* to_string(OracleAnswer a) {
  switch (a) {
    case OracleAnswer::Yes:
      return "YES";
    case OracleAnswer::No:
      return "NO";
    case OracleAnswer::Unknown:
      return "UNKNOWN";
  }
  return "?";
}

OracleAnswer exists_certified(const Pred& p, std::uint64_t bound) {
  for (std::uint64_t k = 0; k <= bound; ++k)
    if (p(k)) return OracleAnswer::Yes;
  return OracleAnswer::No;
}

OracleAnswer exists_staged(const Pred& p, const OracleBudget& budget) {
  for (std::uint64_t k = 0; k < budget.horizon; ++k)
    if (p(k)) return OracleAnswer::Yes;
  return OracleAnswer::Unknown;
}

namespace {
constexpr std::uint64_t kWitnessProbes[] = {0, 7, 31};
}

OracleAnswer infinitely_often_certified(const Pred& p, const StabilizationWitness& w) {
  if (std::holds_alternative<RecurrenceWitness>(w)) {
    const auto& rec = std::get<RecurrenceWitness>(w);
    for (std::uint64_t k : kWitnessProbes) {
      std::uint64_t i = rec.hit_at_or_after(k);
      if (i < k || !p(i))
        throw UnsoundOracle("recurrence witness produced a non-hit at index " +
                            std::to_string(i));
    }
    return OracleAnswer::Yes;
  }
  const auto& fin = std::get<FinalHitWitness>(w);
  for (std::uint64_t off : kWitnessProbes) {
    std::uint64_t i = fin.last_possible_hit + 1 + off;
    if (p(i))
      throw UnsoundOracle("final-hit witness contradicted: hit at index " +
                          std::to_string(i));
  }
  return OracleAnswer::No;
}

std::uint64_t staged_hit_threshold(const OracleBudget& budget) {
  return std::max<std::uint64_t>(1, budget.horizon / 16);
}

OracleAnswer infinitely_often_staged(const Pred& p, const OracleBudget& budget) {
  std::uint64_t hits = 0;
  std::uint64_t need = staged_hit_threshold(budget);
  for (std::uint64_t i = 0; i < budget.horizon; ++i) {
    if (p(i) && ++hits >= need) return OracleAnswer::Yes;
  }
  return OracleAnswer::Unknown;
}

namespace {
void spot_check_monotone(const std::function<Rat(std::uint64_t)>& q, const Rat& boundB,
                         std::uint64_t upto) {
  const std::uint64_t samples[] = {0, 1, 2, 3, upto / 2, upto};
  for (std::uint64_t i : samples) {
    Rat a = q(i);
    Rat b = q(i + 1);
    if (a > b)
      throw MonotonicityViolation("q(" + std::to_string(i) + ") = " + a.str() + " > q(" +
                                  std::to_string(i + 1) + ") = " + b.str());
    if (a > boundB)
      throw MonotonicityViolation("q(" + std::to_string(i) + ") = " + a.str() +
                                  " exceeds the stated bound " + boundB.str());
  }
}
}  // namespace

MonotoneLimitResult monotone_limit_certified(const std::function<Rat(std::uint64_t)>& q,
                                             const Rat& boundB, int k,
                                             const StabilizationStageFn& stage) {
  std::uint64_t i = stage(static_cast<std::uint64_t>(k < 0 ? 0 : k));
  spot_check_monotone(q, boundB, i);
  return {q(i), true};
}

MonotoneLimitResult monotone_limit_staged(const std::function<Rat(std::uint64_t)>& q,
                                          const Rat& boundB, int /*k*/,
                                          const OracleBudget& budget) {
  std::uint64_t h = budget.horizon;
  spot_check_monotone(q, boundB, h > 4 ? h - 2 : 2);
  return {q(h), false};
}

LimResult lim_real_certified(const std::function<CReal(std::uint64_t)>& s,
                             const ConvergenceModulusFn& modulus) {
  CReal out(
      [s, modulus](int k) {
        std::uint64_t i = modulus(static_cast<std::uint64_t>(k) + 1);
        return s(i).approx(k + 1);
      },
      "lim");
  return {out, true};
}

LimResult lim_real_staged(const std::function<CReal(std::uint64_t)>& s,
                          const OracleBudget& budget) {
  std::uint64_t h = budget.horizon;
  return {CReal([s, h](int k) { return s(h).approx(k); }, "lim_staged"), false};
}

}  // namespace weakbw
