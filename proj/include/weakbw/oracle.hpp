#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "weakbw/creal.hpp"
#include "weakbw/rat.hpp"

namespace weakbw {

// The oracle layer stands in for the non-effective principles: certified
// implementations replay jump queries exactly on annotated instances,
// stage-limited ones explore a finite horizon and say UNKNOWN otherwise.
enum class OracleAnswer { Yes, No, Unknown };

const char* to_string(OracleAnswer a);

struct OracleBudget {
  std::uint64_t horizon = 10000;  // >= 1
};

enum class OracleModeKind { Certified, Staged };

struct OracleConfig {
  OracleModeKind mode = OracleModeKind::Certified;
  OracleBudget budget;
};

struct MonotonicityViolation : std::runtime_error {
  explicit MonotonicityViolation(const std::string& what) : std::runtime_error(what) {}
};

struct OracleUnknown : std::runtime_error {
  OracleUnknown(const std::string& what, std::string trace)
      : std::runtime_error(what), stage_trace(std::move(trace)) {}
  std::string stage_trace;
};

struct UnsoundOracle : std::logic_error {
  explicit UnsoundOracle(const std::string& what) : std::logic_error(what) {}
};

using Pred = std::function<bool(std::uint64_t)>;

// --- exists ---------------------------------------------------------------

// Certified: the bound is exhaustive, so both YES and NO are exact.
OracleAnswer exists_certified(const Pred& p, std::uint64_t bound);

// Staged: YES when a witness is found within the horizon, otherwise UNKNOWN.
// Never answers NO.
OracleAnswer exists_staged(const Pred& p, const OracleBudget& budget);

// --- infinitely often -----------------------------------------------------

// YES-case witness: for every k, an index >= k where the predicate holds.
struct RecurrenceWitness {
  std::function<std::uint64_t(std::uint64_t)> hit_at_or_after;
};

// NO-case witness: no hits strictly beyond this index.
struct FinalHitWitness {
  std::uint64_t last_possible_hit = 0;
};

using StabilizationWitness = std::variant<RecurrenceWitness, FinalHitWitness>;

// Certified answers are exact given a sound witness; witnesses are
// spot-checked against the predicate and UnsoundOracle is thrown on
// contradiction.
OracleAnswer infinitely_often_certified(const Pred& p, const StabilizationWitness& w);

// Counts hits up to the horizon; YES when the count reaches
// staged_hit_threshold(budget), otherwise UNKNOWN.
OracleAnswer infinitely_often_staged(const Pred& p, const OracleBudget& budget);
std::uint64_t staged_hit_threshold(const OracleBudget& budget);

// --- monotone limits ------------------------------------------------------

struct MonotoneLimitResult {
  Rat value;
  bool certified = false;  // staged results are best-effort
};

// stage(k) = index i with sup_j q(j) - q(i) <= 2^-k.
using StabilizationStageFn = std::function<std::uint64_t(std::uint64_t)>;

// q must be nondecreasing and bounded by boundB; sampled violations raise
// MonotonicityViolation (exact rational comparison, no slack).
MonotoneLimitResult monotone_limit_certified(const std::function<Rat(std::uint64_t)>& q,
                                             const Rat& boundB, int k,
                                             const StabilizationStageFn& stage);
MonotoneLimitResult monotone_limit_staged(const std::function<Rat(std::uint64_t)>& q,
                                          const Rat& boundB, int k,
                                          const OracleBudget& budget);

// --- limits of reals ------------------------------------------------------

struct LimResult {
  CReal value;
  bool certified = false;
};

// modulus(k) = index beyond which the sequence stays within 2^-k of its limit.
using ConvergenceModulusFn = std::function<std::uint64_t(std::uint64_t)>;

LimResult lim_real_certified(const std::function<CReal(std::uint64_t)>& s,
                             const ConvergenceModulusFn& modulus);
LimResult lim_real_staged(const std::function<CReal(std::uint64_t)>& s,
                          const OracleBudget& budget);

}  // namespace weakbw
