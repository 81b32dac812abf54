#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "weakbw/forward.hpp"
#include "weakbw/oracle.hpp"
#include "weakbw/reverse.hpp"

namespace weakbw {

struct KindMismatch : std::logic_error {
  explicit KindMismatch(const std::string& what) : std::logic_error(what) {}
};

enum class Kind { Real, RealSeq, BitSeq, L2Seq, L2PointK, PairK };

const char* to_string(Kind k);

// Sequence-of-reals payload. Double-indexed instances (coordinate streams,
// iterated limits, parallelized problems) are pair-coded into the single
// index. Certificates are optional and only certified runs require them.
struct RealSeqPayload {
  std::function<CReal(std::uint64_t)> at;
  // lim: index beyond which the sequence stays within 2^-k of its limit.
  std::function<std::uint64_t(std::uint64_t)> modulus;
  // pair-coded rows (inner limits, parallel components): modulus per row.
  std::function<std::uint64_t(std::uint64_t, std::uint64_t)> row_modulus;
  // cluster problems: oracle data for the (1-bounded) coordinate stream.
  std::shared_ptr<const ClusterProvider> provider;
};

struct BitSeqPayload {
  std::function<bool(std::uint64_t)> at;
  // exhaustive search bound: no hits beyond it (per component when
  // pair-coded).
  std::optional<std::uint64_t> all_zero_beyond;
};

struct Payload;
struct PairPayload {
  std::shared_ptr<Payload> first;
  std::shared_ptr<Payload> second;
};

struct Payload {
  std::variant<CReal, RealSeqPayload, BitSeqPayload, BoundedSeq, L2Point, PairPayload> v;
  Kind kind() const;
};

Payload make_payload(CReal x);
Payload make_payload(RealSeqPayload x);
Payload make_payload(BitSeqPayload x);
Payload make_payload(BoundedSeq x);
Payload make_payload(L2Point x);
Payload make_pair_payload(Payload a, Payload b);

struct RunCtx {
  OracleConfig oracle;
  int precision = 8;
  bool best_effort = false;  // set when any step was staged / flagged
  std::vector<std::string> notes;
};

// A named multifunction made executable: deterministic given oracle mode
// and budget.
struct Problem {
  std::string name;
  Kind in_kind = Kind::Real;
  Kind out_kind = Kind::Real;
  std::function<Payload(const Payload&, RunCtx&)> solve;
};

// --- combinators ------------------------------------------------------------

struct GlueMap {
  Kind from, to;
  std::function<Payload(const Payload& instance, const Payload& inner, RunCtx&)> map;
};

// Sequential composition: solve g, glue, solve f. The solution is the pair
// (f-solution, g-solution), as compositional products keep both halves.
// Kind compatibility is checked at construction.
Problem star(const Problem& f, const Problem& g, const GlueMap& glue);

// Finite-width componentwise application, pair-coded; a desk-scale
// truncation of the countable parallelization.
Problem parallelize(const Problem& f, std::uint64_t width);

// --- named problems ---------------------------------------------------------

Problem identity_problem(Kind k);
Problem lpo_problem();       // BitSeq -> BitSeq (one meaningful bit: all zero?)
Problem lim_problem();       // RealSeq -> Real
Problem lim2_problem();      // pair-coded double RealSeq -> Real
Problem mct_problem();       // nondecreasing bounded RealSeq -> Real
Problem bwt_r_problem();     // RealSeq in [-1,1] -> Real (cluster point)
Problem bwt_rn_problem();    // pair-coded RealSeq in [-1,1]^N -> RealSeq
Problem bwt_weak_l2_problem();  // L2Seq -> L2Point

// --- reductions -------------------------------------------------------------

struct Reduction {
  std::string name;
  Problem from;
  Problem to;
  std::function<Payload(const Payload&, RunCtx&)> pre;
  std::function<Payload(const Payload& instance, const Payload& inner, RunCtx&)> post;
  // Validity checker of the from-problem at the given precision.
  std::function<bool(const Payload& instance, const Payload& solution, RunCtx&)> checker;
};

struct ReductionReport {
  std::optional<Payload> solution;
  bool checked = false;
  bool valid = false;
  bool best_effort = false;
  std::vector<std::string> notes;
};

ReductionReport run_reduction(const Reduction& r, const Payload& instance,
                              const OracleConfig& oracle, int precision);

// The three shipped chains.
Reduction make_rev_chain();                 // BWT_weak-l2 <= MCT * BWT_R^N
Reduction make_fwd_chain(std::shared_ptr<const PredicateSpec> spec, std::uint64_t n);
                                            // lim^(2) <= BWT_weak-l2
Reduction make_prod_collapse();             // BWT_R^N <= BWT_R

// Instance helpers.
Payload coordseq_payload(const BoundedSeq& xs);  // pair-coded coordinate stream
Payload lim2_instance_for(std::shared_ptr<const PredicateSpec> spec, std::uint64_t n);

// --- signed-digit coding (used by prod-collapse) -----------------------------

// Signed binary digits: u = sum_t d_t 2^-(t+1), d_t in {-1,0,1}, |u| <= 1.
class SignedDigits {
 public:
  explicit SignedDigits(CReal u);
  int digit(std::uint64_t t) const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

// Packs a digit stream into a real in [-1/3, 1/3]: sum_t d_t 4^-(t+1).
// Distinct streams stay 4^-(t0+1)/3 apart at the first difference, so the
// digits are recoverable from the value.
CReal pack_digits(std::function<int(std::uint64_t)> digit);
std::function<int(std::uint64_t)> unpack_digits(const CReal& packed);

}  // namespace weakbw
