#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "weakbw/term.hpp"

namespace weakbw {

struct UncertifiedSpec : std::runtime_error {
  explicit UncertifiedSpec(const std::string& what) : std::runtime_error(what) {}
};

struct AnnotationUnsound : std::runtime_error {
  explicit AnnotationUnsound(const std::string& what) : std::runtime_error(what) {}
};

// A parsed term t(x,y,n) defining A(n) := forall x exists y. t(x,y,n) = 0,
// with optional certification annotations that make oracle answers exact on
// desk-scale instances:
//   witness_bound(n,x): exists y. t=0  iff  exists y <= witness_bound(n,x),
//   failure_point(n):   least x with no witness, or nullopt when A(n) holds,
//   truth(n):           claimed ground truth.
// Annotations are claims validated by sampling, not proved.
class PredicateSpec {
 public:
  using WitnessBoundFn = std::function<std::uint64_t(std::uint64_t, std::uint64_t)>;
  using FailurePointFn = std::function<std::optional<std::uint64_t>(std::uint64_t)>;
  using TruthFn = std::function<bool(std::uint64_t)>;

  explicit PredicateSpec(Term term, std::string name = "anonymous");

  const Term& term() const { return term_; }
  const std::string& name() const { return name_; }

  bool has_witness_bound() const { return static_cast<bool>(witness_bound_); }
  bool has_failure_point() const { return static_cast<bool>(failure_point_); }
  bool has_truth() const { return static_cast<bool>(truth_); }
  // Largest n (exclusive) the annotations certify; nullopt = unbounded.
  std::optional<std::uint64_t> certified_below() const { return certified_below_; }

  std::uint64_t witness_bound(std::uint64_t n, std::uint64_t x) const;
  std::optional<std::uint64_t> failure_point(std::uint64_t n) const;
  bool truth(std::uint64_t n) const;

  PredicateSpec& set_witness_bound(WitnessBoundFn fn);
  PredicateSpec& set_failure_point(FailurePointFn fn);
  PredicateSpec& set_truth(TruthFn fn);
  PredicateSpec& set_certified_below(std::optional<std::uint64_t> bound);

  // Least y < limit with t(x,y,n) = 0, extending a memoized search frontier.
  std::optional<std::uint64_t> least_witness_below(std::uint64_t n, std::uint64_t x,
                                                   std::uint64_t limit) const;

  // Least witness using witness_bound as an exhaustive search bound;
  // nullopt means no witness exists at all (per the annotation's claim).
  std::optional<std::uint64_t> least_witness_certified(std::uint64_t n,
                                                       std::uint64_t x) const;

  void require_certified(std::uint64_t n) const;

 private:
  struct SearchState {
    std::uint64_t frontier = 0;  // all y < frontier already tested
    std::optional<std::uint64_t> found;
  };
  // Shared so that copies of a spec share their memoized searches.
  struct Caches {
    std::map<std::pair<std::uint64_t, std::uint64_t>, SearchState> search;
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> f_memo;
    std::mutex mu;
  };
  Term term_;
  std::string name_;
  WitnessBoundFn witness_bound_;
  FailurePointFn failure_point_;
  TruthFn truth_;
  std::optional<std::uint64_t> certified_below_;
  std::shared_ptr<Caches> caches_;

  friend std::uint64_t f_fn(const PredicateSpec&, std::uint64_t, std::uint64_t);
};

// Ground truth of A(n). Uses truth when present, otherwise derives it from
// failure_point + witness_bound by bounded search. Throws UncertifiedSpec
// when neither path is available.
bool decide_A(const PredicateSpec& spec, std::uint64_t n);

// The families shipped with the workbench. threshold uses N0 = 10.
std::vector<std::string> builtin_family_names();
PredicateSpec builtin_family(const std::string& name);

// Predicate file: first non-comment line is the term, then optional lines
//   bound: <term in n, x>
//   failure: <comma list of naturals or 'none', one entry per n>
//   truth: <bitstring>
PredicateSpec parse_predicate_file(const std::string& text, const std::string& name = "file");

}  // namespace weakbw
