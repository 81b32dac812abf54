#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "weakbw/l2.hpp"
#include "weakbw/oracle.hpp"
#include "weakbw/provider.hpp"

namespace weakbw {

// The coordinate view of a bounded sequence: entry(j, i) = <e_j, x_i>.
struct CoordStream {
  std::function<CReal(std::uint64_t, std::uint64_t)> entry;
  Rat bound;
  std::shared_ptr<const ClusterProvider> provider;  // required for certified runs
};

CoordStream coord_stream(const BoundedSeq& xs);

// Componentwise cluster point of the coordinate sequence in [-1,1]^N,
// located by stagewise dyadic bisection. At stage k every constrained
// coordinate j < k sits in a closed interval [ (m-1) 2^-k, (m+1) 2^-k ] of
// width 2^-k+1; membership tests are slack-padded by 2^-k-2 and evaluated on
// approximants, so every query is decidable. Among admissible refinements
// (same-level intervals meeting the parent) the lexicographically least
// YES-box is chosen.
//
// On certified oracles the produced c equals the coordinatewise limit of the
// sequence, and for every k infinitely many i satisfy
// |entry(j,i) - c_j| <= 2^-k+2 for all j <= k.
class ProductClusterState;

class ClusterCertificate {
 public:
  CReal coord(std::uint64_t j) const;

  struct TraceStage {
    std::uint64_t stage = 0;
    // center deltas (in {-2..2}) of previously constrained coordinates,
    // then the descent path of the newly constrained one.
    std::vector<int> refine_deltas;
    std::vector<int> descent_deltas;
  };
  std::vector<TraceStage> trace() const;
  std::uint64_t stages_explored() const;

  // Exact rational upper bound on sum_{j<=k} c_j^2 (coordinates taken at
  // precision k+6 and padded by their error).
  Rat norm_budget_upper(std::uint64_t k) const;

  std::shared_ptr<ProductClusterState> state;  // shared, lazily refined
};

ClusterCertificate product_cluster(const CoordStream& cs, const OracleConfig& oracle);

struct WeakClusterResult {
  L2Point point;
  bool certified = false;
  ClusterCertificate certificate;
  // Monotone limit of ||z_i||^2 as reported by the oracle layer for the
  // deepest stage materialized so far.
  MonotoneLimitResult norm_limit;
};

// Weak cluster point of a bounded sequence: truncations z_i = <c_0,...,c_i>
// of the componentwise cluster point converge to it in norm, monotonically
// in ||z_i||; the truncation index for stage k comes from the oracle layer
// (monotone_limit certified stage data, or the budget in staged mode).
// Sequences bounded by B > 1 are rescaled to bound 1 and the result is
// scaled back.
WeakClusterResult weak_cluster(const BoundedSeq& xs, const OracleConfig& oracle);

// Finite, sound-but-incomplete witness of the cluster property: true iff for
// each j <= k at least k indices i <= horizon satisfy
// |<e_j, x - x_i>| <= 2^-k. Decided conservatively on approximants.
bool verify_cluster(const BoundedSeq& xs, const L2Point& x, int k, std::uint64_t horizon);

// --- instance corpus helpers ------------------------------------------------

// Constant sequence at a dense-subspace point.
BoundedSeq constant_seq(const FinVec& v);
// The canonical weakly-null sequence (e_i)_i.
BoundedSeq basis_seq();
// Finite dump extended by repeating its last point.
BoundedSeq loaded_seq(std::vector<FinVec> items, Rat bound);

}  // namespace weakbw
