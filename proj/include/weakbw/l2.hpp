#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>

#include "weakbw/creal.hpp"
#include "weakbw/finvec.hpp"

namespace weakbw {

// A completion point of the dense subspace: a precision-indexed family of
// finitely supported vectors with Cauchy modulus
//   dist(stage(k), stage(m)) <= 2^-k   for all m >= k,
// together with a rational upper bound on the norm of the represented point.
//
// normBound is required: the continuous extension of the inner product needs
// it to compute its modulus.
class L2Point {
 public:
  using StageFn = std::function<FinVec(int)>;
  // Optional fast path: coordinate j of stage(k), without materializing the
  // stage. Must agree with stage(k).coord(j).
  using CoordFn = std::function<Rat(std::uint64_t, int)>;

  L2Point(StageFn stage, Rat norm_bound);
  L2Point(StageFn stage, Rat norm_bound, CoordFn coord);

  const FinVec& stage(int k) const;
  Rat coord(std::uint64_t j, int k) const;
  bool has_fast_coord() const { return static_cast<bool>(impl_->coord); }
  const Rat& norm_bound() const { return impl_->norm_bound; }

 private:
  struct Impl {
    StageFn stage;
    CoordFn coord;  // may be empty
    Rat norm_bound;
    mutable std::map<int, FinVec> memo;
    mutable std::mutex mu;
  };
  std::shared_ptr<const Impl> impl_;
};

// Dense-subspace point as a completion point: constant stage function,
// normBound = exact norm rounded up to a rational.
L2Point embed(const FinVec& v);

L2Point l2_add(const L2Point& x, const L2Point& y);
L2Point l2_sub(const L2Point& x, const L2Point& y);
L2Point l2_scale(const Rat& q, const L2Point& x);

// Continuous extension of the inner product. approx(k) queries both points
// at the stage k' with 2^-k' (Bx + By + 1) <= 2^-k.
CReal l2_inner(const L2Point& x, const L2Point& y);
CReal l2_norm_sq(const L2Point& x);
CReal l2_norm(const L2Point& x);
CReal l2_dist(const L2Point& x, const L2Point& y);

// Stagewise coordinate projection; 1-Lipschitz, so the Cauchy modulus and
// the norm bound carry over unchanged.
L2Point l2_project_indices(const L2Point& x, std::function<bool(std::uint64_t)> keep);

// A bounded sequence of completion points: ||item(i)|| <= bound.
struct ClusterProvider;  // reverse.hpp
class BoundedSeq {
 public:
  using ItemFn = std::function<L2Point(std::uint64_t)>;

  BoundedSeq(ItemFn item, Rat bound);
  BoundedSeq(ItemFn item, Rat bound, std::shared_ptr<const ClusterProvider> provider);

  const L2Point& item(std::uint64_t i) const;
  const Rat& bound() const { return impl_->bound; }
  std::shared_ptr<const ClusterProvider> provider() const { return impl_->provider; }
  BoundedSeq with_provider(std::shared_ptr<const ClusterProvider> p) const;

 private:
  struct Impl {
    ItemFn item;
    Rat bound;
    std::shared_ptr<const ClusterProvider> provider;
    mutable std::map<std::uint64_t, L2Point> memo;
    mutable std::mutex mu;
  };
  std::shared_ptr<Impl> impl_;
};

}  // namespace weakbw
