#pragma once

#include <cstdint>
#include <memory>
#include <utility>

#include "weakbw/l2.hpp"
#include "weakbw/predicate.hpp"
#include "weakbw/provider.hpp"

namespace weakbw {

// Cantor pairing (n+k)(n+k+1)/2 + k: a monotone bijection N^2 -> N.
std::uint64_t pair_code(std::uint64_t n, std::uint64_t k);
std::pair<std::uint64_t, std::uint64_t> unpair_code(std::uint64_t j);

// f(n,i) = max{ x <= i | forall x' < x exists y < i. t(x',y,n) = 0 },
// the literal double bounded search (witness searches are memoized).
// Nondecreasing in i; f(n,0) = 0; unbounded in i exactly when A(n) holds.
std::uint64_t f_fn(const PredicateSpec& spec, std::uint64_t n, std::uint64_t i);

// y_{n,i} = e_{<n, f(n,i)>}.
FinVec y_vec(const PredicateSpec& spec, std::uint64_t n, std::uint64_t i);

// Rational approximation of the coefficient 2^-(n+1)/2, accurate to 2^-p.
// Exact when n is odd; integer square root of 2 * 4^q otherwise.
Rat coeff_approx(std::uint64_t n, int p);

// The encoded instance: x_i = sum_{n<=i} 2^-(n+1)/2 y_{n,i}, bounded by 1.
struct ForwardInstance {
  std::shared_ptr<const PredicateSpec> spec;
  BoundedSeq xs;
};

// Stage k of x_i carries each summand's coefficient to 2^-(k+n+2), so the
// stage is within 2^-(k+1) of the represented point.
ForwardInstance build_sequence(const PredicateSpec& spec);
ForwardInstance build_sequence(std::shared_ptr<const PredicateSpec> spec);

// Projection onto M_n = span{ e_<n,k> | k in N }.
FinVec project_Mn(std::uint64_t n, const FinVec& v);
L2Point project_Mn(std::uint64_t n, const L2Point& x);

// Comprehension readout from a weak cluster point: approximates
// ||P_{M_n}(x)||^2 to 2^-(n+3) and compares against 2^-(n+2), which
// separates the two possible values 0 and 2^-(n+1) with margin 2^-(n+3).
// Returns 0 iff A(n) on genuine cluster points of the encoded sequence.
int extract_g(const L2Point& x, std::uint64_t n);

// Index beyond which coordinate j of the encoded sequence is constant,
// derived from the certification annotations.
std::uint64_t forward_coord_stabilization(const PredicateSpec& spec, std::uint64_t j);

// Certified oracle data for reverse runs on an encoded instance.
std::shared_ptr<const ClusterProvider> forward_cluster_provider(
    std::shared_ptr<const PredicateSpec> spec);

}  // namespace weakbw
