#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>

namespace weakbw {

// Certified reverse runs need two finite answers that stand in for jump
// queries about the (rescaled, 1-bounded) sequence:
//   - an index beyond which the level-L membership test of coordinate j is
//     constant (its approximant at precision L+3 no longer moves),
//   - an index i with L - ||z_i||^2 <= 2^-kappa, where z_i truncates the
//     componentwise cluster point c and L = sup ||z_i||^2.
// Implementations derive these from instance annotations. The interface is
// the boundary of the artifact: nothing behind it is hypercomputation,
// everything in front of it treats the answers as oracle data.
struct ClusterProvider {
  virtual ~ClusterProvider() = default;
  virtual std::uint64_t coord_stabilization_stage(std::uint64_t j,
                                                  std::uint64_t level) const = 0;
  virtual std::uint64_t norm_tail_stage(std::uint64_t kappa) const = 0;
};

// Provider for sequences whose coordinates are eventually constant as exact
// values (level plays no role): constant sequences, the basis stream
// (e_i)_i, finite dumps, and encoded comprehension instances. Stages are
// memoized; the stage functions may be expensive.
class EventuallyConstantProvider : public ClusterProvider {
 public:
  EventuallyConstantProvider(std::function<std::uint64_t(std::uint64_t)> coord_stage,
                             std::function<std::uint64_t(std::uint64_t)> tail_stage)
      : coord_stage_(std::move(coord_stage)), tail_stage_(std::move(tail_stage)) {}

  std::uint64_t coord_stabilization_stage(std::uint64_t j,
                                          std::uint64_t /*level*/) const override {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = coord_memo_.find(j);
    if (it != coord_memo_.end()) return it->second;
    std::uint64_t s = coord_stage_(j);
    coord_memo_.emplace(j, s);
    return s;
  }

  std::uint64_t norm_tail_stage(std::uint64_t kappa) const override {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = tail_memo_.find(kappa);
    if (it != tail_memo_.end()) return it->second;
    std::uint64_t s = tail_stage_(kappa);
    tail_memo_.emplace(kappa, s);
    return s;
  }

 private:
  std::function<std::uint64_t(std::uint64_t)> coord_stage_;
  std::function<std::uint64_t(std::uint64_t)> tail_stage_;
  mutable std::map<std::uint64_t, std::uint64_t> coord_memo_;
  mutable std::map<std::uint64_t, std::uint64_t> tail_memo_;
  mutable std::mutex mu_;
};

}  // namespace weakbw
