#include "weakbw/l2.hpp"

#include <utility>

namespace weakbw {

L2Point::L2Point(StageFn stage, Rat norm_bound) {
  auto impl = std::make_shared<Impl>();
  impl->stage = std::move(stage);
  impl->norm_bound = std::move(norm_bound);
  impl_ = std::move(impl);
}

L2Point::L2Point(StageFn stage, Rat norm_bound, CoordFn coord) {
  auto impl = std::make_shared<Impl>();
  impl->stage = std::move(stage);
  impl->coord = std::move(coord);
  impl->norm_bound = std::move(norm_bound);
  impl_ = std::move(impl);
}

const FinVec& L2Point::stage(int k) const {
  if (k < 0) k = 0;
  std::lock_guard<std::mutex> lock(impl_->mu);
  auto it = impl_->memo.find(k);
  if (it != impl_->memo.end()) return it->second;
  FinVec v = impl_->stage(k);
  return impl_->memo.emplace(k, std::move(v)).first->second;
}

Rat L2Point::coord(std::uint64_t j, int k) const {
  if (impl_->coord) return impl_->coord(j, k);
  return stage(k).coord(static_cast<std::size_t>(j));
}

L2Point embed(const FinVec& v) {
  Rat bound = rat_sqrt_upper(norm_sq(v), 6);
  return L2Point([v](int) { return v; }, bound,
                 [v](std::uint64_t j, int) { return v.coord(static_cast<std::size_t>(j)); });
}

L2Point l2_add(const L2Point& x, const L2Point& y) {
  return L2Point(
      [x, y](int k) { return vec_add(x.stage(k + 1), y.stage(k + 1)); },
      x.norm_bound() + y.norm_bound(),
      [x, y](std::uint64_t j, int k) { return x.coord(j, k + 1) + y.coord(j, k + 1); });
}

L2Point l2_sub(const L2Point& x, const L2Point& y) {
  return L2Point(
      [x, y](int k) { return vec_sub(x.stage(k + 1), y.stage(k + 1)); },
      x.norm_bound() + y.norm_bound(),
      [x, y](std::uint64_t j, int k) { return x.coord(j, k + 1) - y.coord(j, k + 1); });
}

L2Point l2_scale(const Rat& q, const L2Point& x) {
  if (q.is_zero()) return embed(FinVec());
  int shift = static_cast<int>(q.mag2_bound());
  return L2Point(
      [q, x, shift](int k) { return vec_scale(q, x.stage(k + shift)); },
      q.abs() * x.norm_bound(),
      [q, x, shift](std::uint64_t j, int k) { return q * x.coord(j, k + shift); });
}

namespace {
// Smallest k' with 2^-k' (Bx + By + 1) <= 2^-k.
int inner_stage(const L2Point& x, const L2Point& y, int k) {
  return k + static_cast<int>((x.norm_bound() + y.norm_bound() + Rat(1)).mag2_bound());
}
}  // namespace

CReal l2_inner(const L2Point& x, const L2Point& y) {
  return CReal(
      [x, y](int k) {
        int kp = inner_stage(x, y, k);
        return inner_fin(x.stage(kp), y.stage(kp));
      },
      "l2_inner");
}

CReal l2_norm_sq(const L2Point& x) { return l2_inner(x, x); }

CReal l2_norm(const L2Point& x) { return creal_sqrt_nonneg(l2_norm_sq(x)); }

CReal l2_dist(const L2Point& x, const L2Point& y) { return l2_norm(l2_sub(x, y)); }

L2Point l2_project_indices(const L2Point& x, std::function<bool(std::uint64_t)> keep) {
  auto keep_sz = [keep](std::size_t i) { return keep(static_cast<std::uint64_t>(i)); };
  return L2Point(
      [x, keep_sz](int k) { return project_indices(x.stage(k), keep_sz); },
      x.norm_bound(),
      [x, keep](std::uint64_t j, int k) { return keep(j) ? x.coord(j, k) : Rat(0); });
}

BoundedSeq::BoundedSeq(ItemFn item, Rat bound)
    : BoundedSeq(std::move(item), std::move(bound), nullptr) {}

BoundedSeq::BoundedSeq(ItemFn item, Rat bound,
                       std::shared_ptr<const ClusterProvider> provider) {
  impl_ = std::make_shared<Impl>();
  impl_->item = std::move(item);
  impl_->bound = std::move(bound);
  impl_->provider = std::move(provider);
}

const L2Point& BoundedSeq::item(std::uint64_t i) const {
  std::lock_guard<std::mutex> lock(impl_->mu);
  auto it = impl_->memo.find(i);
  if (it != impl_->memo.end()) return it->second;
  L2Point p = impl_->item(i);
  return impl_->memo.emplace(i, std::move(p)).first->second;
}

BoundedSeq BoundedSeq::with_provider(std::shared_ptr<const ClusterProvider> p) const {
  BoundedSeq out = *this;
  out.impl_ = std::make_shared<Impl>();
  out.impl_->item = impl_->item;
  out.impl_->bound = impl_->bound;
  out.impl_->provider = std::move(p);
  return out;
}

}  // namespace weakbw
