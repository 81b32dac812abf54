#include "weakbw/forward.hpp"

#include <bit>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace weakbw {

namespace {

std::uint64_t isqrt_u64(std::uint64_t v) {
  if (v == 0) return 0;
  unsigned shift = static_cast<unsigned>((std::bit_width(v) + 1) / 2);
  std::uint64_t r = std::uint64_t(1) << shift;  // >= sqrt(v)
  for (;;) {
    std::uint64_t nr = (r + v / r) / 2;
    if (nr >= r) break;
    r = nr;
  }
  return r;
}

// Dense stages above this index would not fit in memory; the fast
// coordinate accessor handles the deep range instead.
constexpr std::uint64_t kMaxDenseIndex = std::uint64_t(1) << 24;

}  // namespace

std::uint64_t pair_code(std::uint64_t n, std::uint64_t k) {
  std::uint64_t w = n + k;
  return w * (w + 1) / 2 + k;
}

std::pair<std::uint64_t, std::uint64_t> unpair_code(std::uint64_t j) {
  std::uint64_t w = (isqrt_u64(8 * j + 1) - 1) / 2;
  std::uint64_t t = w * (w + 1) / 2;
  std::uint64_t k = j - t;
  return {w - k, k};
}

std::uint64_t f_fn(const PredicateSpec& spec, std::uint64_t n, std::uint64_t i) {
  if (i == 0) return 0;
  {
    std::lock_guard<std::mutex> lock(spec.caches_->mu);
    auto it = spec.caches_->f_memo.find({n, i});
    if (it != spec.caches_->f_memo.end()) return it->second;
  }
  std::uint64_t x = 0;
  while (x < i && spec.least_witness_below(n, x, i)) ++x;
  std::lock_guard<std::mutex> lock(spec.caches_->mu);
  spec.caches_->f_memo[{n, i}] = x;
  return x;
}

FinVec y_vec(const PredicateSpec& spec, std::uint64_t n, std::uint64_t i) {
  return basis(static_cast<std::size_t>(pair_code(n, f_fn(spec, n, i))));
}

Rat coeff_approx(std::uint64_t n, int p) {
  std::uint64_t half = (n + 1) / 2;
  if ((n + 1) % 2 == 0) return Rat::pow2(-static_cast<long>(half));

  static std::map<std::pair<std::uint64_t, int>, Rat> memo;
  static std::mutex memo_mu;
  {
    std::lock_guard<std::mutex> lock(memo_mu);
    auto it = memo.find({n, p});
    if (it != memo.end()) return it->second;
  }
  // 2^-(n+1)/2 = 2^-(half) / sqrt(2); floor(sqrt(2 * 4^q)) / 2^q
  // underestimates sqrt(2) by less than 2^-q.
  long q = std::max<long>(0, static_cast<long>(p) - static_cast<long>(half) - 1);
  mpz_class arg;
  mpz_ui_pow_ui(arg.get_mpz_t(), 4, static_cast<unsigned long>(q));
  arg *= 2;
  mpz_class s;
  mpz_sqrt(s.get_mpz_t(), arg.get_mpz_t());
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, static_cast<unsigned long>(q + 1 + static_cast<long>(half)));
  Rat out(s, den);
  std::lock_guard<std::mutex> lock(memo_mu);
  memo.emplace(std::make_pair(n, p), out);
  return out;
}

namespace {

FinVec forward_stage(const std::shared_ptr<const PredicateSpec>& spec, std::uint64_t i,
                     int k) {
  std::uint64_t max_index = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> support;  // (index, n)
  support.reserve(i + 1);
  for (std::uint64_t n = 0; n <= i; ++n) {
    std::uint64_t idx = pair_code(n, f_fn(*spec, n, i));
    support.emplace_back(idx, n);
    max_index = std::max(max_index, idx);
  }
  if (max_index > kMaxDenseIndex)
    throw std::length_error("forward stage: support index " + std::to_string(max_index) +
                            " too large to materialize densely");
  std::vector<Rat> coords(max_index + 1, Rat(0));
  for (const auto& [idx, n] : support)
    coords[idx] = coeff_approx(n, k + static_cast<int>(n) + 2);
  return FinVec::normalized(std::move(coords));
}

Rat forward_coord(const std::shared_ptr<const PredicateSpec>& spec, std::uint64_t i,
                  std::uint64_t j, int k) {
  auto [n, m] = unpair_code(j);
  if (n > i) return Rat(0);
  if (f_fn(*spec, n, i) != m) return Rat(0);
  return coeff_approx(n, k + static_cast<int>(n) + 2);
}

}  // namespace

ForwardInstance build_sequence(std::shared_ptr<const PredicateSpec> spec) {
  BoundedSeq xs(
      [spec](std::uint64_t i) {
        return L2Point([spec, i](int k) { return forward_stage(spec, i, k); }, Rat(1),
                       [spec, i](std::uint64_t j, int k) { return forward_coord(spec, i, j, k); });
      },
      Rat(1));
  ForwardInstance inst{spec, xs.with_provider(forward_cluster_provider(spec))};
  return inst;
}

ForwardInstance build_sequence(const PredicateSpec& spec) {
  return build_sequence(std::make_shared<const PredicateSpec>(spec));
}

FinVec project_Mn(std::uint64_t n, const FinVec& v) {
  return project_indices(
      v, [n](std::size_t j) { return unpair_code(static_cast<std::uint64_t>(j)).first == n; });
}

L2Point project_Mn(std::uint64_t n, const L2Point& x) {
  return l2_project_indices(x, [n](std::uint64_t j) { return unpair_code(j).first == n; });
}

int extract_g(const L2Point& x, std::uint64_t n) {
  L2Point px = project_Mn(n, x);
  Rat s = l2_norm_sq(px).approx(static_cast<int>(n) + 3);
  return s < Rat::pow2(-static_cast<long>(n) - 2) ? 0 : 1;
}

namespace {

// Smallest i with f(n, i) >= m+1: every x <= m needs a witness below i,
// and i must exceed m itself.
std::uint64_t stage_f_exceeds(const PredicateSpec& spec, std::uint64_t n, std::uint64_t m) {
  std::uint64_t s = m + 1;
  for (std::uint64_t x = 0; x <= m; ++x) {
    auto lw = spec.least_witness_certified(n, x);
    if (!lw)
      throw AnnotationUnsound(spec.name() + ": expected a witness for x = " +
                              std::to_string(x) + " at n = " + std::to_string(n));
    s = std::max(s, *lw + 1);
  }
  return s;
}

// Smallest i with f(n, i) = kn, when kn is the least witness-free x.
std::uint64_t stage_f_reaches(const PredicateSpec& spec, std::uint64_t n, std::uint64_t kn) {
  std::uint64_t s = kn;
  for (std::uint64_t x = 0; x < kn; ++x) {
    auto lw = spec.least_witness_certified(n, x);
    if (!lw)
      throw AnnotationUnsound(spec.name() + ": failure point is not least at n = " +
                              std::to_string(n));
    s = std::max(s, *lw + 1);
  }
  return s;
}

std::uint64_t failure_point_of(const PredicateSpec& spec, std::uint64_t n) {
  if (spec.has_failure_point()) {
    auto fp = spec.failure_point(n);
    if (!fp)
      throw AnnotationUnsound(spec.name() + ": truth says A(" + std::to_string(n) +
                              ") fails but failure point is none");
    return *fp;
  }
  // Derive: scan for the least x without a witness (terminates since not A(n)).
  for (std::uint64_t x = 0;; ++x) {
    if (!spec.least_witness_certified(n, x)) return x;
  }
}

}  // namespace

std::uint64_t forward_coord_stabilization(const PredicateSpec& spec, std::uint64_t j) {
  auto [n, m] = unpair_code(j);
  if (decide_A(spec, n)) return std::max(n, stage_f_exceeds(spec, n, m));
  std::uint64_t kn = failure_point_of(spec, n);
  if (m > kn) return 0;  // coordinate is identically zero
  if (m == kn) return std::max(n, stage_f_reaches(spec, n, kn));
  return std::max(n, stage_f_exceeds(spec, n, m));
}

std::shared_ptr<const ClusterProvider> forward_cluster_provider(
    std::shared_ptr<const PredicateSpec> spec) {
  return std::make_shared<EventuallyConstantProvider>(
      [spec](std::uint64_t j) { return forward_coord_stabilization(*spec, j); },
      [spec](std::uint64_t kappa) {
        // Tail of the cluster point beyond i is at most sum_{n >= kappa} 2^-(n+1).
        std::uint64_t i = 0;
        for (std::uint64_t n = 0; n < kappa; ++n) {
          if (!decide_A(*spec, n)) i = std::max(i, pair_code(n, failure_point_of(*spec, n)));
        }
        return i;
      });
}

}  // namespace weakbw
