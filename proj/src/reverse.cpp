#include "weakbw/reverse.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <mutex>
#include <stdexcept>

#include "weakbw/predicate.hpp"

namespace weakbw {

CoordStream coord_stream(const BoundedSeq& xs) {
  auto entry = [xs](std::uint64_t j, std::uint64_t i) -> CReal {
    L2Point item = xs.item(i);
    if (item.has_fast_coord()) {
      // Same approximant the generic route produces: inner_fin against e_j
      // at stage k' reads off coordinate j of stage(k').
      int shift =
          static_cast<int>((embed(basis(static_cast<std::size_t>(j))).norm_bound() +
                            item.norm_bound() + Rat(1))
                               .mag2_bound());
      return CReal([item, j, shift](int k) { return item.coord(j, k + shift); }, "entry");
    }
    return l2_inner(embed(basis(static_cast<std::size_t>(j))), item);
  };
  return {entry, xs.bound(), xs.provider()};
}

namespace {

// |e - m 2^-L| <= 5 2^-(L+2), exactly:  |4 e 2^L - 4 m| <= 5  scaled by den(e).
bool in_padded_box(const Rat& e, const mpz_class& m, std::uint64_t level) {
  mpz_class lhs = e.num();
  mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), static_cast<mp_bitcnt_t>(level + 2));
  lhs -= 4 * m * e.den();
  mpz_class rhs = 5 * e.den();
  return ::abs(lhs) <= rhs;
}

constexpr std::uint64_t kMaxStages = 200000;

}  // namespace

class ProductClusterState {
 public:
  ProductClusterState(CoordStream cs, OracleConfig cfg)
      : cs_(std::move(cs)), cfg_(std::move(cfg)) {
    if (cs_.bound > Rat(1))
      throw std::invalid_argument("product_cluster: sequence must be bounded by 1 (rescale)");
    if (cfg_.mode == OracleModeKind::Certified && !cs_.provider)
      throw UncertifiedSpec("product_cluster: certified mode needs a cluster provider");
    if (cfg_.budget.horizon < 1)
      throw std::invalid_argument("oracle horizon must be at least 1");
  }

  void extend_to_stage(std::uint64_t s) {
    std::lock_guard<std::mutex> lock(mu_);
    while (stage_ < s) advance_one();
  }

  // Midpoint of coordinate j's interval once its level is at least p+2;
  // |midpoint - c_j| <= 3 2^-level <= 2^-p.
  Rat coord_approx(std::uint64_t j, int p) {
    if (p < 0) p = 0;
    std::uint64_t want = std::max<std::uint64_t>(j + 1, static_cast<std::uint64_t>(p) + 2);
    std::lock_guard<std::mutex> lock(mu_);
    while (stage_ < want) advance_one();
    return Rat(centers_[j], pow2z(stage_));
  }

  std::uint64_t stage() const {
    std::lock_guard<std::mutex> lock(mu_);
    return stage_;
  }

  std::vector<ClusterCertificate::TraceStage> trace() const {
    std::lock_guard<std::mutex> lock(mu_);
    return trace_;
  }

  const CoordStream& stream() const { return cs_; }
  const OracleConfig& config() const { return cfg_; }

 private:
  static mpz_class pow2z(std::uint64_t e) {
    mpz_class z;
    mpz_ui_pow_ui(z.get_mpz_t(), 2, static_cast<unsigned long>(e));
    return z;
  }

  Rat entry_val(std::uint64_t j, std::uint64_t i, std::uint64_t level) {
    return cs_.entry(j, i).approx(static_cast<int>(level) + 3);
  }

  // Refine coordinate j from `center` at `level` to level+1. Candidates are
  // the five level-(L+1) intervals meeting the current one, scanned in
  // ascending center order; the first YES is committed.
  // Returns the chosen delta in {-2..2}.
  int refine_certified(std::uint64_t j, mpz_class& center, std::uint64_t level) {
    std::uint64_t stab = cs_.provider->coord_stabilization_stage(j, level + 1);
    Rat e = entry_val(j, stab, level + 1);
    for (int d = -2; d <= 2; ++d) {
      mpz_class cand = 2 * center + d;
      if (in_padded_box(e, cand, level + 1)) {
        center = cand;
        return d;
      }
    }
    throw UnsoundOracle("product_cluster: no admissible refinement for coordinate " +
                        std::to_string(j) + " at level " + std::to_string(level + 1) +
                        " (stabilization data is wrong)");
  }

  int refine_staged(std::uint64_t j, mpz_class& center, std::uint64_t level) {
    std::uint64_t need = staged_hit_threshold(cfg_.budget);
    for (int d = -2; d <= 2; ++d) {
      mpz_class cand = 2 * center + d;
      std::vector<std::uint8_t> filtered(hits_.size(), 0);
      std::uint64_t count = 0;
      for (std::uint64_t i = 0; i < hits_.size(); ++i) {
        if (!hits_[i]) continue;
        if (in_padded_box(entry_val(j, i, level + 1), cand, level + 1)) {
          filtered[i] = 1;
          ++count;
        }
      }
      if (count >= need) {
        center = cand;
        hits_ = std::move(filtered);
        return d;
      }
    }
    throw OracleUnknown("product_cluster: staged oracle exhausted",
                        "stage " + std::to_string(stage_ + 1) + ", coordinate " +
                            std::to_string(j) + ", level " + std::to_string(level + 1) +
                            ", horizon " + std::to_string(cfg_.budget.horizon));
  }

  void advance_one() {
    if (stage_ >= kMaxStages)
      throw std::length_error("product_cluster: refinement beyond supported depth");
    std::uint64_t s = stage_;
    bool certified = cfg_.mode == OracleModeKind::Certified;
    if (!certified && s == 0) hits_.assign(cfg_.budget.horizon, 1);

    ClusterCertificate::TraceStage ts;
    ts.stage = s + 1;
    for (std::uint64_t j = 0; j < s; ++j) {
      int d = certified ? refine_certified(j, centers_[j], s)
                        : refine_staged(j, centers_[j], s);
      ts.refine_deltas.push_back(d);
    }
    // New coordinate s starts at [-1, 1] (level 0, center 0, always valid for
    // a 1-bounded sequence) and descends to level s+1.
    mpz_class m = 0;
    for (std::uint64_t level = 0; level <= s; ++level) {
      int d = certified ? refine_certified(s, m, level) : refine_staged(s, m, level);
      ts.descent_deltas.push_back(d);
    }
    centers_.push_back(std::move(m));
    stage_ = s + 1;
    trace_.push_back(std::move(ts));
    if (certified) validate_committed_box();
  }

  // Route the committed box through the generic certified oracle: the
  // recurrence witness points at the stabilization stage, and the membership
  // predicate is spot-checked there and beyond.
  void validate_committed_box() {
    std::uint64_t level = stage_;
    std::uint64_t i0 = 0;
    for (std::uint64_t j = 0; j < centers_.size(); ++j)
      i0 = std::max(i0, cs_.provider->coord_stabilization_stage(j, level));
    auto centers = centers_;  // copy for the closure; state is mid-flight
    auto self = this;
    Pred p = [self, centers, level](std::uint64_t i) {
      for (std::uint64_t j = 0; j < centers.size(); ++j) {
        if (!in_padded_box(self->entry_val(j, i, level), centers[j], level)) return false;
      }
      return true;
    };
    RecurrenceWitness w{[i0](std::uint64_t k) { return std::max(k, i0); }};
    if (infinitely_often_certified(p, w) != OracleAnswer::Yes)
      throw UnsoundOracle("product_cluster: committed box failed validation");
  }

  CoordStream cs_;
  OracleConfig cfg_;
  mutable std::mutex mu_;
  std::uint64_t stage_ = 0;
  std::vector<mpz_class> centers_;       // center integers at level = stage_
  std::vector<std::uint8_t> hits_;       // staged: surviving indices
  std::vector<ClusterCertificate::TraceStage> trace_;
};

CReal ClusterCertificate::coord(std::uint64_t j) const {
  auto st = state;
  return CReal([st, j](int p) { return st->coord_approx(j, p); },
               "c_" + std::to_string(j));
}

std::vector<ClusterCertificate::TraceStage> ClusterCertificate::trace() const {
  return state->trace();
}

std::uint64_t ClusterCertificate::stages_explored() const { return state->stage(); }

Rat ClusterCertificate::norm_budget_upper(std::uint64_t k) const {
  int p = static_cast<int>(k) + 6;
  Rat eps = Rat::pow2(-p);
  Rat acc(0);
  for (std::uint64_t j = 0; j <= k; ++j) {
    Rat c = state->coord_approx(j, p);
    acc += (c.abs() + eps).square();
  }
  return acc;
}

ClusterCertificate product_cluster(const CoordStream& cs, const OracleConfig& oracle) {
  ClusterCertificate cert;
  cert.state = std::make_shared<ProductClusterState>(cs, oracle);
  return cert;
}

namespace {

// Exactly nondecreasing rational lower bounds for ||z_i||^2: summands are
// squared one-sided coordinate bounds, so increments are nonnegative and the
// oracle's exact monotonicity check holds with no slack.
std::function<Rat(std::uint64_t)> norm_sq_lower(ClusterCertificate cert, int precision) {
  auto prefix = std::make_shared<std::vector<Rat>>();
  auto mu = std::make_shared<std::mutex>();
  auto state = cert.state;
  return [state, precision, prefix, mu](std::uint64_t i) {
    std::lock_guard<std::mutex> lock(*mu);
    while (prefix->size() <= i) {
      std::uint64_t j = prefix->size();
      Rat c = state->coord_approx(j, precision);
      Rat lb = max(Rat(0), c.abs() - Rat::pow2(-precision));
      prefix->push_back((prefix->empty() ? Rat(0) : prefix->back()) + lb.square());
    }
    return (*prefix)[i];
  };
}

// Uniform per-coordinate precision for q: (istar+1) 2^-(p-1) <= 2^-(kappa+2).
int norm_q_precision(int kappa, std::uint64_t istar) {
  int bits = static_cast<int>(std::bit_width(istar + 1));
  return kappa + 3 + bits;
}

// Staged runs have no tail data; the truncation index is a budget-capped
// heuristic matching the shape certified tails take.
std::uint64_t staged_trunc_index(int k, const OracleBudget& budget) {
  std::uint64_t n = 2 * static_cast<std::uint64_t>(k) + 6;
  std::uint64_t cap = (n + 2) * (n + 3) / 2 + 3;
  return std::min(budget.horizon, cap);
}

// Smallest e with 4^e >= v.
int quarter_log(std::uint64_t v) {
  int e = 0;
  while ((std::uint64_t(1) << (2 * e)) < v) ++e;
  return e;
}

}  // namespace

WeakClusterResult weak_cluster(const BoundedSeq& xs, const OracleConfig& oracle) {
  Rat B = xs.bound();
  BoundedSeq work = xs;
  bool rescaled = false;
  if (B > Rat(1)) {
    Rat inv = Rat(1) / B;
    BoundedSeq base = xs;
    work = BoundedSeq([base, inv](std::uint64_t i) { return l2_scale(inv, base.item(i)); },
                      Rat(1), xs.provider());
    rescaled = true;
  }

  CoordStream cs = coord_stream(work);
  ClusterCertificate cert = product_cluster(cs, oracle);
  bool certified = oracle.mode == OracleModeKind::Certified;
  auto provider = work.provider();

  auto trunc_index = [certified, provider, oracle](int k) -> std::uint64_t {
    if (certified) return provider->norm_tail_stage(2 * static_cast<std::uint64_t>(k) + 4);
    return staged_trunc_index(k, oracle.budget);
  };

  auto state = cert.state;
  L2Point::StageFn stage_fn = [state, trunc_index](int k) -> FinVec {
    if (k < 0) k = 0;
    std::uint64_t i = trunc_index(k);
    int p = k + 2 + quarter_log(i + 1);  // sqrt(i+1) 2^-p <= 2^-(k+2)
    std::vector<Rat> coords;
    coords.reserve(i + 1);
    for (std::uint64_t j = 0; j <= i; ++j) coords.push_back(state->coord_approx(j, p));
    return FinVec::normalized(std::move(coords));
  };
  L2Point::CoordFn coord_fn = [state, trunc_index](std::uint64_t j, int k) -> Rat {
    if (k < 0) k = 0;
    std::uint64_t i = trunc_index(k);
    if (j > i) return Rat(0);
    return state->coord_approx(j, k + 2 + quarter_log(i + 1));
  };
  L2Point point(stage_fn, min(B, Rat(1)), coord_fn);
  if (rescaled) point = l2_scale(B, point);

  // Monotone norm limit of ||z_i||^2, reported at the 2^-12 level.
  constexpr int kReportPrecision = 12;
  MonotoneLimitResult limit;
  if (certified) {
    std::uint64_t istar = provider->norm_tail_stage(kReportPrecision + 2);
    auto q = norm_sq_lower(cert, norm_q_precision(kReportPrecision + 2, istar));
    limit = monotone_limit_certified(
        q, Rat(1), kReportPrecision,
        [provider](std::uint64_t kp) { return provider->norm_tail_stage(kp); });
  } else {
    std::uint64_t cap = staged_trunc_index(4, oracle.budget);
    auto q = norm_sq_lower(cert, norm_q_precision(kReportPrecision + 2, cap));
    OracleBudget capped{cap};
    limit = monotone_limit_staged(q, Rat(1), kReportPrecision, capped);
  }

  WeakClusterResult out{point, certified, cert, limit};
  return out;
}

bool verify_cluster(const BoundedSeq& xs, const L2Point& x, int k, std::uint64_t horizon) {
  if (k <= 0) return true;
  CoordStream cs = coord_stream(xs);
  // Accept when approximants at k+3 are within 2^-k - 2^-(k+2), which makes
  // the true difference at most 2^-k.
  Rat thr = Rat::pow2(-k) - Rat::pow2(-(k + 2));
  for (std::uint64_t j = 0; j <= static_cast<std::uint64_t>(k); ++j) {
    Rat a = l2_inner(embed(basis(static_cast<std::size_t>(j))), x).approx(k + 3);
    std::uint64_t count = 0;
    for (std::uint64_t i = 0; i <= horizon && count < static_cast<std::uint64_t>(k); ++i) {
      Rat b = cs.entry(j, i).approx(k + 3);
      if ((a - b).abs() <= thr) ++count;
    }
    if (count < static_cast<std::uint64_t>(k)) return false;
  }
  return true;
}

BoundedSeq constant_seq(const FinVec& v) {
  L2Point p = embed(v);
  std::uint64_t last = v.length() - 1;
  auto provider = std::make_shared<EventuallyConstantProvider>(
      [](std::uint64_t) { return 0; }, [last](std::uint64_t) { return last; });
  return BoundedSeq([p](std::uint64_t) { return p; }, p.norm_bound(), provider);
}

BoundedSeq basis_seq() {
  auto provider = std::make_shared<EventuallyConstantProvider>(
      [](std::uint64_t j) { return j + 1; }, [](std::uint64_t) { return 0; });
  return BoundedSeq(
      [](std::uint64_t i) { return embed(basis(static_cast<std::size_t>(i))); }, Rat(1),
      provider);
}

BoundedSeq loaded_seq(std::vector<FinVec> items, Rat bound) {
  if (items.empty()) throw std::invalid_argument("loaded_seq: no points");
  std::uint64_t last_index = items.size() - 1;
  std::uint64_t last_support = items.back().length() - 1;
  auto shared = std::make_shared<std::vector<FinVec>>(std::move(items));
  auto provider = std::make_shared<EventuallyConstantProvider>(
      [last_index](std::uint64_t) { return last_index; },
      [last_support](std::uint64_t) { return last_support; });
  return BoundedSeq(
      [shared, last_index](std::uint64_t i) {
        return embed((*shared)[static_cast<std::size_t>(std::min(i, last_index))]);
      },
      std::move(bound), provider);
}

}  // namespace weakbw
