#include "weakbw/weihrauch.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace weakbw {

const char* to_string(Kind k) {
  switch (k) {
    case Kind::Real:
      return "real";
    case Kind::RealSeq:
      return "real-sequence";
    case Kind::BitSeq:
      return "boolean-sequence";
    case Kind::L2Seq:
      return "l2-sequence";
    case Kind::L2PointK:
      return "l2-point";
    case Kind::PairK:
      return "pair";
  }
  return "?";
}

Kind Payload::kind() const {
  switch (v.index()) {
    case 0:
      return Kind::Real;
    case 1:
      return Kind::RealSeq;
    case 2:
      return Kind::BitSeq;
    case 3:
      return Kind::L2Seq;
    case 4:
      return Kind::L2PointK;
    default:
      return Kind::PairK;
  }
}

Payload make_payload(CReal x) { return Payload{std::move(x)}; }
Payload make_payload(RealSeqPayload x) { return Payload{std::move(x)}; }
Payload make_payload(BitSeqPayload x) { return Payload{std::move(x)}; }
Payload make_payload(BoundedSeq x) { return Payload{std::move(x)}; }
Payload make_payload(L2Point x) { return Payload{std::move(x)}; }
Payload make_pair_payload(Payload a, Payload b) {
  return Payload{PairPayload{std::make_shared<Payload>(std::move(a)),
                             std::make_shared<Payload>(std::move(b))}};
}

namespace {

void require_kind(const Payload& p, Kind k, const std::string& who) {
  if (p.kind() != k)
    throw KindMismatch(who + ": expected " + std::string(to_string(k)) + ", got " +
                       to_string(p.kind()));
}

const RealSeqPayload& as_real_seq(const Payload& p, const std::string& who) {
  require_kind(p, Kind::RealSeq, who);
  return std::get<RealSeqPayload>(p.v);
}

}  // namespace

Problem star(const Problem& f, const Problem& g, const GlueMap& glue) {
  if (glue.from != g.out_kind || glue.to != f.in_kind)
    throw KindMismatch("star(" + f.name + ", " + g.name + "): glue maps " +
                       std::string(to_string(glue.from)) + "->" + to_string(glue.to) +
                       " but needs " + to_string(g.out_kind) + "->" + to_string(f.in_kind));
  Problem out;
  out.name = f.name + " * " + g.name;
  out.in_kind = g.in_kind;
  out.out_kind = Kind::PairK;
  auto fs = f.solve;
  auto gs = g.solve;
  auto gm = glue.map;
  out.solve = [fs, gs, gm](const Payload& inst, RunCtx& ctx) {
    Payload inner = gs(inst, ctx);
    Payload mid = gm(inst, inner, ctx);
    Payload outer = fs(mid, ctx);
    return make_pair_payload(std::move(outer), std::move(inner));
  };
  return out;
}

namespace {

Kind sequencified(Kind k, const std::string& who) {
  switch (k) {
    case Kind::Real:
    case Kind::RealSeq:
      return Kind::RealSeq;
    case Kind::BitSeq:
      return Kind::BitSeq;
    default:
      throw KindMismatch(who + ": cannot parallelize kind " + to_string(k));
  }
}

Payload component_instance(const Problem& f, const Payload& inst, std::uint64_t w) {
  if (f.in_kind == Kind::Real) {
    const auto& rs = as_real_seq(inst, "parallelize");
    return make_payload(rs.at(w));
  }
  if (f.in_kind == Kind::RealSeq) {
    const auto& rs = as_real_seq(inst, "parallelize");
    RealSeqPayload comp;
    auto at = rs.at;
    comp.at = [at, w](std::uint64_t i) { return at(pair_code(w, i)); };
    if (rs.row_modulus) {
      auto rm = rs.row_modulus;
      comp.modulus = [rm, w](std::uint64_t k) { return rm(w, k); };
    }
    return make_payload(std::move(comp));
  }
  // BitSeq
  require_kind(inst, Kind::BitSeq, "parallelize");
  const auto& bs = std::get<BitSeqPayload>(inst.v);
  BitSeqPayload comp;
  auto at = bs.at;
  comp.at = [at, w](std::uint64_t i) { return at(pair_code(w, i)); };
  comp.all_zero_beyond = bs.all_zero_beyond;
  return make_payload(std::move(comp));
}

}  // namespace

Problem parallelize(const Problem& f, std::uint64_t width) {
  if (width < 1) throw std::invalid_argument("parallelize: width must be at least 1");
  Problem out;
  out.name = "^" + f.name + "[" + std::to_string(width) + "]";
  out.in_kind = sequencified(f.in_kind, out.name);
  out.out_kind = sequencified(f.out_kind, out.name);
  Problem base = f;
  out.solve = [base, width](const Payload& inst, RunCtx& ctx) -> Payload {
    std::vector<Payload> sols;
    sols.reserve(width);
    for (std::uint64_t w = 0; w < width; ++w)
      sols.push_back(base.solve(component_instance(base, inst, w), ctx));
    if (base.out_kind == Kind::Real) {
      auto shared = std::make_shared<std::vector<Payload>>(std::move(sols));
      RealSeqPayload rs;
      rs.at = [shared, width](std::uint64_t w) -> CReal {
        if (w >= width) return CReal(Rat(0));
        return std::get<CReal>((*shared)[w].v);
      };
      return make_payload(std::move(rs));
    }
    if (base.out_kind == Kind::BitSeq) {
      auto shared = std::make_shared<std::vector<Payload>>(std::move(sols));
      BitSeqPayload bs;
      bs.at = [shared, width](std::uint64_t w) -> bool {
        if (w >= width) return false;
        return std::get<BitSeqPayload>((*shared)[w].v).at(0);
      };
      bs.all_zero_beyond = width;
      return make_payload(std::move(bs));
    }
    throw KindMismatch("parallelize: unsupported output kind");
  };
  return out;
}

Problem identity_problem(Kind k) {
  Problem p;
  p.name = "id";
  p.in_kind = k;
  p.out_kind = k;
  p.solve = [k](const Payload& inst, RunCtx&) {
    require_kind(inst, k, "id");
    return inst;
  };
  return p;
}

Problem lpo_problem() {
  Problem p;
  p.name = "LPO";
  p.in_kind = Kind::BitSeq;
  p.out_kind = Kind::BitSeq;
  p.solve = [](const Payload& inst, RunCtx& ctx) {
    require_kind(inst, Kind::BitSeq, "LPO");
    const auto& bs = std::get<BitSeqPayload>(inst.v);
    Pred hit = [at = bs.at](std::uint64_t i) { return at(i); };
    bool all_zero;
    if (ctx.oracle.mode == OracleModeKind::Certified) {
      if (!bs.all_zero_beyond)
        throw UncertifiedSpec("LPO: certified mode needs an exhaustive bound");
      all_zero = exists_certified(hit, *bs.all_zero_beyond) == OracleAnswer::No;
    } else {
      OracleAnswer a = exists_staged(hit, ctx.oracle.budget);
      if (a == OracleAnswer::Unknown) {
        ctx.best_effort = true;
        ctx.notes.push_back("LPO: no witness within horizon, answering all-zero");
        all_zero = true;
      } else {
        all_zero = false;
      }
    }
    BitSeqPayload out;
    out.at = [all_zero](std::uint64_t i) { return i == 0 && all_zero; };
    out.all_zero_beyond = 1;
    return make_payload(std::move(out));
  };
  return p;
}

Problem lim_problem() {
  Problem p;
  p.name = "lim";
  p.in_kind = Kind::RealSeq;
  p.out_kind = Kind::Real;
  p.solve = [](const Payload& inst, RunCtx& ctx) {
    const auto& rs = as_real_seq(inst, "lim");
    if (ctx.oracle.mode == OracleModeKind::Certified) {
      if (!rs.modulus) throw UncertifiedSpec("lim: certified mode needs a convergence modulus");
      return make_payload(lim_real_certified(rs.at, rs.modulus).value);
    }
    LimResult r = lim_real_staged(rs.at, ctx.oracle.budget);
    ctx.best_effort = true;
    return make_payload(r.value);
  };
  return p;
}

Problem lim2_problem() {
  Problem p;
  p.name = "lim^(2)";
  p.in_kind = Kind::RealSeq;  // pair-coded (outer, inner)
  p.out_kind = Kind::Real;
  p.solve = [](const Payload& inst, RunCtx& ctx) {
    const auto& rs = as_real_seq(inst, "lim^(2)");
    auto at = rs.at;
    if (ctx.oracle.mode == OracleModeKind::Certified) {
      if (!rs.modulus || !rs.row_modulus)
        throw UncertifiedSpec("lim^(2): certified mode needs outer and row moduli");
      auto rm = rs.row_modulus;
      auto inner = [at, rm](std::uint64_t xo) -> CReal {
        auto row = [at, xo](std::uint64_t yi) { return at(pair_code(xo, yi)); };
        return lim_real_certified(row, [rm, xo](std::uint64_t k) { return rm(xo, k); }).value;
      };
      return make_payload(lim_real_certified(inner, rs.modulus).value);
    }
    OracleBudget b = ctx.oracle.budget;
    auto inner = [at, b](std::uint64_t xo) -> CReal {
      auto row = [at, xo](std::uint64_t yi) { return at(pair_code(xo, yi)); };
      return lim_real_staged(row, b).value;
    };
    ctx.best_effort = true;
    return make_payload(lim_real_staged(inner, b).value);
  };
  return p;
}

Problem mct_problem() {
  Problem p;
  p.name = "MCT";
  p.in_kind = Kind::RealSeq;
  p.out_kind = Kind::Real;
  p.solve = [](const Payload& inst, RunCtx& ctx) {
    const auto& rs = as_real_seq(inst, "MCT");
    // The limit is located through rational approximants of the terms;
    // instances are expected to be approximant-monotone at this precision
    // (exactly so for the norm sequences the chains build).
    int prec = ctx.precision + 8;
    auto q = [at = rs.at, prec](std::uint64_t i) { return at(i).approx(prec); };
    MonotoneLimitResult r;
    if (ctx.oracle.mode == OracleModeKind::Certified) {
      if (!rs.modulus) throw UncertifiedSpec("MCT: certified mode needs a stage function");
      r = monotone_limit_certified(q, Rat(1), ctx.precision, rs.modulus);
    } else {
      r = monotone_limit_staged(q, Rat(1), ctx.precision, ctx.oracle.budget);
      ctx.best_effort = true;
    }
    return make_payload(CReal(r.value));
  };
  return p;
}

namespace {

// Level-aware provider built from plain functions (EventuallyConstantProvider
// drops the level, which is wrong for digit-packed streams).
class FnClusterProvider : public ClusterProvider {
 public:
  FnClusterProvider(std::function<std::uint64_t(std::uint64_t, std::uint64_t)> coord,
                    std::function<std::uint64_t(std::uint64_t)> tail)
      : coord_(std::move(coord)), tail_(std::move(tail)) {}
  std::uint64_t coord_stabilization_stage(std::uint64_t j,
                                          std::uint64_t level) const override {
    return coord_(j, level);
  }
  std::uint64_t norm_tail_stage(std::uint64_t kappa) const override { return tail_(kappa); }

 private:
  std::function<std::uint64_t(std::uint64_t, std::uint64_t)> coord_;
  std::function<std::uint64_t(std::uint64_t)> tail_;
};

CoordStream stream_from_payload(const RealSeqPayload& rs) {
  auto at = rs.at;
  CoordStream cs;
  cs.entry = [at](std::uint64_t j, std::uint64_t i) { return at(pair_code(j, i)); };
  cs.bound = Rat(1);
  cs.provider = rs.provider;
  return cs;
}

// Truncation index of z for staged runs (no tail data): budget-capped.
std::uint64_t staged_trunc(int k, const OracleBudget& budget) {
  std::uint64_t n = 2 * static_cast<std::uint64_t>(k) + 6;
  return std::min(budget.horizon, (n + 2) * (n + 3) / 2 + 3);
}

int quarter_log(std::uint64_t v) {
  int e = 0;
  while ((std::uint64_t(1) << (2 * e)) < v) ++e;
  return e;
}

}  // namespace

Problem bwt_rn_problem() {
  Problem p;
  p.name = "BWT_R^N";
  p.in_kind = Kind::RealSeq;  // pair-coded entries <e_j, x_i>
  p.out_kind = Kind::RealSeq;
  p.solve = [](const Payload& inst, RunCtx& ctx) {
    const auto& rs = as_real_seq(inst, "BWT_R^N");
    ClusterCertificate cert = product_cluster(stream_from_payload(rs), ctx.oracle);
    if (ctx.oracle.mode == OracleModeKind::Staged) ctx.best_effort = true;
    RealSeqPayload out;
    out.at = [cert](std::uint64_t j) { return cert.coord(j); };
    out.provider = rs.provider;
    return make_payload(std::move(out));
  };
  return p;
}

Problem bwt_r_problem() {
  Problem p;
  p.name = "BWT_R";
  p.in_kind = Kind::RealSeq;
  p.out_kind = Kind::Real;
  p.solve = [](const Payload& inst, RunCtx& ctx) {
    const auto& rs = as_real_seq(inst, "BWT_R");
    // One-coordinate product space; padding with zero coordinates reuses the
    // box machinery unchanged.
    CoordStream cs;
    auto at = rs.at;
    cs.entry = [at](std::uint64_t j, std::uint64_t i) {
      return j == 0 ? at(i) : CReal(Rat(0));
    };
    cs.bound = Rat(1);
    if (rs.provider) {
      auto base = rs.provider;
      cs.provider = std::make_shared<FnClusterProvider>(
          [base](std::uint64_t j, std::uint64_t level) {
            return j == 0 ? base->coord_stabilization_stage(0, level) : std::uint64_t(0);
          },
          [](std::uint64_t) { return 0; });
    }
    ClusterCertificate cert = product_cluster(cs, ctx.oracle);
    if (ctx.oracle.mode == OracleModeKind::Staged) ctx.best_effort = true;
    return make_payload(cert.coord(0));
  };
  return p;
}

Problem bwt_weak_l2_problem() {
  Problem p;
  p.name = "BWT_weak-l2";
  p.in_kind = Kind::L2Seq;
  p.out_kind = Kind::L2PointK;
  p.solve = [](const Payload& inst, RunCtx& ctx) {
    require_kind(inst, Kind::L2Seq, "BWT_weak-l2");
    WeakClusterResult r = weak_cluster(std::get<BoundedSeq>(inst.v), ctx.oracle);
    if (!r.certified) ctx.best_effort = true;
    return make_payload(r.point);
  };
  return p;
}

ReductionReport run_reduction(const Reduction& r, const Payload& instance,
                              const OracleConfig& oracle, int precision) {
  RunCtx ctx{oracle, precision};
  ReductionReport rep;
  try {
    Payload pre = r.pre ? r.pre(instance, ctx) : instance;
    Payload inner = r.to.solve(pre, ctx);
    Payload sol = r.post ? r.post(instance, inner, ctx) : inner;
    if (r.checker) {
      rep.checked = true;
      rep.valid = r.checker(instance, sol, ctx);
    }
    rep.solution = std::move(sol);
    rep.best_effort = ctx.best_effort;
    rep.notes = std::move(ctx.notes);
  } catch (const OracleUnknown& e) {
    rep.best_effort = true;
    rep.notes.push_back(std::string("oracle unknown: ") + e.what() + " [" + e.stage_trace +
                        "]");
  }
  return rep;
}

// --- coordinate-stream payload and the rev chain -----------------------------

Payload coordseq_payload(const BoundedSeq& xs) {
  BoundedSeq work = xs;
  if (xs.bound() > Rat(1)) {
    Rat inv = Rat(1) / xs.bound();
    BoundedSeq base = xs;
    work = BoundedSeq([base, inv](std::uint64_t i) { return l2_scale(inv, base.item(i)); },
                      Rat(1), xs.provider());
  }
  CoordStream cs = coord_stream(work);
  RealSeqPayload rs;
  auto entry = cs.entry;
  rs.at = [entry](std::uint64_t t) {
    auto [j, i] = unpair_code(t);
    return entry(j, i);
  };
  rs.provider = cs.provider;
  return make_payload(std::move(rs));
}

namespace {

// Exactly nondecreasing rational lower bounds for ||z_i||^2 built from the
// componentwise cluster point: summands are squared one-sided coordinate
// bounds, so increments are nonnegative.
std::function<Rat(std::uint64_t)> norm_sq_lower_from(
    std::function<CReal(std::uint64_t)> coord, int prec) {
  auto prefix = std::make_shared<std::vector<Rat>>();
  auto mu = std::make_shared<std::mutex>();
  return [coord, prec, prefix, mu](std::uint64_t i) {
    std::lock_guard<std::mutex> lock(*mu);
    while (prefix->size() <= i) {
      std::uint64_t j = prefix->size();
      Rat c = coord(j).approx(prec);
      Rat lb = max(Rat(0), c.abs() - Rat::pow2(-prec));
      prefix->push_back((prefix->empty() ? Rat(0) : prefix->back()) + lb.square());
    }
    return (*prefix)[i];
  };
}

L2Point assemble_cluster_point(std::function<CReal(std::uint64_t)> coord,
                               std::shared_ptr<const ClusterProvider> provider,
                               const OracleConfig& oracle, const Rat& bound) {
  bool certified = oracle.mode == OracleModeKind::Certified;
  auto trunc = [certified, provider, oracle](int k) -> std::uint64_t {
    if (certified) return provider->norm_tail_stage(2 * static_cast<std::uint64_t>(k) + 4);
    return staged_trunc(k, oracle.budget);
  };
  L2Point::StageFn stage_fn = [coord, trunc](int k) {
    if (k < 0) k = 0;
    std::uint64_t i = trunc(k);
    int p = k + 2 + quarter_log(i + 1);
    std::vector<Rat> coords;
    coords.reserve(i + 1);
    for (std::uint64_t j = 0; j <= i; ++j) coords.push_back(coord(j).approx(p));
    return FinVec::normalized(std::move(coords));
  };
  L2Point::CoordFn coord_fn = [coord, trunc](std::uint64_t j, int k) -> Rat {
    if (k < 0) k = 0;
    std::uint64_t i = trunc(k);
    if (j > i) return Rat(0);
    return coord(j).approx(k + 2 + quarter_log(i + 1));
  };
  return L2Point(stage_fn, bound, coord_fn);
}

}  // namespace

Reduction make_rev_chain() {
  Reduction r;
  r.name = "rev-chain";
  r.from = bwt_weak_l2_problem();

  GlueMap glue;
  glue.from = Kind::RealSeq;  // c from BWT_R^N
  glue.to = Kind::RealSeq;    // monotone norm approximants for MCT
  glue.map = [](const Payload& inst, const Payload& inner, RunCtx& ctx) {
    const auto& pre = as_real_seq(inst, "rev-chain glue");
    const auto& c = as_real_seq(inner, "rev-chain glue");
    RealSeqPayload mct;
    std::uint64_t istar;
    if (ctx.oracle.mode == OracleModeKind::Certified) {
      istar = pre.provider->norm_tail_stage(static_cast<std::uint64_t>(ctx.precision) + 4);
      auto provider = pre.provider;
      mct.modulus = [provider](std::uint64_t k) { return provider->norm_tail_stage(k); };
    } else {
      istar = staged_trunc(ctx.precision, ctx.oracle.budget);
    }
    int prec = ctx.precision + 5 + static_cast<int>(std::bit_width(istar + 1));
    auto q = norm_sq_lower_from(c.at, prec);
    mct.at = [q](std::uint64_t i) { return CReal(q(i)); };
    return make_payload(std::move(mct));
  };
  r.to = star(mct_problem(), bwt_rn_problem(), glue);

  r.pre = [](const Payload& inst, RunCtx&) {
    require_kind(inst, Kind::L2Seq, "rev-chain");
    return coordseq_payload(std::get<BoundedSeq>(inst.v));
  };
  r.post = [](const Payload& inst, const Payload& inner, RunCtx& ctx) {
    const auto& xs = std::get<BoundedSeq>(inst.v);
    const auto& pair = std::get<PairPayload>(inner.v);
    const auto& c = as_real_seq(*pair.second, "rev-chain post");
    Rat B = xs.bound();
    L2Point scaled = assemble_cluster_point(c.at, c.provider, ctx.oracle, min(B, Rat(1)));
    if (B > Rat(1)) return make_payload(l2_scale(B, scaled));
    return make_payload(scaled);
  };
  r.checker = [](const Payload& inst, const Payload& sol, RunCtx& ctx) {
    const auto& xs = std::get<BoundedSeq>(inst.v);
    const auto& x = std::get<L2Point>(sol.v);
    std::uint64_t horizon = std::min<std::uint64_t>(ctx.oracle.budget.horizon, 2000);
    return verify_cluster(xs, x, ctx.precision, horizon);
  };
  return r;
}

Payload lim2_instance_for(std::shared_ptr<const PredicateSpec> spec, std::uint64_t n) {
  RealSeqPayload rs;
  rs.at = [spec, n](std::uint64_t t) -> CReal {
    auto [xo, yi] = unpair_code(t);
    for (std::uint64_t xp = 0; xp <= xo; ++xp) {
      if (!spec->least_witness_below(n, xp, yi + 1)) return CReal(Rat(0));
    }
    return CReal(Rat(1));
  };
  rs.row_modulus = [spec, n](std::uint64_t xo, std::uint64_t) -> std::uint64_t {
    std::uint64_t m = 0;
    for (std::uint64_t xp = 0; xp <= xo; ++xp) {
      auto lw = spec->least_witness_certified(n, xp);
      if (!lw) return 0;  // the row is identically zero
      m = std::max(m, *lw);
    }
    return m;
  };
  rs.modulus = [spec, n](std::uint64_t) -> std::uint64_t {
    if (decide_A(*spec, n)) return 0;  // inner limits are identically one
    for (std::uint64_t x = 0;; ++x) {
      if (!spec->least_witness_certified(n, x)) return x;
    }
  };
  return make_payload(std::move(rs));
}

Reduction make_fwd_chain(std::shared_ptr<const PredicateSpec> spec, std::uint64_t n) {
  Reduction r;
  r.name = "fwd-chain";
  r.from = lim2_problem();
  r.to = bwt_weak_l2_problem();
  r.pre = [spec](const Payload&, RunCtx&) {
    return make_payload(build_sequence(spec).xs);
  };
  r.post = [n](const Payload&, const Payload& inner, RunCtx&) {
    const auto& x = std::get<L2Point>(inner.v);
    return make_payload(CReal(Rat(1 - extract_g(x, n))));
  };
  r.checker = [spec, n](const Payload&, const Payload& sol, RunCtx& ctx) {
    Rat got = std::get<CReal>(sol.v).approx(ctx.precision + 1);
    Rat want(decide_A(*spec, n) ? 1 : 0);
    return (got - want).abs() <= Rat::pow2(-ctx.precision);
  };
  return r;
}

// --- signed-digit coding and the product collapse ----------------------------

struct SignedDigits::State {
  std::vector<int> digits;
  std::vector<CReal> residuals;  // residuals[t] scaled into [-1, 1]
  std::mutex mu;
};

SignedDigits::SignedDigits(CReal u) : state_(std::make_shared<State>()) {
  state_->residuals.push_back(std::move(u));
}

int SignedDigits::digit(std::uint64_t t) const {
  std::lock_guard<std::mutex> lock(state_->mu);
  while (state_->digits.size() <= t) {
    const CReal& r = state_->residuals.back();
    Rat a = r.approx(3);
    int d = 0;
    if (a >= Rat(1, 4))
      d = 1;
    else if (a <= Rat(-1, 4))
      d = -1;
    state_->digits.push_back(d);
    state_->residuals.push_back(
        creal_sub(creal_mul_rat(Rat(2), r), CReal(Rat(d))));
  }
  return state_->digits[t];
}

CReal pack_digits(std::function<int(std::uint64_t)> digit) {
  return CReal(
      [digit](int k) {
        std::uint64_t T = static_cast<std::uint64_t>(k) / 2 + 2;  // 4^-T / 3 <= 2^-k
        Rat acc(0);
        for (std::uint64_t t = 0; t < T; ++t) {
          int d = digit(t);
          if (d != 0) acc += Rat(d) * Rat::pow2(-2 * static_cast<long>(t) - 2);
        }
        return acc;
      },
      "packed");
}

std::function<int(std::uint64_t)> unpack_digits(const CReal& packed) {
  // same residual-chain shape as extraction, but over base 4, where code
  // points keep the digit windows disjoint
  auto digits = std::make_shared<std::vector<int>>();
  auto residuals = std::make_shared<std::vector<CReal>>();
  auto mu = std::make_shared<std::mutex>();
  residuals->push_back(packed);
  return [digits, residuals, mu](std::uint64_t t) {
    std::lock_guard<std::mutex> lock(*mu);
    while (digits->size() <= t) {
      const CReal& s = residuals->back();
      Rat a = s.approx(6);
      int d = 0;
      if (a > Rat(1, 8))
        d = 1;
      else if (a < Rat(-1, 8))
        d = -1;
      digits->push_back(d);
      residuals->push_back(creal_sub(creal_mul_rat(Rat(4), s), CReal(Rat(d))));
    }
    return (*digits)[t];
  };
}

Reduction make_prod_collapse() {
  Reduction r;
  r.name = "prod-collapse";
  r.from = bwt_rn_problem();
  r.to = bwt_r_problem();

  r.pre = [](const Payload& inst, RunCtx&) {
    const auto& rs = as_real_seq(inst, "prod-collapse");
    auto at = rs.at;
    // r_i packs the interleaved signed-binary digits of all coordinates of
    // y_i; digit position pair(j, p) carries digit p of coordinate j.
    auto digit_cache =
        std::make_shared<std::map<std::pair<std::uint64_t, std::uint64_t>, SignedDigits>>();
    auto cache_mu = std::make_shared<std::mutex>();
    auto digit_of = [at, digit_cache, cache_mu](std::uint64_t i, std::uint64_t t) -> int {
      auto [j, p] = unpair_code(t);
      std::unique_lock<std::mutex> lock(*cache_mu);
      auto it = digit_cache->find({i, j});
      if (it == digit_cache->end()) {
        it = digit_cache->emplace(std::make_pair(i, j), SignedDigits(at(pair_code(j, i))))
                 .first;
      }
      SignedDigits sd = it->second;
      lock.unlock();
      return sd.digit(p);
    };
    RealSeqPayload coded;
    coded.at = [digit_of](std::uint64_t i) {
      return pack_digits([digit_of, i](std::uint64_t t) { return digit_of(i, t); });
    };
    if (rs.provider) {
      auto base = rs.provider;
      // The level-L membership test of the packed real reads digits up to
      // T(L+3) = (L+3)/2 + 2; it is constant once the coordinates feeding
      // those digit positions have stabilized.
      coded.provider = std::make_shared<FnClusterProvider>(
          [base](std::uint64_t /*j*/, std::uint64_t level) {
            std::uint64_t T = (level + 3) / 2 + 2;
            std::uint64_t s = 0;
            for (std::uint64_t t = 0; t < T; ++t)
              s = std::max(s, base->coord_stabilization_stage(unpair_code(t).first, 0));
            return s;
          },
          [](std::uint64_t) { return 0; });
    }
    return make_payload(std::move(coded));
  };

  r.post = [](const Payload&, const Payload& inner, RunCtx&) {
    const auto& r0 = std::get<CReal>(inner.v);
    auto digit = unpack_digits(r0);
    RealSeqPayload out;
    out.at = [digit](std::uint64_t j) {
      return CReal(
          [digit, j](int k) {
            std::uint64_t P = static_cast<std::uint64_t>(k) + 2;
            Rat acc(0);
            for (std::uint64_t p = 0; p < P; ++p) {
              int d = digit(pair_code(j, p));
              if (d != 0) acc += Rat(d) * Rat::pow2(-static_cast<long>(p) - 1);
            }
            return acc;
          },
          "decoded");
    };
    return make_payload(std::move(out));
  };

  r.checker = [](const Payload& inst, const Payload& sol, RunCtx& ctx) {
    // Componentwise agreement with the directly computed cluster point.
    const auto& rs = as_real_seq(inst, "prod-collapse check");
    ClusterCertificate direct = product_cluster(stream_from_payload(rs), ctx.oracle);
    const auto& dec = as_real_seq(sol, "prod-collapse check");
    int prec = ctx.precision;
    for (std::uint64_t j = 0; j <= 8; ++j) {
      Rat a = direct.coord(j).approx(prec + 2);
      Rat b = dec.at(j).approx(prec + 2);
      if ((a - b).abs() > Rat::pow2(-prec)) return false;
    }
    return true;
  };
  return r;
}

}  // namespace weakbw
