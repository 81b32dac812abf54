#include "weakbw/predicate.hpp"

#include <algorithm>
#include <sstream>

namespace weakbw {

PredicateSpec::PredicateSpec(Term term, std::string name)
    : term_(std::move(term)), name_(std::move(name)), caches_(std::make_shared<Caches>()) {}

std::uint64_t PredicateSpec::witness_bound(std::uint64_t n, std::uint64_t x) const {
  if (!witness_bound_) throw UncertifiedSpec(name_ + ": no witness bound annotation");
  return witness_bound_(n, x);
}

std::optional<std::uint64_t> PredicateSpec::failure_point(std::uint64_t n) const {
  if (!failure_point_) throw UncertifiedSpec(name_ + ": no failure point annotation");
  require_certified(n);
  return failure_point_(n);
}

bool PredicateSpec::truth(std::uint64_t n) const {
  if (!truth_) throw UncertifiedSpec(name_ + ": no truth annotation");
  require_certified(n);
  return truth_(n);
}

PredicateSpec& PredicateSpec::set_witness_bound(WitnessBoundFn fn) {
  witness_bound_ = std::move(fn);
  return *this;
}
PredicateSpec& PredicateSpec::set_failure_point(FailurePointFn fn) {
  failure_point_ = std::move(fn);
  return *this;
}
PredicateSpec& PredicateSpec::set_truth(TruthFn fn) {
  truth_ = std::move(fn);
  return *this;
}
PredicateSpec& PredicateSpec::set_certified_below(std::optional<std::uint64_t> bound) {
  certified_below_ = bound;
  return *this;
}

void PredicateSpec::require_certified(std::uint64_t n) const {
  if (certified_below_ && n >= *certified_below_)
    throw UncertifiedSpec(name_ + ": annotations certify only n < " +
                          std::to_string(*certified_below_) + " (asked for n = " +
                          std::to_string(n) + ")");
}

std::optional<std::uint64_t> PredicateSpec::least_witness_below(std::uint64_t n,
                                                                std::uint64_t x,
                                                                std::uint64_t limit) const {
  std::lock_guard<std::mutex> lock(caches_->mu);
  SearchState& st = caches_->search[{n, x}];
  if (st.found && *st.found < limit) return st.found;
  if (st.frontier >= limit) return std::nullopt;  // exhaustively searched below limit
  for (std::uint64_t y = st.frontier; y < limit; ++y) {
    if (eval_is_zero(term_, x, y, n)) {
      st.found = y;
      st.frontier = y + 1;
      return st.found;
    }
  }
  st.frontier = limit;
  return std::nullopt;
}

std::optional<std::uint64_t> PredicateSpec::least_witness_certified(std::uint64_t n,
                                                                    std::uint64_t x) const {
  std::uint64_t b = witness_bound(n, x);
  return least_witness_below(n, x, b + 1);
}

bool decide_A(const PredicateSpec& spec, std::uint64_t n) {
  if (spec.has_truth()) return spec.truth(n);
  if (spec.has_failure_point() && spec.has_witness_bound()) {
    std::optional<std::uint64_t> fp = spec.failure_point(n);
    if (!fp) return true;
    // Verify the annotation: every x below the failure point has a witness
    // within its bound, and the failure point itself has none.
    for (std::uint64_t x = 0; x < *fp; ++x) {
      if (!spec.least_witness_certified(n, x))
        throw AnnotationUnsound(spec.name() + ": x = " + std::to_string(x) +
                                " below failure point has no witness within bound");
    }
    std::uint64_t sanity = std::max<std::uint64_t>(spec.witness_bound(n, *fp), 256);
    if (spec.least_witness_below(n, *fp, sanity + 1))
      throw AnnotationUnsound(spec.name() + ": failure point n = " + std::to_string(n) +
                              " has a witness after all");
    return false;
  }
  throw UncertifiedSpec(spec.name() + ": decide_A needs truth, or witness bound + failure point");
}

namespace {

// |n - 2y| as a monus expression; zero iff y = n/2 with n even.
Term parity_matrix() {
  Term two_y = t_plus(t_var_y(), t_var_y());
  return t_plus(t_monus(t_var_n(), two_y), t_monus(two_y, t_var_n()));
}

PredicateSpec make_always_true() {
  PredicateSpec s(t_const(0), "always-true");
  s.set_witness_bound([](std::uint64_t, std::uint64_t) { return 0; });
  s.set_failure_point([](std::uint64_t) { return std::nullopt; });
  s.set_truth([](std::uint64_t) { return true; });
  return s;
}

PredicateSpec make_never_true() {
  PredicateSpec s(t_const(1), "never-true");
  s.set_witness_bound([](std::uint64_t, std::uint64_t) { return 0; });
  s.set_failure_point([](std::uint64_t) { return std::optional<std::uint64_t>(0); });
  s.set_truth([](std::uint64_t) { return false; });
  return s;
}

PredicateSpec make_parity() {
  PredicateSpec s(parity_matrix(), "parity");
  s.set_witness_bound([](std::uint64_t n, std::uint64_t) { return n; });
  s.set_failure_point([](std::uint64_t n) -> std::optional<std::uint64_t> {
    if (n % 2 == 0) return std::nullopt;
    return 0;
  });
  s.set_truth([](std::uint64_t n) { return n % 2 == 0; });
  return s;
}

constexpr std::uint64_t kThresholdN0 = 10;

PredicateSpec make_threshold() {
  // t = ifz(N0 -. n, 1, 0): zero iff n < N0, independent of x and y.
  Term t = t_ifz(t_monus(t_const(kThresholdN0), t_var_n()), t_const(1), t_const(0));
  PredicateSpec s(t, "threshold");
  s.set_witness_bound([](std::uint64_t, std::uint64_t) { return 0; });
  s.set_failure_point([](std::uint64_t n) -> std::optional<std::uint64_t> {
    if (n < kThresholdN0) return std::nullopt;
    return 0;
  });
  s.set_truth([](std::uint64_t n) { return n < kThresholdN0; });
  return s;
}

PredicateSpec make_square_witness() {
  // |y - x^2|: zero iff y = x^2; always true, with slowly growing witnesses.
  Term xx = t_times(t_var_x(), t_var_x());
  Term t = t_plus(t_monus(t_var_y(), xx), t_monus(xx, t_var_y()));
  PredicateSpec s(t, "square-witness");
  s.set_witness_bound([](std::uint64_t, std::uint64_t x) { return x * x; });
  s.set_failure_point([](std::uint64_t) { return std::nullopt; });
  s.set_truth([](std::uint64_t) { return true; });
  return s;
}

PredicateSpec make_delayed_parity() {
  // Witnesses exist freely for x <= n; beyond that only when n is even.
  // Exercises nonzero failure points: failure_point(odd n) = n + 1.
  Term t = t_ifz(t_monus(t_var_x(), t_var_n()), t_const(0), parity_matrix());
  PredicateSpec s(t, "delayed-parity");
  s.set_witness_bound([](std::uint64_t n, std::uint64_t) { return n; });
  s.set_failure_point([](std::uint64_t n) -> std::optional<std::uint64_t> {
    if (n % 2 == 0) return std::nullopt;
    return n + 1;
  });
  s.set_truth([](std::uint64_t n) { return n % 2 == 0; });
  return s;
}

}  // namespace

std::vector<std::string> builtin_family_names() {
  return {"always-true", "never-true", "parity", "threshold", "square-witness",
          "delayed-parity"};
}

PredicateSpec builtin_family(const std::string& name) {
  if (name == "always-true") return make_always_true();
  if (name == "never-true") return make_never_true();
  if (name == "parity") return make_parity();
  if (name == "threshold") return make_threshold();
  if (name == "square-witness") return make_square_witness();
  if (name == "delayed-parity") return make_delayed_parity();
  throw std::invalid_argument("unknown builtin predicate family '" + name + "'");
}

namespace {

bool has_var_y(const Term& t) {
  switch (t->kind) {
    case TermKind::VarY:
      return true;
    case TermKind::Const:
    case TermKind::VarX:
    case TermKind::VarN:
      return false;
    case TermKind::Ifz:
      return has_var_y(t->c) || has_var_y(t->a) || has_var_y(t->b);
    default:
      return has_var_y(t->a) || has_var_y(t->b);
  }
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

PredicateSpec parse_predicate_file(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  std::optional<Term> term;
  std::optional<Term> bound_term;
  std::optional<std::vector<std::optional<std::uint64_t>>> failures;
  std::optional<std::vector<bool>> truth_bits;

  while (std::getline(in, line)) {
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (!term) {
      term = parse_term(s);
      continue;
    }
    auto colon = s.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument(name + ": expected 'key: value' line, got '" + s + "'");
    std::string key = trim(s.substr(0, colon));
    std::string val = trim(s.substr(colon + 1));
    if (key == "bound") {
      Term b = parse_term(val);
      if (has_var_y(b))
        throw std::invalid_argument(name + ": bound term may use only n and x");
      bound_term = b;
    } else if (key == "failure") {
      std::vector<std::optional<std::uint64_t>> fs;
      std::istringstream vs(val);
      std::string item;
      while (std::getline(vs, item, ',')) {
        item = trim(item);
        if (item == "none")
          fs.emplace_back(std::nullopt);
        else
          fs.emplace_back(std::stoull(item));
      }
      failures = std::move(fs);
    } else if (key == "truth") {
      std::vector<bool> bits;
      for (char c : val) {
        if (c == '0')
          bits.push_back(false);
        else if (c == '1')
          bits.push_back(true);
        else
          throw std::invalid_argument(name + ": truth line must be a bitstring");
      }
      truth_bits = std::move(bits);
    } else {
      throw std::invalid_argument(name + ": unknown annotation key '" + key + "'");
    }
  }
  if (!term) throw std::invalid_argument(name + ": missing term line");

  PredicateSpec spec(*term, name);
  std::optional<std::uint64_t> certified;
  if (bound_term) {
    Term b = *bound_term;
    spec.set_witness_bound([b](std::uint64_t n, std::uint64_t x) -> std::uint64_t {
      mpz_class v = eval_term(b, x, 0, n);
      if (!v.fits_ulong_p())
        throw std::overflow_error("witness bound does not fit in 64 bits");
      return static_cast<std::uint64_t>(v.get_ui());
    });
  }
  if (failures) {
    auto fs = *failures;
    certified = certified ? std::min<std::uint64_t>(*certified, fs.size())
                          : static_cast<std::uint64_t>(fs.size());
    spec.set_failure_point(
        [fs](std::uint64_t n) -> std::optional<std::uint64_t> { return fs.at(n); });
  }
  if (truth_bits) {
    auto bits = *truth_bits;
    certified = certified ? std::min<std::uint64_t>(*certified, bits.size())
                          : static_cast<std::uint64_t>(bits.size());
    spec.set_truth([bits](std::uint64_t n) { return bits.at(n); });
  }
  spec.set_certified_below(certified);
  return spec;
}

}  // namespace weakbw
