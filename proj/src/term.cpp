#include "weakbw/term.hpp"

#include <cctype>
#include <optional>

namespace weakbw {

namespace {
Term make(TermKind k, std::uint64_t v, Term a, Term b, Term c) {
  auto n = std::make_shared<TermNode>();
  n->kind = k;
  n->value = v;
  n->a = std::move(a);
  n->b = std::move(b);
  n->c = std::move(c);
  return n;
}
}  // namespace

Term t_const(std::uint64_t v) { return make(TermKind::Const, v, nullptr, nullptr, nullptr); }
Term t_var_x() { return make(TermKind::VarX, 0, nullptr, nullptr, nullptr); }
Term t_var_y() { return make(TermKind::VarY, 0, nullptr, nullptr, nullptr); }
Term t_var_n() { return make(TermKind::VarN, 0, nullptr, nullptr, nullptr); }
Term t_plus(Term a, Term b) { return make(TermKind::Plus, 0, std::move(a), std::move(b), nullptr); }
Term t_times(Term a, Term b) { return make(TermKind::Times, 0, std::move(a), std::move(b), nullptr); }
Term t_monus(Term a, Term b) { return make(TermKind::Monus, 0, std::move(a), std::move(b), nullptr); }
Term t_ifz(Term c, Term a, Term b) {
  return make(TermKind::Ifz, 0, std::move(a), std::move(b), std::move(c));
}

ParseError::ParseError(const std::string& msg, std::size_t off)
    : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Term run() {
    Term t = sum();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
    return t;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  // '-.' as a two-character operator
  bool eat_monus() {
    skip_ws();
    if (pos_ + 1 < text_.size() && text_[pos_] == '-' && text_[pos_ + 1] == '.') {
      pos_ += 2;
      return true;
    }
    return false;
  }

  Term sum() {
    Term t = product();
    for (;;) {
      if (eat_monus()) {
        t = t_monus(t, product());
      } else if (eat('+')) {
        t = t_plus(t, product());
      } else {
        return t;
      }
    }
  }

  Term product() {
    Term t = atom();
    while (eat('*')) t = t_times(t, atom());
    return t;
  }

  Term atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    if (c == '(') {
      ++pos_;
      Term t = sum();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return t;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Term number() {
    std::size_t start = pos_;
    std::uint64_t v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      std::uint64_t d = static_cast<std::uint64_t>(text_[pos_] - '0');
      if (v > (UINT64_MAX - d) / 10) throw ParseError("numeric literal too large", start);
      v = v * 10 + d;
      ++pos_;
    }
    return t_const(v);
  }

  Term identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string_view id = text_.substr(start, pos_ - start);
    if (id == "x") return t_var_x();
    if (id == "y") return t_var_y();
    if (id == "n") return t_var_n();
    if (id == "ifz") {
      if (!eat('(')) throw ParseError("expected '(' after ifz", pos_);
      Term c = sum();
      if (!eat(',')) throw ParseError("expected ',' in ifz", pos_);
      Term a = sum();
      if (!eat(',')) throw ParseError("expected ',' in ifz", pos_);
      Term b = sum();
      if (!eat(')')) throw ParseError("expected ')' closing ifz", pos_);
      return t_ifz(c, a, b);
    }
    throw ParseError("unknown identifier '" + std::string(id) + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// precedence: 0 = sum level, 1 = product level, 2 = atom
int prec_of(TermKind k) {
  switch (k) {
    case TermKind::Plus:
    case TermKind::Monus:
      return 0;
    case TermKind::Times:
      return 1;
    default:
      return 2;
  }
}

void print_rec(const Term& t, int min_prec, std::string& out) {
  int p = prec_of(t->kind);
  bool paren = p < min_prec;
  if (paren) out += '(';
  switch (t->kind) {
    case TermKind::Const:
      out += std::to_string(t->value);
      break;
    case TermKind::VarX:
      out += 'x';
      break;
    case TermKind::VarY:
      out += 'y';
      break;
    case TermKind::VarN:
      out += 'n';
      break;
    case TermKind::Plus:
      print_rec(t->a, 0, out);
      out += " + ";
      print_rec(t->b, 1, out);
      break;
    case TermKind::Monus:
      print_rec(t->a, 0, out);
      out += " -. ";
      print_rec(t->b, 1, out);
      break;
    case TermKind::Times:
      print_rec(t->a, 1, out);
      out += '*';
      print_rec(t->b, 2, out);
      break;
    case TermKind::Ifz:
      out += "ifz(";
      print_rec(t->c, 0, out);
      out += ", ";
      print_rec(t->a, 0, out);
      out += ", ";
      print_rec(t->b, 0, out);
      out += ')';
      break;
  }
  if (paren) out += ')';
}

struct Overflow {};

std::uint64_t eval_u64(const TermNode& t, std::uint64_t x, std::uint64_t y, std::uint64_t n) {
  switch (t.kind) {
    case TermKind::Const:
      return t.value;
    case TermKind::VarX:
      return x;
    case TermKind::VarY:
      return y;
    case TermKind::VarN:
      return n;
    case TermKind::Plus: {
      std::uint64_t a = eval_u64(*t.a, x, y, n), b = eval_u64(*t.b, x, y, n), r;
      if (__builtin_add_overflow(a, b, &r)) throw Overflow{};
      return r;
    }
    case TermKind::Times: {
      std::uint64_t a = eval_u64(*t.a, x, y, n), b = eval_u64(*t.b, x, y, n), r;
      if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
      return r;
    }
    case TermKind::Monus: {
      std::uint64_t a = eval_u64(*t.a, x, y, n), b = eval_u64(*t.b, x, y, n);
      return a > b ? a - b : 0;
    }
    case TermKind::Ifz:
      return eval_u64(*t.c, x, y, n) == 0 ? eval_u64(*t.a, x, y, n) : eval_u64(*t.b, x, y, n);
  }
  throw std::logic_error("eval_u64: bad node");
}

mpz_class eval_big(const TermNode& t, const mpz_class& x, const mpz_class& y,
                   const mpz_class& n) {
  switch (t.kind) {
    case TermKind::Const:
      return mpz_class(static_cast<unsigned long>(t.value));
    case TermKind::VarX:
      return x;
    case TermKind::VarY:
      return y;
    case TermKind::VarN:
      return n;
    case TermKind::Plus:
      return eval_big(*t.a, x, y, n) + eval_big(*t.b, x, y, n);
    case TermKind::Times:
      return eval_big(*t.a, x, y, n) * eval_big(*t.b, x, y, n);
    case TermKind::Monus: {
      mpz_class a = eval_big(*t.a, x, y, n), b = eval_big(*t.b, x, y, n);
      return a > b ? mpz_class(a - b) : mpz_class(0);
    }
    case TermKind::Ifz:
      return eval_big(*t.c, x, y, n) == 0 ? eval_big(*t.a, x, y, n) : eval_big(*t.b, x, y, n);
  }
  throw std::logic_error("eval_big: bad node");
}

mpz_class from_u64(std::uint64_t v) {
  mpz_class z;
  mpz_import(z.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return z;
}

}  // namespace

Term parse_term(std::string_view text) { return Parser(text).run(); }

std::string print_term(const Term& t) {
  std::string out;
  print_rec(t, 0, out);
  return out;
}

bool term_equal(const Term& a, const Term& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::Const:
      return a->value == b->value;
    case TermKind::VarX:
    case TermKind::VarY:
    case TermKind::VarN:
      return true;
    case TermKind::Plus:
    case TermKind::Times:
    case TermKind::Monus:
      return term_equal(a->a, b->a) && term_equal(a->b, b->b);
    case TermKind::Ifz:
      return term_equal(a->c, b->c) && term_equal(a->a, b->a) && term_equal(a->b, b->b);
  }
  return false;
}

mpz_class eval_term(const Term& t, std::uint64_t x, std::uint64_t y, std::uint64_t n) {
  try {
    return from_u64(eval_u64(*t, x, y, n));
  } catch (const Overflow&) {
    return eval_big(*t, from_u64(x), from_u64(y), from_u64(n));
  }
}

bool eval_is_zero(const Term& t, std::uint64_t x, std::uint64_t y, std::uint64_t n) {
  try {
    return eval_u64(*t, x, y, n) == 0;
  } catch (const Overflow&) {
    return eval_big(*t, from_u64(x), from_u64(y), from_u64(n)) == 0;
  }
}

}  // namespace weakbw
