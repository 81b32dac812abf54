#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace weakbw {

// Terms t(x, y, n) over the naturals: constants, the three variables,
// +, *, truncated subtraction '-.', and the zero test ifz(c, a, b)
// ("a if c = 0 else b"). Evaluation is total by construction.
enum class TermKind { Const, VarX, VarY, VarN, Plus, Times, Monus, Ifz };

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

struct TermNode {
  TermKind kind;
  std::uint64_t value = 0;  // Const only
  Term a, b, c;             // children (c used by Ifz)
};

Term t_const(std::uint64_t v);
Term t_var_x();
Term t_var_y();
Term t_var_n();
Term t_plus(Term a, Term b);
Term t_times(Term a, Term b);
Term t_monus(Term a, Term b);
Term t_ifz(Term c, Term a, Term b);

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t offset);
  std::size_t offset;
};

// Grammar: sums of products, '*' over '+' and '-.', left associative,
// parentheses, whitespace insensitive. print-parse round trips are exact.
Term parse_term(std::string_view text);
std::string print_term(const Term& t);

// Structural equality.
bool term_equal(const Term& a, const Term& b);

// Exact evaluation (arbitrary precision; a checked 64-bit fast path is used
// internally).
mpz_class eval_term(const Term& t, std::uint64_t x, std::uint64_t y, std::uint64_t n);

// eval_term(...) == 0, avoiding big-integer work when the values fit.
bool eval_is_zero(const Term& t, std::uint64_t x, std::uint64_t y, std::uint64_t n);

}  // namespace weakbw
