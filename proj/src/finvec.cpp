#include "weakbw/finvec.hpp"

#include <algorithm>
#include <stdexcept>

namespace weakbw {

namespace {
const Rat kZero(0);
}

FinVec::FinVec(std::vector<Rat> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw std::invalid_argument("FinVec: empty coordinate list");
  if (coords_.size() > 1 && coords_.back().is_zero())
    throw std::invalid_argument("FinVec: trailing zero violates normalization");
}

FinVec FinVec::normalized(std::vector<Rat> coords) {
  // k = max{ i | i = 0 or r_i != 0 }
  std::size_t k = coords.size();
  while (k > 1 && coords[k - 1].is_zero()) --k;
  coords.resize(std::max<std::size_t>(k, 1));
  if (coords.empty()) coords.emplace_back(0);
  return FinVec(std::move(coords));
}

const Rat& FinVec::coord(std::size_t j) const {
  return j < coords_.size() ? coords_[j] : kZero;
}

FinVec vec_add(const FinVec& u, const FinVec& v) {
  std::size_t n = std::max(u.length(), v.length());
  std::vector<Rat> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(u.coord(i) + v.coord(i));
  return FinVec::normalized(std::move(out));
}

FinVec vec_sub(const FinVec& u, const FinVec& v) {
  std::size_t n = std::max(u.length(), v.length());
  std::vector<Rat> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(u.coord(i) - v.coord(i));
  return FinVec::normalized(std::move(out));
}

FinVec vec_scale(const Rat& q, const FinVec& v) {
  if (q.is_zero()) return FinVec();  // q * <...> = <0>
  std::vector<Rat> out;
  out.reserve(v.length());
  for (const Rat& r : v.coords()) out.push_back(q * r);
  return FinVec(std::move(out));  // q != 0 preserves the trailing nonzero
}

Rat inner_fin(const FinVec& u, const FinVec& v) {
  std::size_t n = std::min(u.length(), v.length());
  Rat acc(0);
  for (std::size_t i = 0; i < n; ++i) {
    if (u.coord(i).is_zero() || v.coord(i).is_zero()) continue;
    acc += u.coord(i) * v.coord(i);
  }
  return acc;
}

Rat norm_sq(const FinVec& u) { return inner_fin(u, u); }

FinVec basis(std::size_t n) {
  std::vector<Rat> out(n + 1, Rat(0));
  out[n] = Rat(1);
  return FinVec(std::move(out));
}

FinVec project_indices(const FinVec& v, const std::function<bool(std::size_t)>& keep) {
  std::vector<Rat> out;
  out.reserve(v.length());
  for (std::size_t i = 0; i < v.length(); ++i)
    out.push_back(keep(i) ? v.coord(i) : Rat(0));
  return FinVec::normalized(std::move(out));
}

std::vector<std::string> vec_to_strings(const FinVec& v) {
  std::vector<std::string> out;
  out.reserve(v.length());
  for (const Rat& r : v.coords()) out.push_back(r.str());
  return out;
}

FinVec vec_from_strings(const std::vector<std::string>& ss) {
  std::vector<Rat> out;
  out.reserve(ss.size());
  for (const auto& s : ss) out.push_back(Rat::parse(s));
  return FinVec::normalized(std::move(out));
}

}  // namespace weakbw
