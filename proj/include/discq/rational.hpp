#pragma once

#include <gmpxx.h>

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace discq {

using Rat = mpq_class;
using RatVec = std::vector<Rat>;
using RatMat = std::vector<RatVec>;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_ = 0;
};

class DimensionMismatch : public std::runtime_error {
 public:
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

class InfeasiblePoint : public std::runtime_error {
 public:
  explicit InfeasiblePoint(const std::string& what) : std::runtime_error(what) {}
};

class EmptyPolyhedron : public std::runtime_error {
 public:
  explicit EmptyPolyhedron(const std::string& what) : std::runtime_error(what) {}
};

/// Canonicalized fraction; the raw two-argument mpq_class constructor does
/// not reduce.
inline Rat make_rat(long num, long den) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

/// Exact conversion; every double is a binary rational.
inline Rat rat_of_double(double x) {
  Rat r;
  mpq_set_d(r.get_mpq_t(), x);
  return r;
}

/// Parses "3", "-4/5", "0.25", "-1.5e2" style literals exactly.
/// offset is folded into the ParseError for caller-side location reporting.
inline Rat parse_rational(const std::string& text, std::size_t offset = 0) {
  std::string s = text;
  if (s.empty()) throw ParseError("empty rational literal", offset);
  bool neg = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') {
    neg = (s[i] == '-');
    ++i;
  }
  std::string digits, frac, expo;
  bool seen_slash = false, seen_dot = false, seen_e = false;
  std::string denom;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c >= '0' && c <= '9') {
      if (seen_e)
        expo += c;
      else if (seen_slash)
        denom += c;
      else if (seen_dot)
        frac += c;
      else
        digits += c;
    } else if (c == '/' && !seen_slash && !seen_dot && !seen_e) {
      seen_slash = true;
    } else if (c == '.' && !seen_dot && !seen_slash && !seen_e) {
      seen_dot = true;
    } else if ((c == 'e' || c == 'E') && !seen_e && !seen_slash) {
      seen_e = true;
      if (i + 1 < s.size() && (s[i + 1] == '+' || s[i + 1] == '-')) {
        if (s[i + 1] == '-') expo += '-';
        ++i;
      }
    } else {
      throw ParseError("bad character in rational literal", offset + i);
    }
  }
  if (digits.empty() && frac.empty()) throw ParseError("no digits in rational literal", offset);
  if (seen_slash && denom.empty()) throw ParseError("missing denominator", offset);
  mpz_class num(digits.empty() ? std::string("0") : digits);
  mpz_class den(1);
  if (seen_slash) {
    den = mpz_class(denom);
    if (den == 0) throw ParseError("zero denominator", offset);
  }
  if (!frac.empty()) {
    for (char c : frac) {
      num = num * 10 + (c - '0');
      den *= 10;
    }
  }
  Rat r(num, den);
  r.canonicalize();
  if (seen_e && !expo.empty() && expo != "-") {
    long e = std::strtol(expo.c_str(), nullptr, 10);
    Rat ten(10);
    for (long k = 0; k < (e < 0 ? -e : e); ++k) {
      if (e < 0)
        r /= ten;
      else
        r *= ten;
    }
  }
  if (neg) r = -r;
  return r;
}

inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

inline RatVec rat_vec(std::initializer_list<long> xs) {
  RatVec v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

inline std::vector<double> to_double(const RatVec& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].get_d();
  return out;
}

inline RatVec to_rational(const std::vector<double>& v) {
  RatVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = rat_of_double(v[i]);
  return out;
}

/// Scales a nonzero rational vector to coprime integers, preserving direction.
inline RatVec primitive(const RatVec& v) {
  mpz_class lcm_den(1);
  for (const Rat& x : v) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), x.get_den_mpz_t());
  std::vector<mpz_class> ints;
  ints.reserve(v.size());
  mpz_class g(0);
  for (const Rat& x : v) {
    mpz_class n = x.get_num() * (lcm_den / x.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
    ints.push_back(n);
  }
  RatVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (g == 0) ? Rat(0) : Rat(ints[i] / g);
  return out;
}

inline bool is_zero(const RatVec& v) {
  for (const Rat& x : v)
    if (x != 0) return false;
  return true;
}

/// Total order used wherever deterministic output requires sorting.
inline bool lex_less(const RatVec& a, const RatVec& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    int c = cmp(a[i], b[i]);
    if (c != 0) return c < 0;
  }
  return a.size() < b.size();
}

}  // namespace discq
