// Affine coefficient vectors: elements of Z/2 (+) sum_{p prime} Z, written as a
// sign bit plus a sparse prime -> exponent map.  A nonzero integer n corresponds
// to the vector with sign = [n < 0] and exponents = the factorization of |n|.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gbs {

using Int = boost::multiprecision::cpp_int;

// Sparse element of Z/2 (+) (+)_p Z.  Exponents may be negative in intermediate
// arithmetic; an element lies in the positive cone A+ iff all exponents are >= 0
// (the sign bit is unconstrained).
struct AffineVector {
  int sign = 0;                           // Z/2 coordinate, 0 or 1
  std::map<long long, long long> exps;    // prime -> exponent, zero entries elided

  bool operator==(const AffineVector&) const = default;
  auto operator<=>(const AffineVector&) const = default;

  long long exp(long long p) const {
    auto it = exps.find(p);
    return it == exps.end() ? 0 : it->second;
  }

  void set_exp(long long p, long long v) {
    if (v == 0)
      exps.erase(p);
    else
      exps[p] = v;
  }

  bool is_zero() const { return sign == 0 && exps.empty(); }
  bool is_sign_only() const { return exps.empty(); }

  // True iff every exponent is >= 0, i.e. the element lies in A+.
  bool nonneg() const {
    for (auto& [p, e] : exps)
      if (e < 0) return false;
    return true;
  }

  std::set<long long> support() const {
    std::set<long long> s;
    for (auto& [p, e] : exps)
      if (e != 0) s.insert(p);
    return s;
  }

  AffineVector& operator+=(const AffineVector& o) {
    sign = (sign + o.sign) & 1;
    for (auto& [p, e] : o.exps) set_exp(p, exp(p) + e);
    return *this;
  }
  AffineVector& operator-=(const AffineVector& o) {
    sign = (sign + o.sign) & 1;
    for (auto& [p, e] : o.exps) set_exp(p, exp(p) - e);
    return *this;
  }
  friend AffineVector operator+(AffineVector a, const AffineVector& b) { return a += b; }
  friend AffineVector operator-(AffineVector a, const AffineVector& b) { return a -= b; }

  friend AffineVector operator*(long long k, const AffineVector& v) {
    AffineVector r;
    r.sign = static_cast<int>(((k % 2) * v.sign) & 1);
    if (r.sign < 0) r.sign += 2;
    for (auto& [p, e] : v.exps) r.set_exp(p, k * e);
    return r;
  }
};

// The pure-sign element t = (1; 0, 0, ...), i.e. the vector of -1.
inline AffineVector sign_element() {
  AffineVector t;
  t.sign = 1;
  return t;
}

inline bool is_prime(long long n) {
  if (n < 2) return false;
  for (long long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline long long next_prime(long long n) {
  long long p = n + 1;
  while (!is_prime(p)) ++p;
  return p;
}

// Factor a nonzero integer into an affine vector.  Throws on zero.
inline AffineVector factorize(Int n) {
  if (n == 0) throw std::invalid_argument("factorize: zero has no factorization");
  AffineVector v;
  if (n < 0) {
    v.sign = 1;
    n = -n;
  }
  for (long long d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
    while (n % d == 0) {
      v.exps[d]++;
      n /= d;
    }
  }
  if (n > 1) {
    // Remaining cofactor is prime (no divisor up to its square root).
    if (n > std::numeric_limits<long long>::max())
      throw std::invalid_argument("factorize: prime factor out of range");
    v.exps[n.convert_to<long long>()]++;
  }
  return v;
}

// Materialize the integer (-1)^sign * prod p^e.  Exponents must be >= 0.
inline Int vector_to_int(const AffineVector& v) {
  Int n = 1;
  for (auto& [p, e] : v.exps) {
    if (e < 0) throw std::invalid_argument("vector_to_int: negative exponent");
    for (long long i = 0; i < e; ++i) n *= p;
  }
  return v.sign ? -n : n;
}

// a,w controls b: b - a >= 0 componentwise and supp(b - a) included in supp(w).
// Sign coordinates are ignored, matching the definition of the control relation.
inline bool controls(const AffineVector& a, const AffineVector& w, const AffineVector& b) {
  AffineVector d = b - a;
  if (!d.nonneg()) return false;
  for (auto& [p, e] : d.exps)
    if (e != 0 && w.exp(p) == 0) return false;
  return true;
}

inline std::string to_string(const AffineVector& v) {
  std::ostringstream os;
  os << (v.sign ? "-" : "+") << "{";
  bool first = true;
  for (auto& [p, e] : v.exps) {
    if (!first) os << ",";
    os << p << ":" << e;
    first = false;
  }
  os << "}";
  return os.str();
}

}  // namespace gbs
