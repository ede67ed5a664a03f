// Subgroups of Z/2 (+) Z^I for a finite prime set I, represented by a unique
// Hermite-style echelon form.  The Z/2 sign coordinate is handled by embedding
// into Z^{1+|I|} and adjoining the torsion relation row 2*e0, so one canonical
// form covers membership, equality and coset questions.
#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "gbs/affine.hpp"

namespace gbs {

class LatticeSubgroup {
 public:
  using Row = std::vector<Int>;

  LatticeSubgroup() = default;

  const std::vector<long long>& primes() const { return primes_; }
  const std::vector<Row>& rows() const { return rows_; }

  static LatticeSubgroup span(const std::vector<AffineVector>& gens,
                              const std::set<long long>& I) {
    LatticeSubgroup H;
    H.primes_.assign(I.begin(), I.end());
    std::vector<Row> m;
    for (const AffineVector& v : gens) {
      for (auto& [p, e] : v.exps)
        if (e != 0 && !I.count(p))
          throw std::invalid_argument("span: generator support outside index set");
      m.push_back(H.to_row(v));
    }
    Row torsion(H.primes_.size() + 1, 0);
    torsion[0] = 2;
    m.push_back(torsion);
    H.rows_ = hermite(std::move(m));
    return H;
  }

  bool member(const AffineVector& v) const { return reduce(v).has_value(); }

  // Coefficients over rows() witnessing membership, in row order.
  std::optional<std::vector<Int>> member_witness(const AffineVector& v) const {
    return reduce(v);
  }

  bool operator==(const LatticeSubgroup&) const = default;

  // Same subgroup over the union prime set.
  friend bool equal(const LatticeSubgroup& a, const LatticeSubgroup& b) {
    std::set<long long> I(a.primes_.begin(), a.primes_.end());
    I.insert(b.primes_.begin(), b.primes_.end());
    return a.reindexed(I).rows_ == b.reindexed(I).rows_;
  }

  bool coset_eq(const AffineVector& v1, const AffineVector& v2) const {
    return member(v1 - v2);
  }

  // Generators of the canonical form, as affine vectors (sign from parity of
  // the first coordinate).
  std::vector<AffineVector> generators() const {
    std::vector<AffineVector> gs;
    for (const Row& r : rows_) gs.push_back(from_row(r));
    return gs;
  }

  std::string serialize() const {
    std::ostringstream os;
    os << "primes";
    for (long long p : primes_) os << " " << p;
    os << "\n";
    for (const Row& r : rows_) {
      os << "row";
      for (const Int& x : r) os << " " << x;
      os << "\n";
    }
    return os.str();
  }

  LatticeSubgroup reindexed(const std::set<long long>& I) const {
    std::vector<AffineVector> gs = generators();
    return span(gs, I);
  }

 private:
  std::vector<long long> primes_;
  std::vector<Row> rows_;  // echelon form, pivot columns strictly increasing

  Row to_row(const AffineVector& v) const {
    Row r(primes_.size() + 1, 0);
    r[0] = v.sign;
    for (size_t i = 0; i < primes_.size(); ++i) r[1 + i] = v.exp(primes_[i]);
    return r;
  }

  AffineVector from_row(const Row& r) const {
    AffineVector v;
    if (r[0] % 2 != 0) v.sign = 1;
    for (size_t i = 0; i < primes_.size(); ++i) {
      if (r[1 + i] > std::numeric_limits<long long>::max() || r[1 + i] < std::numeric_limits<long long>::min())
        throw std::runtime_error("lattice row entry out of range");
      v.set_exp(primes_[i], r[1 + i].convert_to<long long>());
    }
    // The sign row contribution beyond parity is torsion: exponents carry the
    // actual values, and r[0] only matters mod 2.
    return v;
  }

  static Int floor_div(const Int& a, const Int& b) {
    Int q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
  }

  static std::vector<Row> hermite(std::vector<Row> m) {
    if (m.empty()) return m;
    size_t cols = m[0].size();
    size_t r = 0;
    for (size_t c = 0; c < cols && r < m.size(); ++c) {
      // Eliminate below row r in column c by gcd steps.
      while (true) {
        size_t best = m.size();
        for (size_t i = r; i < m.size(); ++i)
          if (m[i][c] != 0 && (best == m.size() || abs(m[i][c]) < abs(m[best][c]))) best = i;
        if (best == m.size()) break;
        std::swap(m[r], m[best]);
        bool done = true;
        for (size_t i = r + 1; i < m.size(); ++i) {
          if (m[i][c] == 0) continue;
          Int q = m[i][c] / m[r][c];
          for (size_t j = 0; j < cols; ++j) m[i][j] -= q * m[r][j];
          if (m[i][c] != 0) done = false;
        }
        if (done) break;
      }
      if (r < m.size() && m[r][c] != 0) {
        if (m[r][c] < 0)
          for (size_t j = 0; j < cols; ++j) m[r][j] = -m[r][j];
        for (size_t i = 0; i < r; ++i) {
          Int q = floor_div(m[i][c], m[r][c]);
          if (q != 0)
            for (size_t j = 0; j < cols; ++j) m[i][j] -= q * m[r][j];
        }
        ++r;
      }
    }
    m.resize(r);
    return m;
  }

  std::optional<std::vector<Int>> reduce(const AffineVector& v) const {
    for (auto& [p, e] : v.exps)
      if (e != 0 && !std::binary_search(primes_.begin(), primes_.end(), p)) return std::nullopt;
    Row x = to_row(v);
    std::vector<Int> coeffs(rows_.size(), 0);
    for (size_t i = 0; i < rows_.size(); ++i) {
      size_t c = 0;
      while (c < rows_[i].size() && rows_[i][c] == 0) ++c;
      if (c == rows_[i].size()) continue;
      if (x[c] == 0) continue;
      if (x[c] % rows_[i][c] != 0) {
        // The sign column is only meaningful mod 2; any even residual there is
        // absorbed by the torsion relation, which the echelon form contains,
        // so exact division is the right test for every pivot.
        return std::nullopt;
      }
      Int q = x[c] / rows_[i][c];
      coeffs[i] = q;
      for (size_t j = 0; j < x.size(); ++j) x[j] -= q * rows_[i][j];
    }
    for (const Int& e : x)
      if (e != 0) return std::nullopt;
    return coeffs;
  }
};

// Exists u with supp(u) in L_support (sign free iff include_sign) such that
// every d_i - u lies in H: all pairwise differences in H and d_0 in H + L.
inline bool coset_translate_exists(const LatticeSubgroup& H, const std::vector<AffineVector>& diffs,
                                   const std::set<long long>& L_support, bool include_sign) {
  if (diffs.empty()) return true;
  for (size_t i = 1; i < diffs.size(); ++i)
    if (!H.member(diffs[i] - diffs[0])) return false;
  std::set<long long> I(H.primes().begin(), H.primes().end());
  I.insert(L_support.begin(), L_support.end());
  for (auto& [p, e] : diffs[0].exps) I.insert(p);
  std::vector<AffineVector> gens = H.generators();
  for (long long p : L_support) {
    AffineVector u;
    u.set_exp(p, 1);
    gens.push_back(u);
  }
  if (include_sign) gens.push_back(sign_element());
  return LatticeSubgroup::span(gens, I).member(diffs[0]);
}

}  // namespace gbs
