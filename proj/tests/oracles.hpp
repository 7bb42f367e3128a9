#pragma once
#include <cmath>

// Independent oracles used to pin expected test values. These deliberately
// avoid the library's own computation paths.

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

namespace oracles {

// valuation by trial division on plain integers
inline int valuation_by_factorization(long long v, long long p) {
  if (v == 0) return -1;  // infinite
  int k = 0;
  while (v % p == 0) {
    v /= p;
    ++k;
  }
  return k;
}

// chi-square critical values at the 1% level, indexed by degrees of freedom
inline double chi2_crit_1pct(int dof) {
  static const std::map<int, double> table = {
      {1, 6.6349}, {3, 11.3449}, {5, 15.0863}, {7, 18.4753}, {9, 21.6660}, {26, 45.6417}, {124, 163.546}, {15, 30.5779}, {23, 41.6384}, {24, 42.9798}, {63, 92.0100},
  };
  return table.at(dof);
}

// asymptotic Kolmogorov-Smirnov critical value at the 1% level
inline double ks_crit_1pct(long n) { return 1.628 / std::sqrt(double(n)); }

// exact word lengths by breadth-style dynamic programming over products of
// exactly k generators (identity has length 0)
inline std::vector<int> word_lengths(int order, const std::vector<std::vector<int>>& mul,
                                     const std::vector<int>& gens, int identity) {
  std::vector<int> len(order, -1);
  len[identity] = 0;
  std::vector<char> cur(order, 0);
  cur[identity] = 1;
  for (int k = 1; k <= order * 2 + 2; ++k) {
    std::vector<char> next(order, 0);
    bool any = false;
    for (int x = 0; x < order; ++x) {
      if (!cur[x]) continue;
      for (int g : gens) {
        int y = mul[x][g];
        next[y] = 1;
        if (len[y] < 0) {
          len[y] = k;
          any = true;
        }
      }
    }
    cur = std::move(next);
    if (!any && k > order) break;
  }
  return len;
}

}  // namespace oracles
