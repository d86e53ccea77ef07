#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <vector>

// Self-contained reference evaluator for the single-state achievable region,
// written straight from the closed-form rate constants so it shares no code
// with the library under test.
namespace hk {

struct Constants {
  double a1 = 0.0, b1 = 0.0, c1 = 0.0, d1 = 0.0;
  double a2 = 0.0, b2 = 0.0, c2 = 0.0, d2 = 0.0;
};

inline Constants compute(double snr1, double inr1, double snr2, double inr2) {
  const auto lg = [](double num, double den) { return std::log2(num / den); };
  const double r1 = inr1 / (inr1 + 1.0);
  const double r2 = inr2 / (inr2 + 1.0);
  Constants k;
  k.a1 = lg(snr1 / (inr2 + 1.0) + r1 + 1.0, r1 + 1.0);
  k.b1 = lg(snr1 / (inr2 + 1.0) + inr1 + 1.0, r1 + 1.0);
  k.c1 = lg(snr1 + r1 + 1.0, r1 + 1.0);
  k.d1 = lg(snr1 + inr1 + 1.0, r1 + 1.0);
  k.a2 = lg(snr2 / (inr1 + 1.0) + r2 + 1.0, r2 + 1.0);
  k.b2 = lg(snr2 / (inr1 + 1.0) + inr2 + 1.0, r2 + 1.0);
  k.c2 = lg(snr2 + r2 + 1.0, r2 + 1.0);
  k.d2 = lg(snr2 + inr2 + 1.0, r2 + 1.0);
  return k;
}

struct Row {
  double ca, cb, rhs;
};

inline std::vector<Row> region_rows(const Constants& k) {
  return {
      {1.0, 0.0, k.c1},
      {0.0, 1.0, k.c2},
      {1.0, 1.0, std::min({k.d1 + k.a2, k.b1 + k.b2, k.a1 + k.d2})},
      {2.0, 1.0, k.a1 + k.d1 + k.b2},
      {1.0, 2.0, k.a2 + k.d2 + k.b1},
      {-1.0, 0.0, 0.0},
      {0.0, -1.0, 0.0},
  };
}

// Support by brute-force vertex enumeration over all constraint pairs.
inline double support(const Constants& k, double a, double b) {
  const auto rows = region_rows(k);
  double best = 0.0;
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = i + 1; j < rows.size(); ++j) {
      const double det = rows[i].ca * rows[j].cb - rows[i].cb * rows[j].ca;
      if (std::fabs(det) < 1e-12) continue;
      const double x = (rows[i].rhs * rows[j].cb - rows[i].cb * rows[j].rhs) / det;
      const double y = (rows[i].ca * rows[j].rhs - rows[i].rhs * rows[j].ca) / det;
      bool feasible = true;
      for (const auto& row : rows) {
        if (row.ca * x + row.cb * y > row.rhs + 1e-9) {
          feasible = false;
          break;
        }
      }
      if (feasible) best = std::max(best, a * x + b * y);
    }
  }
  return best;
}

}  // namespace hk
