#include "cavread/clebsch_gordan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "cavread/errors.hpp"

namespace cavread {

namespace {

double factorial(int n) { return std::tgamma(static_cast<double>(n) + 1.0); }

}  // namespace

double clebsch_gordan(int j1, int m1, int j2, int m2, int J, int M) {
  if (j1 < 0 || j2 < 0 || J < 0) throw DomainError("clebsch_gordan: angular momenta must be >= 0");
  if (M != m1 + m2) return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(M) > J) return 0.0;
  if (J < std::abs(j1 - j2) || J > j1 + j2) return 0.0;

  // Racah's closed form.
  const double prefactor =
      std::sqrt((2.0 * J + 1.0) * factorial(J + j1 - j2) * factorial(J - j1 + j2) * factorial(j1 + j2 - J) /
                factorial(j1 + j2 + J + 1)) *
      std::sqrt(factorial(J + M) * factorial(J - M) * factorial(j1 - m1) * factorial(j1 + m1) *
                factorial(j2 - m2) * factorial(j2 + m2));
  const int k_min = std::max({0, j2 - J - m1, j1 + m2 - J});
  const int k_max = std::min({j1 + j2 - J, j1 - m1, j2 + m2});
  double sum = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    const double term = factorial(k) * factorial(j1 + j2 - J - k) * factorial(j1 - m1 - k) *
                        factorial(j2 + m2 - k) * factorial(J - j2 + m1 + k) * factorial(J - j1 - m2 + k);
    sum += (k % 2 == 0 ? 1.0 : -1.0) / term;
  }
  return prefactor * sum;
}

double cg_coefficient(int F, int mF, int q, int Fp, int mFp) {
  if (std::abs(q) > 1) throw DomainError("cg_coefficient: q must be -1, 0 or +1");
  return clebsch_gordan(F, mF, 1, q, Fp, mFp);
}

}  // namespace cavread
