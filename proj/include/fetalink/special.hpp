#pragma once

// Survival functions needed for p-values. Target accuracy <= 1e-10 absolute.

namespace fetalink {

/// P(Z > x) for standard normal Z, via the complementary error function.
double normal_sf(double x);

/// P(X > x) for chi-square with 1 df: sf(x) = erfc(sqrt(x/2)).
double chisq1_sf(double x);

/// P(T > x) for Student t with df degrees of freedom (df > 0, real).
double student_t_sf(double x, double df);

/// Regularized incomplete beta function I_x(a, b), continued-fraction
/// evaluation (Lentz). Domain: a, b > 0, x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

}  // namespace fetalink
