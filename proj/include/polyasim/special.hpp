#pragma once

#include <functional>

namespace polyasim {

// x (x+1) ... (x+k-1); k = 0 gives the empty product 1.
double rising_factorial(double x, long long k);
double log_rising_factorial(double x, long long k);

// Regularized incomplete gamma P(a,x) and its complement Q(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Regularized incomplete beta I_x(a,b).
double beta_inc(double a, double b, double x);

double normal_cdf(double x);

// Upper tail of the chi-square distribution with dof degrees of freedom.
double chi2_sf(double x, double dof);

// Kolmogorov limiting survival function Q_KS(x) = 2 sum (-1)^{k-1} e^{-2 k^2 x^2}.
double kolmogorov_sf(double x);

// Adaptive Simpson quadrature on [a,b] to absolute tolerance tol.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10, int max_depth = 50);

} // namespace polyasim
