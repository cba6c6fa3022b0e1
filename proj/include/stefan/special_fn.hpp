#pragma once

// Complete and incomplete gamma functions.
//
// Shapes are restricted to s >= 0.05; every shape that appears in the
// similarity bounds ((1-nu)/2 and (3-nu-mu)/xi) stays above that for the
// admissible parameter window.

namespace stefan::special {

inline constexpr double kMinShape = 0.05;

/// Lower incomplete gamma  gamma(s,x) = int_0^x t^{s-1} e^{-t} dt.
double lower_incomplete_gamma(double s, double x);

/// Gamma(a) for a > 0.
double complete_gamma(double a);

/// Upper tail Gamma(s) - gamma(s,x), evaluated without cancellation for x > s+1.
double upper_tail_gamma(double s, double x);

/// log(Gamma(s) - gamma(s,x)); finite even where the tail underflows.
double log_upper_tail_gamma(double s, double x);

}  // namespace stefan::special
