#include "stefan/special_fn.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "stefan/errors.hpp"

namespace stefan::special {
namespace {

constexpr int kMaxTerms = 100000;
constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_args(double s, double x, const char* fn) {
    if (!std::isfinite(s) || !std::isfinite(x))
        throw DomainError(std::string(fn) + ": non-finite argument");
    if (s < kMinShape)
        throw DomainError(std::string(fn) + ": shape must be >= 0.05, got " + std::to_string(s));
    if (x < 0.0)
        throw DomainError(std::string(fn) + ": argument must be non-negative");
}

// log of x^s e^{-x}
double log_prefactor(double s, double x) { return s * std::log(x) - x; }

// sum_{k>=0} x^k / (s (s+1) ... (s+k)); converges for all x, used for x <= s+1.
double series_sum(double s, double x) {
    double term = 1.0 / s;
    double sum = term;
    for (int k = 1; k < kMaxTerms; ++k) {
        term *= x / (s + k);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) return sum;
    }
    throw DomainError("lower_incomplete_gamma: series failed to converge");
}

// Modified Lentz evaluation of the continued fraction for Gamma(s,x) e^x x^{-s}; x > s+1.
double continued_fraction(double s, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxTerms; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) return h;
    }
    throw DomainError("upper_tail_gamma: continued fraction failed to converge");
}

}  // namespace

double complete_gamma(double a) {
    if (!std::isfinite(a) || a <= 0.0) throw DomainError("complete_gamma: argument must be positive and finite");
    return std::tgamma(a);
}

double lower_incomplete_gamma(double s, double x) {
    check_args(s, x, "lower_incomplete_gamma");
    if (x == 0.0) return 0.0;
    if (x <= s + 1.0) return std::exp(log_prefactor(s, x)) * series_sum(s, x);
    return complete_gamma(s) - std::exp(log_prefactor(s, x)) * continued_fraction(s, x);
}

double upper_tail_gamma(double s, double x) {
    check_args(s, x, "upper_tail_gamma");
    if (x == 0.0) return complete_gamma(s);
    if (x <= s + 1.0) return complete_gamma(s) - std::exp(log_prefactor(s, x)) * series_sum(s, x);
    return std::exp(log_prefactor(s, x)) * continued_fraction(s, x);
}

double log_upper_tail_gamma(double s, double x) {
    check_args(s, x, "log_upper_tail_gamma");
    if (x <= s + 1.0) return std::log(upper_tail_gamma(s, x));
    return log_prefactor(s, x) + std::log(continued_fraction(s, x));
}

}  // namespace stefan::special
