#pragma once

#include <functional>
#include <vector>

namespace pvar::quad {

struct Rule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// Gauss-Legendre rule of order n, nodes by Newton iteration on P_n.
const Rule& gauss_legendre(int n);

struct Result {
    double value = 0;
    double error = 0;
    int panels = 0;
    bool converged = false;
};

struct Options {
    int order = 32;
    double rel_tol = 1e-12;
    int max_panels = 4096;
};

/// Globally adaptive bisection of [a, b]. Convergence is measured against the
/// integral of |f| so that integrands with vanishing integral still terminate.
Result adaptive(const std::function<double(double)>& f, double a, double b, const Options& opt = {});

/// Integral over [a, inf) via x = a - log(u), u in (0, 1].
Result semi_infinite(const std::function<double(double)>& f, double a, const Options& opt = {});

}  // namespace pvar::quad
