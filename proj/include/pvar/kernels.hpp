#pragma once

#include <functional>
#include <vector>

namespace pvar::kernels {

/// Float samples for the discrete p-covariance system.
/// columns[k][i] is basis element k at sample i.
struct SampleTable {
    std::vector<double> masses;
    std::vector<std::vector<double>> columns;
    std::vector<double> target;
    std::vector<double> z;

    std::size_t samples() const { return masses.size(); }
    void validate() const;
};

struct System {
    std::vector<std::vector<double>> matrix;   // cov_p(X_i, X_j)
    std::vector<double> rhs;                   // cov_p(X_i, Y)
};

/// Plain loop over samples; the reference for the parallel kernel.
System assemble_serial(const SampleTable& t, double p);

/// Per-thread partial sums over sample blocks, combined in thread order.
System assemble_parallel(const SampleTable& t, double p);

struct SampleFit {
    std::vector<double> coefficients;
    double residual_var_p = 0;
    double residual_ls = 0;
};

/// Least p-variance fit over the samples; the parallel flag picks the kernel.
SampleFit fit_samples(const SampleTable& t, double p, bool parallel = true);

using Fn = std::function<double(double)>;

struct BatchSpec {
    double a = 0, b = 1;
    int panels = 64;
    int order = 32;
};

/// E_w[f_k] for every k by composite Gauss-Legendre on equal panels.
std::vector<double> batched_expect_serial(const std::vector<Fn>& fs, const Fn& w, const BatchSpec& spec);
std::vector<double> batched_expect_parallel(const std::vector<Fn>& fs, const Fn& w, const BatchSpec& spec);

/// Number of threads the parallel kernels would use.
int max_threads();

}  // namespace pvar::kernels
