#include "pvar/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <utility>

#include "pvar/linalg.hpp"
#include "pvar/quadrature.hpp"
#include "pvar/scalar.hpp"

namespace pvar::kernels {

void SampleTable::validate() const {
    const std::size_t n = masses.size();
    if (n == 0) throw ConstraintViolation("no samples");
    if (columns.empty()) throw ConstraintViolation("no basis columns");
    for (const auto& c : columns)
        if (c.size() != n) throw ConstraintViolation("basis column length differs from sample count");
    if (target.size() != n || z.size() != n) throw ConstraintViolation("target or z length differs from sample count");
    for (double m : masses)
        if (!(m > 0) || !std::isfinite(m)) throw ConstraintViolation("masses must be positive and finite");
}

namespace {

/// Raw sums: Gram of (columns, target) plus their z moments, z^2 and total mass.
struct Sums {
    std::size_t k;
    std::vector<double> gram;   // (k+1) x (k+1), last index is the target
    std::vector<double> zmom;   // k+1
    double zz = 0, mass = 0;

    explicit Sums(std::size_t k_) : k(k_), gram((k_ + 1) * (k_ + 1), 0.0), zmom(k_ + 1, 0.0) {}

    void add(const SampleTable& t, std::size_t i, std::vector<double>& row) {
        const double m = t.masses[i];
        for (std::size_t a = 0; a < k; ++a) row[a] = t.columns[a][i];
        row[k] = t.target[i];
        for (std::size_t a = 0; a <= k; ++a) {
            const double ma = m * row[a];
            for (std::size_t b = a; b <= k; ++b) gram[a * (k + 1) + b] += ma * row[b];
            zmom[a] += ma * t.z[i];
        }
        zz += m * t.z[i] * t.z[i];
        mass += m;
    }

    void merge(const Sums& o) {
        for (std::size_t i = 0; i < gram.size(); ++i) gram[i] += o.gram[i];
        for (std::size_t i = 0; i < zmom.size(); ++i) zmom[i] += o.zmom[i];
        zz += o.zz;
        mass += o.mass;
    }
};

System finish(const Sums& s, double p) {
    if (!(s.zz > 0)) throw ConstraintViolation("E(Z^2) must be positive");
    const std::size_t k = s.k;
    auto cov = [&](std::size_t a, std::size_t b) {
        if (a > b) std::swap(a, b);
        double e = s.gram[a * (k + 1) + b] / s.mass;
        return e - p * (s.zmom[a] / s.mass) * (s.zmom[b] / s.mass) / (s.zz / s.mass);
    };
    System out;
    out.matrix.assign(k, std::vector<double>(k));
    out.rhs.resize(k);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) out.matrix[a][b] = num<double>::check(cov(a, b));
        out.rhs[a] = num<double>::check(cov(a, k));
    }
    return out;
}

void check_p(double p) {
    if (!(p >= 0 && p <= 1)) throw ConstraintViolation("p must lie in [0, 1]");
}

}  // namespace

System assemble_serial(const SampleTable& t, double p) {
    t.validate();
    check_p(p);
    Sums s(t.columns.size());
    std::vector<double> row(s.k + 1);
    for (std::size_t i = 0; i < t.samples(); ++i) s.add(t, i, row);
    return finish(s, p);
}

System assemble_parallel(const SampleTable& t, double p) {
    t.validate();
    check_p(p);
    const std::size_t k = t.columns.size();
    const long n = static_cast<long>(t.samples());
    std::vector<Sums> partial(static_cast<std::size_t>(omp_get_max_threads()), Sums(k));
#pragma omp parallel
    {
        Sums& mine = partial[static_cast<std::size_t>(omp_get_thread_num())];
        std::vector<double> row(k + 1);
#pragma omp for schedule(static)
        for (long i = 0; i < n; ++i) mine.add(t, static_cast<std::size_t>(i), row);
    }
    Sums total(k);
    for (const auto& s : partial) total.merge(s);
    return finish(total, p);
}

SampleFit fit_samples(const SampleTable& t, double p, bool parallel) {
    System sys = parallel ? assemble_parallel(t, p) : assemble_serial(t, p);
    SampleFit f;
    f.coefficients = linalg::solve_full_pivot(sys.matrix, sys.rhs);
    double mass = 0, rr = 0, rz = 0, zz = 0;
    for (std::size_t i = 0; i < t.samples(); ++i) {
        double r = t.target[i];
        for (std::size_t k = 0; k < t.columns.size(); ++k) r -= f.coefficients[k] * t.columns[k][i];
        const double m = t.masses[i];
        mass += m;
        rr += m * r * r;
        rz += m * r * t.z[i];
        zz += m * t.z[i] * t.z[i];
    }
    f.residual_ls = rr / mass;
    f.residual_var_p = std::max(0.0, f.residual_ls - p * (rz / mass) * (rz / mass) / (zz / mass));
    return f;
}

namespace {

void check_spec(const BatchSpec& spec) {
    if (!(spec.a < spec.b) || !std::isfinite(spec.a) || !std::isfinite(spec.b))
        throw ConstraintViolation("batched quadrature needs a finite interval a < b");
    if (spec.panels < 1 || spec.order < 1) throw ConstraintViolation("panels and order must be positive");
}

/// Adds the contribution of one panel to acc (size fs + 1, last entry is the mass).
void panel(const std::vector<Fn>& fs, const Fn& w, const BatchSpec& spec, const quad::Rule& rule, int j,
           std::vector<double>& acc) {
    const double h = (spec.b - spec.a) / spec.panels;
    const double lo = spec.a + j * h, half = h / 2, mid = lo + half;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double x = mid + half * rule.nodes[q];
        const double wx = rule.weights[q] * half * w(x);
        for (std::size_t k = 0; k < fs.size(); ++k) acc[k] += wx * fs[k](x);
        acc[fs.size()] += wx;
    }
}

std::vector<double> normalize(std::vector<double> acc) {
    const double mass = acc.back();
    if (!(mass > 0)) throw ConstraintViolation("weight has no positive mass");
    acc.pop_back();
    for (auto& v : acc) v = num<double>::check(v / mass);
    return acc;
}

}  // namespace

std::vector<double> batched_expect_serial(const std::vector<Fn>& fs, const Fn& w, const BatchSpec& spec) {
    check_spec(spec);
    const auto& rule = quad::gauss_legendre(spec.order);
    std::vector<double> acc(fs.size() + 1, 0.0);
    for (int j = 0; j < spec.panels; ++j) panel(fs, w, spec, rule, j, acc);
    return normalize(std::move(acc));
}

std::vector<double> batched_expect_parallel(const std::vector<Fn>& fs, const Fn& w, const BatchSpec& spec) {
    check_spec(spec);
    const auto& rule = quad::gauss_legendre(spec.order);
    std::vector<std::vector<double>> partial(static_cast<std::size_t>(omp_get_max_threads()),
                                             std::vector<double>(fs.size() + 1, 0.0));
#pragma omp parallel
    {
        auto& mine = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
        for (int j = 0; j < spec.panels; ++j) panel(fs, w, spec, rule, j, mine);
    }
    std::vector<double> acc(fs.size() + 1, 0.0);
    for (const auto& part : partial)
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += part[k];
    return normalize(std::move(acc));
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace pvar::kernels
