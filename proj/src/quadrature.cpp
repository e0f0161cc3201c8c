#include "pvar/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <queue>

namespace pvar::quad {

namespace {

Rule build(int n) {
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        double p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        double w = 2 / ((1 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = r.weights[n - 1 - i] = w;
    }
    return r;
}

struct Panel {
    double a, b, value, absval, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

}  // namespace

const Rule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, Rule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build(n)).first;
    return it->second;
}

Result adaptive(const std::function<double(double)>& f, double a, double b, const Options& opt) {
    const Rule& rule = gauss_legendre(opt.order);
    auto apply = [&](double lo, double hi, double& absval) {
        double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo), s = 0, sa = 0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            double v = f(c + h * rule.nodes[i]) * rule.weights[i];
            s += v;
            sa += std::fabs(v);
        }
        absval = sa * h;
        return s * h;
    };
    auto make = [&](double lo, double hi) {
        double aw, al, ar;
        double whole = apply(lo, hi, aw);
        double mid = 0.5 * (lo + hi);
        double l = apply(lo, mid, al), r = apply(mid, hi, ar);
        return Panel{lo, hi, l + r, al + ar, std::fabs(l + r - whole)};
    };
    std::priority_queue<Panel> heap;
    Panel first = make(a, b);
    heap.push(first);
    double total = first.value, total_abs = first.absval, total_err = first.error;
    int panels = 1;
    while (total_err > opt.rel_tol * total_abs && panels < opt.max_panels) {
        Panel p = heap.top();
        heap.pop();
        double mid = 0.5 * (p.a + p.b);
        Panel l = make(p.a, mid), r = make(mid, p.b);
        total += l.value + r.value - p.value;
        total_abs += l.absval + r.absval - p.absval;
        total_err += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
        ++panels;
    }
    Result res;
    // Re-sum to shed accumulated update error.
    res.value = 0;
    res.error = 0;
    while (!heap.empty()) {
        res.value += heap.top().value;
        res.error += heap.top().error;
        heap.pop();
    }
    (void)total;
    res.panels = panels;
    res.converged = res.error <= opt.rel_tol * std::max(total_abs, 1e-300) || res.error == 0;
    return res;
}

Result semi_infinite(const std::function<double(double)>& f, double a, const Options& opt) {
    auto g = [&](double u) {
        if (u <= 0) return 0.0;
        double x = a - std::log(u);
        return f(x) / u;
    };
    return adaptive(g, 0.0, 1.0, opt);
}

}  // namespace pvar::quad
