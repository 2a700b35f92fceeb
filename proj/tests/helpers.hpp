#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

// Test-side numerical oracles, independent of the library's solution paths:
// bisection, Simpson quadrature, RK4 time stepping, central differences.
namespace testutil {

inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14,
                     int max_iter = 200) {
    double flo = f(lo);
    for (int it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if (std::abs(fmid) <= tol || hi - lo < tol) return mid;
        if ((flo < 0.0) == (fmid < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    if (panels % 2 != 0) ++panels;
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int k = 1; k < panels; ++k) acc += f(a + k * h) * (k % 2 == 0 ? 2.0 : 4.0);
    return acc * h / 3.0;
}

struct State2 {
    double y = 0.0;
    double v = 0.0;
};

/// One RK4 step for y'' = accel(t, y).
inline State2 rk4_step(const std::function<double(double, double)>& accel, double t, State2 s, double h) {
    auto f = [&](double tt, State2 ss) { return State2{ss.v, accel(tt, ss.y)}; };
    const State2 k1 = f(t, s);
    const State2 k2 = f(t + h / 2, {s.y + h / 2 * k1.y, s.v + h / 2 * k1.v});
    const State2 k3 = f(t + h / 2, {s.y + h / 2 * k2.y, s.v + h / 2 * k2.v});
    const State2 k4 = f(t + h, {s.y + h * k3.y, s.v + h * k3.v});
    return {s.y + h / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y),
            s.v + h / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v)};
}

/// Central-difference gradient of a scalar function of a vector.
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& value,
                                       std::vector<double> x, double step = 1e-6) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double saved = x[i];
        x[i] = saved + step;
        const double fp = value(x);
        x[i] = saved - step;
        const double fm = value(x);
        x[i] = saved;
        g[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}

/// Dense symmetric solve (Gauss elimination with partial pivoting), reference
/// for the tridiagonal solvers.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

}  // namespace testutil
