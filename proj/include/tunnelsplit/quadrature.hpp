// Gauss-Legendre nodes/weights and composite Simpson rules used across the library.
#ifndef TUNNELSPLIT_QUADRATURE_HPP
#define TUNNELSPLIT_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace tunnelsplit {

/*! \brief Gauss-Legendre quadrature rule on [lo, hi].
 *
 * Nodes are roots of P_n found by Newton iteration from the Chebyshev-like
 * initial guess; converges to machine precision in a handful of steps.
 */
struct GaussLegendre {
    std::vector<double> x;  ///< nodes, ascending
    std::vector<double> w;  ///< weights, all positive

    GaussLegendre(std::size_t n, double lo, double hi) : x(n), w(n) {
        if (n < 2) throw std::invalid_argument("GaussLegendre: need n >= 2");
        if (!(hi > lo)) throw std::invalid_argument("GaussLegendre: need hi > lo");
        const double xm = 0.5 * (hi + lo);
        const double xl = 0.5 * (hi - lo);
        const std::size_t m = (n + 1) / 2;
        for (std::size_t i = 0; i < m; ++i) {
            // initial guess for the i-th root (descending in z)
            double z = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(n) + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                // Legendre recurrence for P_n(z) and P'_n(z)
                double p1 = 1.0, p2 = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j + 1.0) * z * p2 - static_cast<double>(j) * p3) /
                         (static_cast<double>(j) + 1.0);
                }
                pp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
                const double dz = p1 / pp;
                z -= dz;
                if (std::abs(dz) < 1e-15) break;
            }
            x[i] = xm - xl * z;
            x[n - 1 - i] = xm + xl * z;
            w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
            w[n - 1 - i] = w[i];
        }
    }
};

/*! \brief Composite Simpson weights for n intervals (n even), step h.
 * Returns n+1 weights summing to n*h. */
inline std::vector<double> simpson_weights(std::size_t n, double h) {
    if (n < 2 || (n % 2) != 0)
        throw std::invalid_argument("simpson_weights: n must be even and >= 2");
    std::vector<double> w(n + 1, h / 3.0);
    for (std::size_t i = 1; i < n; ++i) w[i] = ((i % 2) ? 4.0 : 2.0) * h / 3.0;
    return w;
}

/*! \brief Simpson integral of f over [lo, hi] with n intervals (made even). */
template <class F>
double simpson(F&& f, double lo, double hi, std::size_t n) {
    if (n % 2) ++n;
    const double h = (hi - lo) / static_cast<double>(n);
    double s = f(lo) + f(hi);
    for (std::size_t i = 1; i < n; ++i)
        s += ((i % 2) ? 4.0 : 2.0) * f(lo + h * static_cast<double>(i));
    return s * h / 3.0;
}

/*! \brief Simpson over a piecewise-uniform grid given sampled values.
 *
 * The grid must be a union of uniform runs, each with an even interval
 * count (as produced by the packet grid builders); runs are detected from
 * the spacing so segment boundaries need not be passed separately. */
inline double simpson_on_grid(const std::vector<double>& x,
                              const std::vector<double>& f) {
    if (x.size() != f.size() || x.size() < 3)
        throw std::invalid_argument("simpson_on_grid: need >= 3 matching samples");
    double acc = 0.0;
    std::size_t i = 0;
    const double tol = 1e-9;
    while (i + 1 < x.size()) {
        const double h = x[i + 1] - x[i];
        std::size_t j = i + 1;
        while (j + 1 < x.size() &&
               std::abs((x[j + 1] - x[j]) - h) <= tol * std::max(1.0, std::abs(h)))
            ++j;
        std::size_t n = j - i;  // intervals in this uniform run
        if (n % 2) --n;         // defensive; builders always emit even counts
        if (n == 0) break;
        double s = f[i] + f[i + n];
        for (std::size_t m = 1; m < n; ++m)
            s += ((m % 2) ? 4.0 : 2.0) * f[i + m];
        acc += s * h / 3.0;
        i += n;
    }
    return acc;
}

/*! \brief Simpson with doubling until two successive estimates agree to
 * rel_tol (relative to scale, or to the estimate itself if scale == 0). */
template <class F>
double simpson_adaptive(F&& f, double lo, double hi, double rel_tol,
                        std::size_t n0 = 64, std::size_t n_max = (1u << 20),
                        double scale = 0.0) {
    double prev = simpson(f, lo, hi, n0);
    for (std::size_t n = n0 * 2; n <= n_max; n *= 2) {
        const double cur = simpson(f, lo, hi, n);
        const double ref = (scale != 0.0) ? std::abs(scale)
                                          : std::max(std::abs(cur), 1e-300);
        if (std::abs(cur - prev) <= rel_tol * ref) return cur;
        prev = cur;
    }
    return prev;  // best effort; callers check against oracles anyway
}

}  // namespace tunnelsplit

#endif  // TUNNELSPLIT_QUADRATURE_HPP
