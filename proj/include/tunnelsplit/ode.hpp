// Adaptive Dormand-Prince RK5(4) for small fixed-size real systems.
#ifndef TUNNELSPLIT_ODE_HPP
#define TUNNELSPLIT_ODE_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tunnelsplit {

/*! \brief Settings for the stationary-equation integrator. */
struct OdeSettings {
    double rel_tol = 1e-10;  ///< relative tolerance per step
    double abs_tol = 1e-12;  ///< absolute tolerance per step
    double h_init = 1e-3;    ///< initial trial step
    std::size_t max_steps = 2000000;
};

/*! \brief Integrate y' = f(x, y) from x0 to x1 (x1 >= x0), Dormand-Prince 5(4).
 *
 * N is the (compile-time) system size.  The error estimate uses the embedded
 * 4th-order solution; standard 0.9 safety factor with exponent 1/5.
 * Throws std::runtime_error with the failure position if the step size
 * underflows or the step budget is exhausted.
 */
template <std::size_t N, class F>
void dopri5(F&& f, double x0, double x1, std::array<double, N>& y,
            const OdeSettings& s = {}) {
    // Dormand-Prince coefficients
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                            c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // difference (5th - 4th order) weights, for the error estimate
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                            e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    if (x1 == x0) return;
    if (x1 < x0) throw std::invalid_argument("dopri5: backward span");

    double x = x0;
    double h = std::min(s.h_init, x1 - x0);
    std::array<double, N> k1, k2, k3, k4, k5, k6, k7, yt, y5;
    f(x, y, k1);  // FSAL: k1 reused from the last accepted step
    for (std::size_t step = 0; step < s.max_steps; ++step) {
        if (x >= x1) return;
        if (x + h > x1) h = x1 - x;

        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * a21 * k1[i];
        f(x + c2 * h, yt, k2);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(x + c3 * h, yt, k3);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(x + c4 * h, yt, k4);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                                a54 * k4[i]);
        f(x + c5 * h, yt, k5);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                a64 * k4[i] + a65 * k5[i]);
        f(x + h, yt, k6);
        for (std::size_t i = 0; i < N; ++i)
            y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                b5 * k5[i] + b6 * k6[i]);
        f(x + h, y5, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                   e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc =
                s.abs_tol + s.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            const double r = ei / sc;
            err += r * r;
        }
        err = std::sqrt(err / static_cast<double>(N));

        if (err <= 1.0) {  // accept
            x += h;
            y = y5;
            k1 = k7;
            if (x >= x1) return;  // done; skip the growth/underflow bookkeeping
        }
        const double fac =
            std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-16), -0.2)));
        h *= fac;
        if (!(h > 1e-14 * std::max(1.0, std::abs(x))))
            throw std::runtime_error("dopri5: step underflow at x = " +
                                     std::to_string(x));
    }
    throw std::runtime_error("dopri5: step budget exhausted at x = " +
                             std::to_string(x));
}

}  // namespace tunnelsplit

#endif  // TUNNELSPLIT_ODE_HPP
