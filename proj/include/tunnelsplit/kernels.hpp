// Regime-free analytic kernels in the signed variable y = w*d^2, w = 2m(V0-E)/hbar^2.
//
// Writing everything in terms of
//   L(y) = sinh(sqrt(y))/sqrt(y)      (y>0)  |  sin(sqrt(-y))/sqrt(-y)   (y<0)
//   C(y) = cosh(sqrt(y))              (y>0)  |  cos(sqrt(-y))            (y<0)
// and the difference quotients Lm1 = (L-1)/y, CmL = (C-L)/y removes every
// under/over-barrier case split and every kappa->0 cancellation: all four are
// entire functions of y, evaluated by their Taylor series near y = 0.
#ifndef TUNNELSPLIT_KERNELS_HPP
#define TUNNELSPLIT_KERNELS_HPP

#include <cmath>

namespace tunnelsplit {
namespace kernels {

inline constexpr double series_cut = 1e-2;  // |y| below this: Taylor series

// L(y): series sum_{n>=0} y^n/(2n+1)!
inline double L(double y) {
    if (std::abs(y) < series_cut) {
        return 1.0 + y / 6.0 * (1.0 + y / 20.0 * (1.0 + y / 42.0 * (1.0 + y / 72.0)));
    }
    if (y > 0.0) {
        const double x = std::sqrt(y);
        return std::sinh(x) / x;
    }
    const double x = std::sqrt(-y);
    return std::sin(x) / x;
}

// C(y): series sum_{n>=0} y^n/(2n)!
inline double C(double y) {
    if (std::abs(y) < series_cut) {
        return 1.0 + y / 2.0 * (1.0 + y / 12.0 * (1.0 + y / 30.0 * (1.0 + y / 56.0)));
    }
    if (y > 0.0) return std::cosh(std::sqrt(y));
    return std::cos(std::sqrt(-y));
}

// Lm1(y) = (L(y)-1)/y = sum_{n>=1} y^{n-1}/(2n+1)!; equals (sinh x - x)/x^3.
inline double Lm1(double y) {
    if (std::abs(y) < series_cut) {
        return (1.0 + y / 20.0 * (1.0 + y / 42.0 * (1.0 + y / 72.0))) / 6.0;
    }
    return (L(y) - 1.0) / y;
}

// CmL(y) = (C(y)-L(y))/y = sum_{n>=1} y^{n-1} * 2n/(2n+1)!
inline double CmL(double y) {
    if (std::abs(y) < series_cut) {
        return 1.0 / 3.0 + y * (1.0 / 30.0 + y * (1.0 / 840.0 + y / 45360.0));
    }
    return (C(y) - L(y)) / y;
}

}  // namespace kernels
}  // namespace tunnelsplit

#endif  // TUNNELSPLIT_KERNELS_HPP
