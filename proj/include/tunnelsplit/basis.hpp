// Odd/even interior basis u, v of the stationary equation on [x_c, b],
// normalized u(0)=0, u'(0)=1, v(0)=1, v'(0)=0 so the Wronskian u'v - v'u = 1.
#ifndef TUNNELSPLIT_BASIS_HPP
#define TUNNELSPLIT_BASIS_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "barrier.hpp"
#include "kernels.hpp"
#include "ode.hpp"

namespace tunnelsplit {

struct BasisPoint {
    double u = 0.0;   ///< odd solution
    double up = 1.0;  ///< u'
    double v = 1.0;   ///< even solution
    double vp = 0.0;  ///< v'
};

/*! \brief Analytic basis for a constant interior w = 2m(Veff-E)/hbar^2.
 *
 * In y = w xi^2:  u = xi L(y), u' = C(y), v = C(y), v' = w xi L(y); entire in
 * w, so the degenerate E = Veff case needs no special handling.
 */
inline BasisPoint rect_basis(double w, double xi) {
    const double y = w * xi * xi;
    const double Ly = kernels::L(y);
    const double Cy = kernels::C(y);
    return {xi * Ly, Cy, Cy, w * xi * Ly};
}

/*! \brief ODE basis samples at ascending nodes xi in [0, d/2].
 *
 * One continuation pass: the integrator runs node to node, so an n-point
 * request costs a single traversal of the interval.  Works for any barrier
 * kind (rectangular included, used as an oracle cross-check in the tests).
 */
inline std::vector<BasisPoint> ode_basis(const Barrier& bar, double E,
                                         const Units& units,
                                         const std::vector<double>& nodes,
                                         const OdeSettings& settings = {}) {
    const double pref = 2.0 * units.mass / (units.hbar * units.hbar);
    auto rhs = [&](double xi, const std::array<double, 4>& y,
                   std::array<double, 4>& dy) {
        const double w = pref * (bar.profile(xi) - E);
        dy[0] = y[1];
        dy[1] = w * y[0];
        dy[2] = y[3];
        dy[3] = w * y[2];
    };
    std::array<double, 4> y{0.0, 1.0, 1.0, 0.0};
    std::vector<BasisPoint> out;
    out.reserve(nodes.size());
    double x = 0.0;
    for (double xi : nodes) {
        if (xi < x)
            throw std::invalid_argument("ode_basis: nodes must be ascending");
        if (xi > x) {
            dopri5<4>(rhs, x, xi, y, settings);
            x = xi;
        }
        // The matching algebra (splitting identities, flux constancy) leans
        // on the Wronskian u'v - uv' = 1 *exactly*; the integrator lets it
        // drift by O(tol * steps).  Enforce the invariant on the reported
        // pair by rescaling the even solution with the local Wronskian.
        const double W = y[1] * y[2] - y[0] * y[3];
        if (!(W > 0.5 && W < 2.0))
            throw std::runtime_error("ode_basis: Wronskian drifted to " +
                                     std::to_string(W) + ", integration failed");
        out.push_back({y[0], y[1], y[2] / W, y[3] / W});
    }
    return out;
}

/*! \brief Basis at the right barrier edge xi = d/2 (what the matching needs). */
inline BasisPoint basis_at_edge(const Barrier& bar, double k, const Units& units,
                                const OdeSettings& settings = {}) {
    const double h = 0.5 * bar.d();
    if (bar.uniform_interior()) return rect_basis(w_of(bar, k, units), h);
    const double E = energy_of(k, units);
    return ode_basis(bar, E, units, {h}, settings)[0];
}

/*! \brief Basis at many interior offsets |xi| (callers apply odd/even parity
 * for xi < 0 themselves).  Rectangular barriers use the analytic branch. */
inline std::vector<BasisPoint> basis_on_nodes(const Barrier& bar, double k,
                                              const Units& units,
                                              const std::vector<double>& nodes,
                                              const OdeSettings& settings = {}) {
    if (bar.uniform_interior()) {
        const double w = w_of(bar, k, units);
        std::vector<BasisPoint> out;
        out.reserve(nodes.size());
        for (double xi : nodes) out.push_back(rect_basis(w, xi));
        return out;
    }
    return ode_basis(bar, energy_of(k, units), units, nodes, settings);
}

}  // namespace tunnelsplit

#endif  // TUNNELSPLIT_BASIS_HPP
