// Boundary matching at fixed k, the incoming-wave split, and the piecewise
// transmission/reflection wave functions with their fluxes.
#ifndef TUNNELSPLIT_STATIONARY_HPP
#define TUNNELSPLIT_STATIONARY_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "barrier.hpp"
#include "basis.hpp"

namespace tunnelsplit {

using cplx = std::complex<double>;

enum class Kind { full, tr, ref };

/*! \brief Complex matching data at one wavenumber.
 *
 * Conventions (these fix every phase in the library):
 *   x <= a : e^{ikx} + b_out e^{-ik(x-2a)}        (reflected wave referenced
 *                                                  to the left edge)
 *   x >= b : a_out e^{ik(x-d)}
 *   inside : alpha u(xi) + beta v(xi), xi = x-x_c, basis normalized W = 1.
 * With Q = u'(h)+iku(h), P = v'(h)+ikv(h) at h = d/2:
 *   a_out = (Q/Q* - P/P*)/2,  b_out = -(Q/Q* + P/P*)/2,
 * which makes Re(a_out* b_out) = 0 exactly, so the incoming-split identities
 * |A_tr|^2 = T, |A_ref|^2 = R, arg A_ref - arg A_tr = +-pi/2 are exact.
 */
struct Amplitudes {
    cplx Q, P;          ///< edge combinations of the odd/even basis
    cplx a_out, b_out;  ///< outgoing transmitted / reflected amplitudes
    cplx A_tr, A_ref;   ///< incoming-wave split, A_tr + A_ref = 1
    cplx alpha, beta;   ///< interior coefficients of psi_full (odd/even)
    cplx a_tr_l;        ///< odd interior coefficient of psi_tr left of x_c
    cplx c_ref;         ///< odd interior coefficient of psi_ref (pure odd)
};

inline Amplitudes match_amplitudes(const BasisPoint& e, double k, double a,
                                   double /*d*/) {
    const cplx I(0.0, 1.0);
    Amplitudes m;
    m.Q = cplx(e.up, k * e.u);
    m.P = cplx(e.vp, k * e.v);
    if (std::abs(m.Q) < 1e-300 || std::abs(m.P) < 1e-300)
        throw std::runtime_error("match_amplitudes: singular matching (|Q| or |P| ~ 0)");
    const cplx q = m.Q / std::conj(m.Q);
    const cplx p = m.P / std::conj(m.P);
    m.a_out = 0.5 * (q - p);
    m.b_out = -0.5 * (q + p);
    m.A_tr = std::conj(m.a_out) * (m.a_out + m.b_out);
    m.A_ref = m.b_out * (std::conj(m.b_out) - std::conj(m.a_out));
    const cplx eika = std::exp(I * k * a);
    m.alpha = I * k * eika / std::conj(m.Q);
    m.beta = -I * k * eika / std::conj(m.P);
    m.a_tr_l = m.P * m.A_tr * eika;
    m.c_ref = (m.P * m.A_ref + std::conj(m.P) * m.b_out) * eika;
    return m;
}

/*! \brief Tunneling parameters from matched amplitudes.
 * T = |a_out|^2, J = arg a_out (principal), F per the sign of Re(Q P*)
 * (tie Re(QP*) = 0 -> F = 0). */
inline TunnelingParams params_from_amplitudes(const Amplitudes& m, double k) {
    TunnelingParams p;
    p.k = k;
    p.T = std::norm(m.a_out);
    p.R = std::norm(m.b_out);
    p.J = std::arg(m.a_out);
    p.F = (std::real(m.Q * std::conj(m.P)) >= 0.0) ? 0.0 : M_PI;
    return p;
}

/*! \brief Full stationary solution at one wavenumber. */
struct ScatterSolution {
    Barrier barrier;
    Units units;
    double k = 1.0;
    Amplitudes amp;
    TunnelingParams params;

    double a() const { return barrier.a(); }
    double b() const { return barrier.b(); }
    double d() const { return barrier.d(); }
    double xc() const { return barrier.xc(); }
};

inline ScatterSolution solve_stationary(const Barrier& bar, double k,
                                        const Units& units = {},
                                        const OdeSettings& ode = {}) {
    if (!(k > 0.0)) throw std::invalid_argument("solve_stationary: need k > 0");
    units.validate();
    ScatterSolution s{bar, units, k, {}, {}};
    s.amp = match_amplitudes(basis_at_edge(bar, k, units, ode), k, bar.a(), bar.d());
    s.params = params_from_amplitudes(s.amp, k);
    return s;
}

/// (hbar/m) Im(psi* dpsi) -- the probability flux density.
inline double probability_flux(const cplx& psi, const cplx& dpsi,
                               const Units& u = {}) {
    return u.hbar / u.mass * std::imag(std::conj(psi) * dpsi);
}

/*! \brief Evaluate one kind of the decomposition at a point.
 *
 * `bp` must be the basis at |x - x_c| and is only read for a <= x <= b.
 * Outside the barrier the plane-wave pieces are used.  psi_ref is truncated:
 * identically 0 for x >= x_c.  The interior left psi_tr uses its own
 * coefficient a_tr_l (no reliance on the identity a_tr_l + c_ref = alpha),
 * so the pointwise reconstruction full = tr + ref is a genuine test.
 */
inline void eval_kind(const ScatterSolution& s, Kind kind, double x,
                      const BasisPoint* bp, cplx& psi, cplx& dpsi) {
    const double k = s.k;
    const double a = s.a(), b = s.b(), xc = s.xc(), d = s.d();
    const cplx I(0.0, 1.0);
    const Amplitudes& m = s.amp;
    if (x < a) {
        const cplx ein = std::exp(I * k * x);
        const cplx eref = std::exp(-I * k * (x - 2.0 * a));
        switch (kind) {
            case Kind::full:
                psi = ein + m.b_out * eref;
                dpsi = I * k * (ein - m.b_out * eref);
                return;
            case Kind::tr:
                psi = m.A_tr * ein;
                dpsi = I * k * m.A_tr * ein;
                return;
            case Kind::ref:
                psi = m.A_ref * ein + m.b_out * eref;
                dpsi = I * k * (m.A_ref * ein - m.b_out * eref);
                return;
        }
    }
    if (x > b) {
        if (kind == Kind::ref) {
            psi = 0.0;
            dpsi = 0.0;
            return;
        }
        const cplx eout = std::exp(I * k * (x - d));
        psi = m.a_out * eout;
        dpsi = I * k * m.a_out * eout;
        return;
    }
    // interior: odd/even continuation of the basis sampled at |xi|
    const double xi = x - xc;
    const double su = (xi < 0.0) ? -1.0 : 1.0;  // parity: u odd, u' even, v even, v' odd
    const double u = su * bp->u, up = bp->up, v = bp->v, vp = su * bp->vp;
    const bool left = xi < 0.0;
    switch (kind) {
        case Kind::full:
            psi = m.alpha * u + m.beta * v;
            dpsi = m.alpha * up + m.beta * vp;
            return;
        case Kind::tr:
            if (left) {
                psi = m.a_tr_l * u + m.beta * v;
                dpsi = m.a_tr_l * up + m.beta * vp;
            } else {
                psi = m.alpha * u + m.beta * v;
                dpsi = m.alpha * up + m.beta * vp;
            }
            return;
        case Kind::ref:
            if (left) {
                psi = m.c_ref * u;
                dpsi = m.c_ref * up;
            } else {
                psi = 0.0;
                dpsi = 0.0;
            }
            return;
    }
}

/*! \brief Interior basis for an arbitrary grid: returns, for each x[i] inside
 * [a,b], the basis at |x[i]-x_c| (empty BasisPoint for outside points).
 * The ODE runs once over the sorted offsets. */
inline std::vector<BasisPoint> interior_basis(const Barrier& bar, double k,
                                              const Units& units,
                                              const std::vector<double>& x,
                                              const OdeSettings& ode = {}) {
    std::vector<BasisPoint> out(x.size());
    std::vector<std::size_t> idx;
    std::vector<double> absxi;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] >= bar.a() && x[i] <= bar.b()) {
            idx.push_back(i);
            absxi.push_back(std::abs(x[i] - bar.xc()));
        }
    }
    if (idx.empty()) return out;
    std::vector<std::size_t> order(idx.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t l, std::size_t r) { return absxi[l] < absxi[r]; });
    std::vector<double> nodes(order.size());
    for (std::size_t j = 0; j < order.size(); ++j) nodes[j] = absxi[order[j]];
    const auto bps = basis_on_nodes(bar, k, units, nodes, ode);
    for (std::size_t j = 0; j < order.size(); ++j) out[idx[order[j]]] = bps[j];
    return out;
}

/*! \brief Sampled decomposition of the stationary wave on a grid. */
struct StationaryDecomposition {
    double k = 0.0;
    std::vector<double> x;
    std::vector<cplx> psi_full, psi_tr, psi_ref;
    std::vector<cplx> dpsi_full, dpsi_tr, dpsi_ref;
    std::vector<double> flux_full, flux_tr, flux_ref;
};

inline StationaryDecomposition decompose_on_grid(const ScatterSolution& s,
                                                 std::vector<double> xgrid,
                                                 const OdeSettings& ode = {}) {
    StationaryDecomposition dec;
    dec.k = s.k;
    dec.x = std::move(xgrid);
    const std::size_t n = dec.x.size();
    const auto bps = interior_basis(s.barrier, s.k, s.units, dec.x, ode);
    dec.psi_full.resize(n);
    dec.psi_tr.resize(n);
    dec.psi_ref.resize(n);
    dec.dpsi_full.resize(n);
    dec.dpsi_tr.resize(n);
    dec.dpsi_ref.resize(n);
    dec.flux_full.resize(n);
    dec.flux_tr.resize(n);
    dec.flux_ref.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        eval_kind(s, Kind::full, dec.x[i], &bps[i], dec.psi_full[i], dec.dpsi_full[i]);
        eval_kind(s, Kind::tr, dec.x[i], &bps[i], dec.psi_tr[i], dec.dpsi_tr[i]);
        eval_kind(s, Kind::ref, dec.x[i], &bps[i], dec.psi_ref[i], dec.dpsi_ref[i]);
        dec.flux_full[i] = probability_flux(dec.psi_full[i], dec.dpsi_full[i], s.units);
        dec.flux_tr[i] = probability_flux(dec.psi_tr[i], dec.dpsi_tr[i], s.units);
        dec.flux_ref[i] = probability_flux(dec.psi_ref[i], dec.dpsi_ref[i], s.units);
    }
    return dec;
}

/// Default scan grid: uniform n points over [a - pad, b + pad].
inline std::vector<double> default_xgrid(const Barrier& bar, double pad,
                                         std::size_t n = 2048) {
    if (n < 2) throw std::invalid_argument("default_xgrid: need n >= 2");
    std::vector<double> x(n);
    const double lo = bar.a() - pad, hi = bar.b() + pad;
    for (std::size_t i = 0; i < n; ++i)
        x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return x;
}

}  // namespace tunnelsplit

#endif  // TUNNELSPLIT_STATIONARY_HPP
