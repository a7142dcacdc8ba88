// Characteristic times at fixed k: sub-process dwell times (closed-form and
// quadrature), the clock offsets tau_0 / tau_z, and comparison times
// (Smith, Bohm, stationary-phase).
#ifndef TUNNELSPLIT_TIMES_HPP
#define TUNNELSPLIT_TIMES_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "barrier.hpp"
#include "kernels.hpp"
#include "quadrature.hpp"
#include "stationary.hpp"

namespace tunnelsplit {

/*! \brief Transmission dwell time, rectangular closed form.
 *
 * Unified in y = w d^2 (both regimes and the E = V0 limit):
 *   tau = (m/2 hbar k) (2d + kappa0^2 d^3 Lm1(y)).
 * beta multiplies the oscillatory over-barrier term; the resolved physical
 * value is +1 (see fit_beta); other values are kept only so the resolution
 * procedure itself can be exercised.
 */
inline double dwell_tr_rect(const Barrier& bar, double k, const Units& u = {},
                            double beta = 1.0) {
    if (!(k > 0.0)) throw std::invalid_argument("dwell_tr_rect: need k > 0");
    const double d = bar.d();
    const double w = w_of(bar, k, u);
    const double k02 = w + k * k;
    if (beta == 1.0 || w >= 0.0) {
        const double y = w * d * d;
        return u.mass / (2.0 * u.hbar * k) *
               (2.0 * d + k02 * d * d * d * kernels::Lm1(y));
    }
    const double kap = std::sqrt(-w);
    return u.mass / (2.0 * u.hbar * k * kap * kap * kap) *
           ((kap * kap + k * k) * kap * d - beta * k02 * std::sin(kap * d));
}

/*! \brief Reflection dwell time, rectangular closed form (unified):
 * tau = (m k d^3/hbar) Lm1(y) / (1 + kappa0^2 (d^2/4) L(y/4)^2). */
inline double dwell_ref_rect(const Barrier& bar, double k, const Units& u = {},
                             double beta = 1.0) {
    if (!(k > 0.0)) throw std::invalid_argument("dwell_ref_rect: need k > 0");
    const double d = bar.d();
    const double w = w_of(bar, k, u);
    const double k02 = w + k * k;
    if (beta == 1.0 || w >= 0.0) {
        const double y = w * d * d;
        const double Lh = kernels::L(0.25 * y);
        return u.mass * k * d * d * d / u.hbar * kernels::Lm1(y) /
               (1.0 + k02 * 0.25 * d * d * Lh * Lh);
    }
    const double kap = std::sqrt(-w);
    const double sh = std::sin(0.5 * kap * d);
    return u.mass * k / (u.hbar * kap) * (kap * d - std::sin(kap * d)) /
           (kap * kap + beta * k02 * sh * sh);
}

/*! \brief Larmor clock offsets tau_0 (initial azimuth) and tau_z (initial
 * polar tilt), rectangular closed forms, unified over the regimes:
 *   M(y)   = L + C + k^2 d^2 CmL,
 *   D(y)   = 4 k^2 + kappa0^4 d^2 L^2,
 *   tau_0  = (2 m k d/hbar)           M / D,
 *   tau_z  = (m kappa0^2 d^2/hbar)  L M / D.
 * Over-barrier these are the analytic continuations that the spin-split
 * finite-difference oracle reproduces (tau0z_numeric below).
 */
inline double tau0_rect(const Barrier& bar, double k, const Units& u = {}) {
    if (!(k > 0.0)) throw std::invalid_argument("tau0_rect: need k > 0");
    const double d = bar.d();
    const double w = w_of(bar, k, u);
    const double k02 = w + k * k;
    const double y = w * d * d;
    const double Ly = kernels::L(y);
    const double M = Ly + kernels::C(y) + k * k * d * d * kernels::CmL(y);
    const double D = 4.0 * k * k + k02 * k02 * d * d * Ly * Ly;
    return 2.0 * u.mass * k * d / u.hbar * M / D;
}

inline double tauz_rect(const Barrier& bar, double k, const Units& u = {}) {
    if (!(k > 0.0)) throw std::invalid_argument("tauz_rect: need k > 0");
    const double d = bar.d();
    const double w = w_of(bar, k, u);
    const double k02 = w + k * k;
    const double y = w * d * d;
    const double Ly = kernels::L(y);
    const double M = Ly + kernels::C(y) + k * k * d * d * kernels::CmL(y);
    const double D = 4.0 * k * k + k02 * k02 * d * d * Ly * Ly;
    return u.mass * k02 * d * d / u.hbar * Ly * M / D;
}

/*! \brief Smith dwell time, rectangular closed form (derived; used as a test
 * oracle -- the library-level dwell_smith below is quadrature as specified):
 * tau = (m T d/2 hbar k) [1 + L(4y) + 4 k^2 d^2 Lm1(4y)]. */
inline double smith_rect(const Barrier& bar, double k, const Units& u = {}) {
    const double d = bar.d();
    const double w = w_of(bar, k, u);
    const double y4 = 4.0 * w * d * d;
    const double T = rect_tunneling_params(bar, k, u).T;
    return u.mass * T * d / (2.0 * u.hbar * k) *
           (1.0 + kernels::L(y4) + 4.0 * k * k * d * d * kernels::Lm1(y4));
}

namespace detail {

/*! Simpson-with-doubling dwell integrals of one stationary solution.
 * The grid always contains a, x_c, b as nodes (the tr integrand has a
 * derivative kink at x_c), n is a multiple of 4. */
struct DwellQuadratures {
    double tr = 0.0, ref = 0.0, smith = 0.0;
};

inline DwellQuadratures dwell_integrals(const ScatterSolution& s,
                                        double rel_tol = 1e-8,
                                        const OdeSettings& ode = {},
                                        std::size_t n0 = 64,
                                        std::size_t n_max = (1u << 16)) {
    const double a = s.a(), b = s.b();
    DwellQuadratures prev{}, cur{};
    for (std::size_t n = n0; n <= n_max; n *= 2) {
        std::vector<double> x(n + 1);
        const double hstep = (b - a) / static_cast<double>(n);
        for (std::size_t i = 0; i <= n; ++i)
            x[i] = a + hstep * static_cast<double>(i);
        x[n / 2] = s.xc();  // exact midpoint node
        const auto bps = interior_basis(s.barrier, s.k, s.units, x, ode);
        std::vector<double> f2(n + 1), r2(n + 1), q2(n + 1);
        cplx psi, dpsi;
        for (std::size_t i = 0; i <= n; ++i) {
            eval_kind(s, Kind::tr, x[i], &bps[i], psi, dpsi);
            f2[i] = std::norm(psi);
            eval_kind(s, Kind::ref, x[i], &bps[i], psi, dpsi);
            r2[i] = std::norm(psi);
            eval_kind(s, Kind::full, x[i], &bps[i], psi, dpsi);
            q2[i] = std::norm(psi);
        }
        auto simpson_half = [&](const std::vector<double>& f, std::size_t lo,
                                std::size_t hi) {
            double acc = f[lo] + f[hi];
            for (std::size_t i = lo + 1; i < hi; ++i)
                acc += (((i - lo) % 2) ? 4.0 : 2.0) * f[i];
            return acc * hstep / 3.0;
        };
        cur.tr = simpson_half(f2, 0, n / 2) + simpson_half(f2, n / 2, n);
        cur.ref = simpson_half(r2, 0, n / 2);
        cur.smith = simpson_half(q2, 0, n / 2) + simpson_half(q2, n / 2, n);
        if (n > n0) {
            const double e_tr = std::abs(cur.tr - prev.tr) / std::max(cur.tr, 1e-300);
            const double e_ref = std::abs(cur.ref - prev.ref) / std::max(cur.ref, 1e-300);
            const double e_sm = std::abs(cur.smith - prev.smith) / std::max(cur.smith, 1e-300);
            if (e_tr <= rel_tol && e_ref <= rel_tol && e_sm <= rel_tol) return cur;
        }
        prev = cur;
    }
    return cur;
}

}  // namespace detail

/*! \brief Transmission dwell time by quadrature of |psi_tr|^2 over [a,b]
 * divided by the transmitted flux T hbar k / m. */
inline double dwell_tr_numeric(const ScatterSolution& s, double rel_tol = 1e-8,
                               const OdeSettings& ode = {}) {
    if (s.params.T < 1e-300)
        throw std::runtime_error("dwell_tr_numeric: T underflow");
    const auto q = detail::dwell_integrals(s, rel_tol, ode);
    return q.tr * s.units.mass / (s.params.T * s.units.hbar * s.k);
}

/*! \brief Reflection dwell time: quadrature of |psi_ref|^2 over [a, x_c]
 * divided by R hbar k / m.  Errors out at resonance (R ~ 0). */
inline double dwell_ref_numeric(const ScatterSolution& s, double rel_tol = 1e-8,
                                const OdeSettings& ode = {}) {
    if (s.params.R < 1e-300)
        throw std::runtime_error("dwell_ref_numeric: reflection-free (R ~ 0)");
    const auto q = detail::dwell_integrals(s, rel_tol, ode);
    return q.ref * s.units.mass / (s.params.R * s.units.hbar * s.k);
}

/*! \brief Smith's full-ensemble dwell time (m/hbar k) int_a^b |psi_full|^2. */
inline double dwell_smith(const ScatterSolution& s, double rel_tol = 1e-8,
                          const OdeSettings& ode = {}) {
    const auto q = detail::dwell_integrals(s, rel_tol, ode);
    return q.smith * s.units.mass / (s.units.hbar * s.k);
}

inline double dwell_bohm(const ScatterSolution& s, double rel_tol = 1e-8,
                         const OdeSettings& ode = {}) {
    if (s.params.T < 1e-300) throw std::runtime_error("dwell_bohm: T underflow");
    return dwell_smith(s, rel_tol, ode) / s.params.T;
}

/*! \brief Stationary-phase time by centered finite difference of J(k).
 *
 * Phase differences are taken as arg(a_out(k+dk) conj(a_out(k-dk))), immune
 * to the principal-branch jumps of J itself.  With the J convention of this
 * library (V == 0 gives J = kd) the result is a traversal time: m d/(hbar k)
 * for the free line.  Subtract free_flight_time() for the delay convention.
 */
inline double phase_time(const Barrier& bar, double k, double dk = 1e-6,
                         const Units& u = {}, const OdeSettings& ode = {}) {
    if (!(k - dk > 0.0)) throw std::invalid_argument("phase_time: need k - dk > 0");
    const cplx ap = solve_stationary(bar, k + dk, u, ode).amp.a_out;
    const cplx am = solve_stationary(bar, k - dk, u, ode).amp.a_out;
    const double dJ = std::arg(ap * std::conj(am));
    return u.mass / (u.hbar * k) * dJ / (2.0 * dk);
}

inline double free_flight_time(const Barrier& bar, double k, const Units& u = {}) {
    return u.mass * bar.d() / (u.hbar * k);
}

/*! \brief Spin-split finite-difference oracle for the clock offsets; works
 * for any symmetric barrier (uniform interior shift +-dV):
 *   tau_0 = -hbar d(arg A_tr)/dV,   tau_z = -(hbar/2) d(ln T)/dV. */
struct Tau0z {
    double tau0 = 0.0;
    double tauz = 0.0;
};

inline Tau0z tau0z_numeric(const Barrier& bar, double k, double dV = 1e-6,
                           const Units& u = {}, const OdeSettings& ode = {}) {
    const auto sp = solve_stationary(bar.shifted(+dV), k, u, ode);
    const auto sm = solve_stationary(bar.shifted(-dV), k, u, ode);
    Tau0z t;
    t.tau0 = -u.hbar * std::arg(sp.amp.A_tr * std::conj(sm.amp.A_tr)) / (2.0 * dV);
    t.tauz = -0.5 * u.hbar * std::log(sp.params.T / sm.params.T) / (2.0 * dV);
    return t;
}

/*! \brief All characteristic times for one configuration. */
struct CharacteristicTimes {
    double k = 0.0;
    double tau_dwell_tr = 0.0;
    double tau_dwell_ref = 0.0;  ///< NaN at exact resonance (R = 0)
    double tau_0 = 0.0;
    double tau_z = 0.0;
    double tau_smith = 0.0;
    double tau_bohm = 0.0;
    double tau_phase = 0.0;  ///< traversal convention (free flight included)
    double beta = 1.0;       ///< over-barrier sign resolved by fit_beta
};

/*! \brief Gather every time at one k.  Rectangular barriers use the closed
 * forms for the sub-process dwell times and clock offsets; other barriers
 * fall back to quadrature / finite differences.  tau_smith is quadrature in
 * both cases (its closed form smith_rect stays a pure test oracle). */
inline CharacteristicTimes compute_times(const Barrier& bar, double k,
                                         const Units& u = {},
                                         const OdeSettings& ode = {},
                                         double quad_tol = 1e-8,
                                         double dk_phase = 1e-6) {
    CharacteristicTimes t;
    t.k = k;
    const auto s = solve_stationary(bar, k, u, ode);
    if (bar.uniform_interior()) {
        t.tau_dwell_tr = dwell_tr_rect(bar, k, u);
        t.tau_dwell_ref = (s.params.R < 1e-300)
                              ? std::numeric_limits<double>::quiet_NaN()
                              : dwell_ref_rect(bar, k, u);
        t.tau_0 = tau0_rect(bar, k, u);
        t.tau_z = tauz_rect(bar, k, u);
    } else {
        const auto q = detail::dwell_integrals(s, quad_tol, ode);
        t.tau_dwell_tr = q.tr * u.mass / (s.params.T * u.hbar * k);
        t.tau_dwell_ref = (s.params.R < 1e-300)
                              ? std::numeric_limits<double>::quiet_NaN()
                              : q.ref * u.mass / (s.params.R * u.hbar * k);
        const auto offs = tau0z_numeric(bar, k, 1e-6 * std::max(1.0, bar.height()), u, ode);
        t.tau_0 = offs.tau0;
        t.tau_z = offs.tauz;
    }
    t.tau_smith = dwell_smith(s, quad_tol, ode);
    t.tau_bohm = t.tau_smith / s.params.T;
    t.tau_phase = phase_time(bar, k, dk_phase, u, ode);
    t.beta = 1.0;
    return t;
}

/*! \brief Empirical resolution of the over-barrier sign beta.
 *
 * For each over-barrier k, invert the closed forms for beta using the
 * quadrature dwell time as ground truth (the tr form is linear in beta, the
 * ref form has beta in the denominator), then average.  The physical answer
 * is +1 for both; near sin(kappa d) = 0 the sensitivity vanishes, so nodes
 * too close to a resonance are skipped.
 */
struct BetaFit {
    double beta_tr = 0.0;
    double beta_ref = 0.0;
    std::size_t n_used = 0;
};

inline BetaFit fit_beta(const Barrier& bar, const std::vector<double>& kscan,
                        const Units& u = {}, const OdeSettings& ode = {},
                        double quad_tol = 1e-9) {
    if (!bar.uniform_interior())
        throw std::invalid_argument("fit_beta: rectangular only");
    BetaFit fit;
    double acc_tr = 0.0, acc_ref = 0.0;
    for (double k : kscan) {
        const double w = w_of(bar, k, u);
        if (w >= 0.0) continue;  // over-barrier branch only
        const double kap = std::sqrt(-w);
        const double k02 = w + k * k;
        const double sn = std::sin(kap * bar.d());
        const double sh = std::sin(0.5 * kap * bar.d());
        if (std::abs(sn) < 0.1) continue;  // beta-insensitive near resonance
        const auto s = solve_stationary(bar, k, u, ode);
        const auto q = detail::dwell_integrals(s, quad_tol, ode);
        const double ttr = q.tr * u.mass / (s.params.T * u.hbar * k);
        const double tref = q.ref * u.mass / (s.params.R * u.hbar * k);
        // invert tr form: tau = m/(2 hbar k kap^3) [(kap^2+k^2) kap d - beta k0^2 sin]
        const double btr = ((kap * kap + k * k) * kap * bar.d() -
                            ttr * 2.0 * u.hbar * k * kap * kap * kap / u.mass) /
                           (k02 * sn);
        // invert ref form: kap^2 + beta k0^2 sin^2(kap d/2) = (m k/hbar kap)(kap d - sin)/tau
        const double bref =
            (u.mass * k / (u.hbar * kap) * (kap * bar.d() - sn) / tref - kap * kap) /
            (k02 * sh * sh);
        acc_tr += btr;
        acc_ref += bref;
        ++fit.n_used;
    }
    if (fit.n_used == 0) throw std::runtime_error("fit_beta: no usable over-barrier nodes");
    fit.beta_tr = acc_tr / static_cast<double>(fit.n_used);
    fit.beta_ref = acc_ref / static_cast<double>(fit.n_used);
    return fit;
}

}  // namespace tunnelsplit

#endif  // TUNNELSPLIT_TIMES_HPP
