// Spectral construction and time evolution of the full/transmission/
// reflection wave packets; norms, overlaps, and the packet-level Larmor
// times (time-integral and spectral-average routes).
#ifndef TUNNELSPLIT_WAVEPACKET_HPP
#define TUNNELSPLIT_WAVEPACKET_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "barrier.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "stationary.hpp"
#include "times.hpp"

namespace tunnelsplit {

/*! \brief Gaussian spectral envelope A_in(k) = c exp(-l0^2 (k-k0)^2),
 * c = (2 l0^2/pi)^{1/4}, normalized so that int |A_in|^2 dk = 1.
 * The launch center is x0 = 0: <x> = 0, <p> = hbar k0, <x^2> = l0^2 at t = 0. */
struct GaussianSpec {
    double k0 = 1.0;  ///< central wavenumber, > 0
    double l0 = 8.0;  ///< spatial half-width

    void validate() const {
        if (!(k0 > 0.0) || !(l0 > 0.0))
            throw std::invalid_argument("GaussianSpec: need k0 > 0 and l0 > 0");
    }
    double amplitude(double k) const {
        const double c = std::pow(2.0 * l0 * l0 / M_PI, 0.25);
        const double z = l0 * (k - k0);
        return c * std::exp(-z * z);
    }
};

/*! \brief Quadrature grid in k-space over the truncated spectral support. */
struct KGrid {
    std::vector<double> k;  ///< Gauss-Legendre nodes (ascending)
    std::vector<double> w;  ///< weights
    double eps_k = 1e-8;    ///< relative amplitude cutoff defining the window
};

/*! \brief Gauss-Legendre nodes over [k0 - D, k0 + D] with
 * D = sqrt(ln(1/eps_k))/l0 (|A_in| >= eps_k * max inside).  The window may
 * cross k = 0 (broad packets); nodes are nudged off exact zero. */
inline KGrid build_kgrid(const GaussianSpec& spec, std::size_t n_nodes = 96,
                         double eps_k = 1e-8) {
    spec.validate();
    if (n_nodes < 64) throw std::invalid_argument("build_kgrid: need n >= 64");
    if (!(eps_k > 0.0 && eps_k < 1.0))
        throw std::invalid_argument("build_kgrid: need 0 < eps_k < 1");
    const double D = std::sqrt(-std::log(eps_k)) / spec.l0;
    GaussLegendre gl(n_nodes, spec.k0 - D, spec.k0 + D);
    KGrid g;
    g.k = std::move(gl.x);
    g.w = std::move(gl.w);
    g.eps_k = eps_k;
    for (double& k : g.k)
        if (std::abs(k) <= 1e-12) k = 1e-12;
    return g;
}

/*! \brief Complex field samples of one packet kind at a fixed time. */
struct Field {
    std::vector<cplx> psi;
    std::vector<cplx> dpsi;  ///< filled only when requested
};

/*! \brief A scattering wave packet bound to one barrier.
 *
 * Stationary solutions are prepared once per k-node; every time-dependent
 * quantity is the fixed-order quadrature sum
 *   psi(x,t) = sum_q w_q A_in(k_q) psi_{k_q}(x) e^{-i E_q t/hbar} / sqrt(2 pi),
 * so results are independent of how many threads computed the nodes.
 *
 * Validity horizon: an n-node rule resolves the oscillation of
 * e^{i(k x - E t)} in k only while the stationary center of every plane-wave
 * piece stays within |x -/+ v_k t| <~ pi n / (2 Dk) of the evaluation point
 * (Dk = half-width of the k-window).  Beyond that the sums alias into ghost
 * density of order the subensemble weight.  spectral_horizon() reports the
 * bound; sampling grids stay inside it for the occupancy windows used here,
 * and doubling n_nodes (which doubles the horizon) is the convergence check.
 */
class Packet {
public:
    Packet(const Barrier& bar, const GaussianSpec& spec, const Units& units = {},
           std::size_t n_nodes = 96, double eps_k = 1e-8,
           const OdeSettings& ode = {}, unsigned threads = 1)
        : barrier_(bar), units_(units), spec_(spec), ode_(ode),
          grid_(build_kgrid(spec, n_nodes, eps_k)) {
        if (spec.k0 * spec.l0 < 2.0) low_product_warning_ = true;
        const std::size_t n = grid_.k.size();
        sols_.resize(n);
        amp_in_.resize(n);
        parallel_for(n, threads, [&](std::size_t q) {
            sols_[q] = solve_packet_node(grid_.k[q]);
            amp_in_[q] = spec_.amplitude(grid_.k[q]);
        });
    }

    const Barrier& barrier() const { return barrier_; }
    const Units& units() const { return units_; }
    const GaussianSpec& spec() const { return spec_; }
    const KGrid& kgrid() const { return grid_; }
    bool low_product_warning() const { return low_product_warning_; }
    const ScatterSolution& node(std::size_t q) const { return sols_[q]; }

    /// varpi-weighted average transmission:  T_avg = int varpi T dk.
    double T_avg() const { return weighted_param(true); }
    double R_avg() const { return weighted_param(false); }

    /// Largest |x - v t| the k-quadrature resolves without aliasing.
    double spectral_horizon() const {
        const double Dk = 0.5 * (grid_.k.back() - grid_.k.front());
        return 0.5 * M_PI * static_cast<double>(grid_.k.size()) / Dk;
    }

    /*! \brief Packet field of one kind at time t on the given grid. */
    Field evolve(Kind kind, double t, const std::vector<double>& x,
                 bool with_deriv = false) const {
        Field f;
        f.psi.assign(x.size(), cplx(0.0, 0.0));
        if (with_deriv) f.dpsi.assign(x.size(), cplx(0.0, 0.0));
        cplx psi, dpsi;
        for (std::size_t q = 0; q < grid_.k.size(); ++q) {
            const auto bps = interior_basis(barrier_, sols_[q].k, units_, x, ode_);
            const cplx cq = node_coef(q, t);
            for (std::size_t i = 0; i < x.size(); ++i) {
                eval_kind(sols_[q], kind, x[i], &bps[i], psi, dpsi);
                f.psi[i] += cq * psi;
                if (with_deriv) f.dpsi[i] += cq * dpsi;
            }
        }
        return f;
    }

    /*! \brief Free asymptote fields: Eq.-type in (incident Gaussian) and out
     * (transmitted + reflected pieces built from a_out, b_out). */
    Field asymptote(bool incoming, double t, const std::vector<double>& x) const {
        Field f;
        f.psi.assign(x.size(), cplx(0.0, 0.0));
        const cplx I(0.0, 1.0);
        for (std::size_t q = 0; q < grid_.k.size(); ++q) {
            const double k = grid_.k[q];
            const cplx cq = node_coef(q, t);
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (incoming) {
                    f.psi[i] += cq * std::exp(I * k * x[i]);
                } else {
                    f.psi[i] += cq * (sols_[q].amp.a_out *
                                          std::exp(I * k * (x[i] - barrier_.d())) +
                                      sols_[q].amp.b_out *
                                          std::exp(-I * k * (x[i] - 2.0 * barrier_.a())));
                }
            }
        }
        return f;
    }

    /*! \brief Kink-aligned Simpson grid covering the packet at time t.
     * For kind == ref the grid stops at x_c (the packet vanishes beyond). */
    std::vector<double> norm_grid(Kind kind, double t) const {
        const auto [xlo, xhi] = domain_bounds(t);
        const double upper = (kind == Kind::ref) ? barrier_.xc() : xhi;
        std::vector<double> cuts{xlo, barrier_.a(), barrier_.xc()};
        if (kind != Kind::ref) {
            cuts.push_back(barrier_.b());
            cuts.push_back(upper);
        } else {
            cuts.push_back(upper);
        }
        return segmented_grid(cuts);
    }

    /// Spatial norm of one kind at time t.
    double norm(Kind kind, double t) const {
        const auto x = norm_grid(kind, t);
        const auto f = evolve(kind, t, x);
        std::vector<double> dens(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) dens[i] = std::norm(f.psi[i]);
        return simpson_on_grid(x, dens);
    }

    /// <psi_tr | psi_ref> at time t (the ref packet lives on (-inf, x_c]).
    cplx overlap(double t) const {
        const auto x = norm_grid(Kind::ref, t);
        const auto ftr = evolve(Kind::tr, t, x);
        const auto fref = evolve(Kind::ref, t, x);
        std::vector<double> re(x.size()), im(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const cplx p = std::conj(ftr.psi[i]) * fref.psi[i];
            re[i] = p.real();
            im[i] = p.imag();
        }
        return {simpson_on_grid(x, re), simpson_on_grid(x, im)};
    }

    /// Barrier-region occupancy int |psi_kind|^2 over [a,b] (tr/full) or [a,x_c] (ref).
    double occupancy(Kind kind, double t) const {
        const double hi = (kind == Kind::ref) ? barrier_.xc() : barrier_.b();
        std::vector<double> cuts{barrier_.a(), barrier_.xc()};
        if (kind != Kind::ref) cuts.push_back(hi);
        auto x = segmented_grid(cuts);
        const auto f = evolve(kind, t, x);
        std::vector<double> dens(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) dens[i] = std::norm(f.psi[i]);
        return simpson_on_grid(x, dens);
    }

    /*! \brief Spectral-average Larmor time:
     * tau^L = (1/T_avg) int varpi(k) T(k) tau_dwell(k) dk (and the ref analog). */
    double larmor_time_spectral(Kind kind) const {
        ensure_dwell_cache();
        double num = 0.0, den = 0.0;
        for (std::size_t q = 0; q < grid_.k.size(); ++q) {
            const double sgn = (grid_.k[q] > 0.0) ? 1.0 : -1.0;
            const double a2 = amp_in_[q] * amp_in_[q];
            const double p = (kind == Kind::tr) ? sols_[q].params.T : sols_[q].params.R;
            const double tau = (kind == Kind::tr) ? dwell_tr_[q] : dwell_ref_[q];
            num += grid_.w[q] * sgn * a2 * p * tau;
            den += grid_.w[q] * sgn * a2 * p;
        }
        if (std::abs(den) < 1e-300)
            throw std::runtime_error("larmor_time_spectral: subensemble weight underflow");
        return num / den;
    }

    /*! \brief Time-integral Larmor time (1/T_avg) int dt int_barrier |psi|^2 dx.
     *
     * The window is grown outward until the occupancy at both endpoints drops
     * below eps_t * (subensemble norm); the t-quadrature is Simpson with
     * doubling until 1e-8 relative agreement.
     */
    double larmor_time_timeintegral(Kind kind, double eps_t = 1e-10) const {
        if (kind == Kind::full)
            throw std::invalid_argument("larmor_time_timeintegral: tr or ref");
        const double weight = (kind == Kind::tr) ? T_avg() : R_avg();
        if (weight < 1e-300)
            throw std::runtime_error("larmor_time_timeintegral: empty subensemble");
        const auto [t_lo, t_hi] = interaction_window(kind, eps_t);
        auto occ = [&](double t) { return occupancy(kind, t); };
        const double integral =
            simpson_adaptive(occ, t_lo, t_hi, 1e-8, 128, 4096);
        return integral / weight;
    }

    /*! \brief Time window outside which the barrier-region occupancy of the
     * given kind stays below eps_t * (subensemble spectral weight). */
    std::pair<double, double> interaction_window(Kind kind, double eps_t = 1e-10) const {
        const double weight = (kind == Kind::ref) ? R_avg()
                              : (kind == Kind::tr) ? T_avg()
                                                   : 1.0;
        if (weight < 1e-300)
            throw std::runtime_error("interaction_window: empty subensemble");
        const double floor = eps_t * weight;
        const double v0 = units_.hbar * spec_.k0 / units_.mass;
        double t_lo = (barrier_.a() - 8.0 * spec_.l0) / v0;
        double t_hi = (barrier_.b() + 8.0 * spec_.l0) / v0;
        const double step = (barrier_.d() + 16.0 * spec_.l0) / v0;
        for (int i = 0; occupancy(kind, t_lo) > floor; ++i) {
            t_lo -= step;
            if (i > 64)
                throw std::runtime_error("interaction_window: open at early times");
        }
        for (int i = 0; occupancy(kind, t_hi) > floor; ++i) {
            t_hi += step;
            if (i > 64)
                throw std::runtime_error("interaction_window: occupancy not decaying");
        }
        return {t_lo, t_hi};
    }

    /*! \brief Spatial moments (N, <x>, <p>, spread) of a kind at time t. */
    struct Moments {
        double norm = 0.0, mean_x = 0.0, mean_p = 0.0, spread = 0.0;
    };
    Moments moments(Kind kind, double t) const {
        const auto x = norm_grid(kind, t);
        const auto f = evolve(kind, t, x, true);
        std::vector<double> dens(x.size()), xd(x.size()), x2d(x.size()), pj(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            dens[i] = std::norm(f.psi[i]);
            xd[i] = x[i] * dens[i];
            x2d[i] = x[i] * x[i] * dens[i];
            pj[i] = std::imag(std::conj(f.psi[i]) * f.dpsi[i]);
        }
        Moments m;
        m.norm = simpson_on_grid(x, dens);
        if (m.norm < 1e-300) throw std::runtime_error("moments: norm underflow");
        m.mean_x = simpson_on_grid(x, xd) / m.norm;
        m.mean_p = units_.hbar * simpson_on_grid(x, pj) / m.norm;
        const double x2 = simpson_on_grid(x, x2d) / m.norm;
        m.spread = std::sqrt(std::max(0.0, x2 - m.mean_x * m.mean_x));
        return m;
    }

    /// Grid density target: points per unit length ~ k_max / dens_target.
    double dens_target = 0.01;

private:
    ScatterSolution solve_packet_node(double k) const {
        // negative-k nodes (broad packets) reuse the same matching formulas;
        // basis depends on k^2 only.
        const double kk = (k != 0.0) ? k : 1e-12;
        ScatterSolution s{barrier_, units_, kk, {}, {}};
        s.amp = match_amplitudes(basis_at_edge(barrier_, std::abs(kk), units_, ode_),
                                 kk, barrier_.a(), barrier_.d());
        s.params = params_from_amplitudes(s.amp, kk);
        return s;
    }

    cplx node_coef(std::size_t q, double t) const {
        const double k = grid_.k[q];
        const double E = energy_of(k, units_);
        const cplx I(0.0, 1.0);
        return grid_.w[q] * amp_in_[q] / std::sqrt(2.0 * M_PI) *
               std::exp(-I * E * t / units_.hbar);
    }

    double weighted_param(bool transmission) const {
        double acc = 0.0;
        for (std::size_t q = 0; q < grid_.k.size(); ++q) {
            const double sgn = (grid_.k[q] > 0.0) ? 1.0 : -1.0;
            const double p = transmission ? sols_[q].params.T : sols_[q].params.R;
            acc += grid_.w[q] * sgn * amp_in_[q] * amp_in_[q] * p;
        }
        return acc;
    }

    void ensure_dwell_cache() const {
        if (!dwell_tr_.empty()) return;
        dwell_tr_.resize(grid_.k.size());
        dwell_ref_.resize(grid_.k.size());
        for (std::size_t q = 0; q < grid_.k.size(); ++q) {
            const double k = std::abs(grid_.k[q]);
            if (barrier_.uniform_interior()) {
                dwell_tr_[q] = dwell_tr_rect(barrier_, k, units_);
                dwell_ref_[q] = dwell_ref_rect(barrier_, k, units_);
            } else {
                const auto s = solve_stationary(barrier_, k, units_, ode_);
                const auto qd = detail::dwell_integrals(s, 1e-9, ode_);
                dwell_tr_[q] = qd.tr * units_.mass / (s.params.T * units_.hbar * k);
                dwell_ref_[q] = (s.params.R < 1e-300)
                                    ? 0.0
                                    : qd.ref * units_.mass / (s.params.R * units_.hbar * k);
            }
        }
    }

    std::pair<double, double> domain_bounds(double t) const {
        const double k_hi = std::max(std::abs(grid_.k.front()), std::abs(grid_.k.back()));
        const double v_hi = units_.hbar * k_hi / units_.mass;
        const double v0 = units_.hbar * spec_.k0 / units_.mass;
        const double sig = std::sqrt(spec_.l0 * spec_.l0 +
                                     std::pow(units_.hbar * t / (2.0 * units_.mass * spec_.l0), 2));
        const double pad = 8.0 * sig + barrier_.d() + 10.0;
        (void)v_hi;
        const double xlo =
            std::min({0.0, v0 * t, 2.0 * barrier_.a() - v0 * t}) - pad;
        const double xhi = std::max(barrier_.b(), barrier_.b() + v0 * t) + pad;
        return {xlo, xhi};
    }

    /*! Build a union of uniform Simpson segments with the cut points as exact
     * nodes; each segment gets an even interval count at the density target. */
    std::vector<double> segmented_grid(const std::vector<double>& cuts) const {
        const double k_hi = std::max(std::abs(grid_.k.front()), std::abs(grid_.k.back()));
        const double dx = dens_target / std::max(k_hi, 0.1);
        std::vector<double> x;
        for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
            const double lo = cuts[s], hi = cuts[s + 1];
            if (!(hi > lo)) continue;
            std::size_t n = static_cast<std::size_t>(std::ceil((hi - lo) / dx));
            n = std::max<std::size_t>(n, 8);
            if (n % 2) ++n;
            const double h = (hi - lo) / static_cast<double>(n);
            const std::size_t start = x.empty() ? 0 : 1;  // shared boundary node
            for (std::size_t i = start; i <= n; ++i)
                x.push_back(lo + h * static_cast<double>(i));
        }
        return x;
    }

    Barrier barrier_;
    Units units_;
    GaussianSpec spec_;
    OdeSettings ode_;
    KGrid grid_;
    std::vector<ScatterSolution> sols_;
    std::vector<double> amp_in_;
    mutable std::vector<double> dwell_tr_, dwell_ref_;
    bool low_product_warning_ = false;
};

}  // namespace tunnelsplit

#endif  // TUNNELSPLIT_WAVEPACKET_HPP
