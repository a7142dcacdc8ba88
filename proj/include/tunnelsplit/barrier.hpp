// Units context, symmetric-barrier potential models, and the closed-form
// rectangular tunneling parameters (T, J, F).
#ifndef TUNNELSPLIT_BARRIER_HPP
#define TUNNELSPLIT_BARRIER_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kernels.hpp"

namespace tunnelsplit {

/*! \brief Physical units context; natural units by default. */
struct Units {
    double hbar = 1.0;  ///< action unit
    double mass = 1.0;  ///< particle mass

    void validate() const {
        if (!(hbar > 0.0) || !(mass > 0.0))
            throw std::invalid_argument("Units: hbar and mass must be > 0");
    }
};

enum class Regime { under, over, degenerate };

/*! \brief Real tunneling parameters of the transfer matrix at one k. */
struct TunnelingParams {
    double k = 0.0;  ///< wavenumber
    double T = 0.0;  ///< transmission probability
    double R = 0.0;  ///< reflection probability, 1 - T
    double J = 0.0;  ///< scattering phase, principal value in (-pi, pi]
    double F = 0.0;  ///< phase flag, 0 or pi
};

enum class BarrierKind { rectangular, cos2, sampled };

/*! \brief Symmetric potential barrier supported on [a, a+d], V == 0 outside.
 *
 * The interior profile is stored centered: profile(xi) with xi = x - x_c,
 * profile(xi) == profile(-xi).  A uniform interior shift (used for the Larmor
 * spin splitting and for clock finite differences) is kept separately so the
 * rectangular analytic path stays exact under shifts.
 */
class Barrier {
public:
    static Barrier rectangular(double V0, double a, double d) {
        check_geometry(a, d);
        // V0 == 0 is the free-propagation limit, kept as a sanity anchor
        if (!(V0 >= 0.0))
            throw std::invalid_argument("Barrier: rectangular needs V0 >= 0");
        Barrier b;
        b.kind_ = BarrierKind::rectangular;
        b.V0_ = V0;
        b.a_ = a;
        b.d_ = d;
        return b;
    }

    /// Smooth built-in profile V0 * cos^2(pi*xi/d); vanishes at the edges.
    static Barrier cos2(double V0, double a, double d) {
        check_geometry(a, d);
        if (!(V0 > 0.0)) throw std::invalid_argument("Barrier: cos2 needs V0 > 0");
        Barrier b;
        b.kind_ = BarrierKind::cos2;
        b.V0_ = V0;
        b.a_ = a;
        b.d_ = d;
        return b;
    }

    /*! \brief Uniform samples of V over [a, a+d], endpoints included.
     * Symmetry V(x_c+xi)=V(x_c-xi) is required to 1e-12 (relative to max|V|);
     * off-grid evaluation is linear interpolation. */
    static Barrier sampled(double a, double d, std::vector<double> samples) {
        check_geometry(a, d);
        if (samples.size() < 3)
            throw std::invalid_argument("Barrier: need >= 3 samples");
        double vmax = 0.0;
        for (double v : samples) vmax = std::max(vmax, std::abs(v));
        const std::size_t n = samples.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double asym = std::abs(samples[i] - samples[n - 1 - i]);
            if (asym > 1e-12 * std::max(vmax, 1.0))
                throw std::invalid_argument(
                    "Barrier: sampled potential is not symmetric about x_c "
                    "(index " + std::to_string(i) + ")");
        }
        Barrier b;
        b.kind_ = BarrierKind::sampled;
        b.V0_ = vmax;
        b.a_ = a;
        b.d_ = d;
        b.samples_ = std::move(samples);
        return b;
    }

    BarrierKind kind() const { return kind_; }
    double a() const { return a_; }
    double b() const { return a_ + d_; }
    double d() const { return d_; }
    double xc() const { return a_ + 0.5 * d_; }
    double height() const { return V0_; }      ///< profile scale (rect height)
    double shift() const { return shift_; }    ///< uniform interior shift

    /// Copy with the interior uniformly shifted by dV (may go negative: well).
    Barrier shifted(double dV) const {
        Barrier b = *this;
        b.shift_ += dV;
        return b;
    }

    bool uniform_interior() const { return kind_ == BarrierKind::rectangular; }

    /// Interior profile at xi = x - x_c (|xi| <= d/2), shift included.
    double profile(double xi) const {
        switch (kind_) {
            case BarrierKind::rectangular:
                return V0_ + shift_;
            case BarrierKind::cos2: {
                const double c = std::cos(M_PI * xi / d_);
                return V0_ * c * c + shift_;
            }
            case BarrierKind::sampled: {
                const double h = 0.5 * d_;
                double s = (xi + h) / d_ * static_cast<double>(samples_.size() - 1);
                if (s < 0.0) s = 0.0;
                const auto i0 = std::min(static_cast<std::size_t>(s), samples_.size() - 2);
                const double f = s - static_cast<double>(i0);
                return samples_[i0] * (1.0 - f) + samples_[i0 + 1] * f + shift_;
            }
        }
        return 0.0;  // unreachable
    }

    /// Full-axis potential; exactly 0 outside [a, b].
    double potential(double x) const {
        if (x < a_ || x > b()) return 0.0;
        return profile(x - xc());
    }

private:
    static void check_geometry(double a, double d) {
        if (!(a > 0.0)) throw std::invalid_argument("Barrier: need a > 0");
        if (!(d > 0.0)) throw std::invalid_argument("Barrier: need d > 0");
    }

    BarrierKind kind_ = BarrierKind::rectangular;
    double V0_ = 1.0;
    double a_ = 1.0;
    double d_ = 1.0;
    double shift_ = 0.0;
    std::vector<double> samples_;
};

/*! \brief kappa = sqrt(2m|V0 - E|)/hbar for the (shifted) rectangular barrier,
 * with the regime flag.  E = (hbar k)^2 / 2m. */
struct KappaResult {
    double kappa = 0.0;
    Regime regime = Regime::under;
};

inline double energy_of(double k, const Units& u) {
    return (u.hbar * k) * (u.hbar * k) / (2.0 * u.mass);
}

/// Signed squared interior wavenumber deficit w = 2m(Veff - E)/hbar^2 = kappa0^2 - k^2.
inline double w_of(const Barrier& bar, double k, const Units& u) {
    const double veff = bar.height() + bar.shift();
    return 2.0 * u.mass * veff / (u.hbar * u.hbar) - k * k;
}

inline KappaResult kappa_of(const Barrier& bar, double k, const Units& u = {}) {
    if (!(k > 0.0)) throw std::invalid_argument("kappa_of: need k > 0");
    if (!bar.uniform_interior())
        throw std::invalid_argument("kappa_of: rectangular barriers only");
    const double w = w_of(bar, k, u);
    KappaResult r;
    r.kappa = std::sqrt(std::abs(w));
    const double veff = bar.height() + bar.shift();
    const double E = energy_of(k, u);
    if (std::abs(veff - E) <= 1e-14 * std::max(std::abs(veff), E))
        r.regime = Regime::degenerate;
    else
        r.regime = (w > 0.0) ? Regime::under : Regime::over;
    return r;
}

/*! \brief Closed-form rectangular tunneling parameters, valid in every regime.
 *
 * Both regimes (and the E = V0 limit) collapse to one expression in
 * y = w d^2:  T = [1 + (kappa0^2 d / 2k)^2 L(y)^2]^{-1},
 * tan(J - n pi) = (2k^2 - kappa0^2) d L(y) / (2k C(y)),   F = (L(y) >= 0) ? 0 : pi.
 * The n pi branch continuation applies over-barrier (poles of tan at the
 * transmission resonances); J is reported as the principal value, which is
 * what arg(a_out) of the matching route yields.
 */
inline TunnelingParams rect_tunneling_params(const Barrier& bar, double k,
                                             const Units& u = {}) {
    if (!(k > 0.0))
        throw std::invalid_argument("rect_tunneling_params: need k > 0");
    if (!bar.uniform_interior())
        throw std::invalid_argument("rect_tunneling_params: rectangular only");
    const double d = bar.d();
    const double w = w_of(bar, k, u);
    const double k02 = w + k * k;  // 2m*Veff/hbar^2, exact by construction
    const double y = w * d * d;
    const double Ly = kernels::L(y);
    const double Cy = kernels::C(y);

    TunnelingParams p;
    p.k = k;
    const double g = k02 * d / (2.0 * k) * Ly;
    p.T = 1.0 / (1.0 + g * g);
    p.R = g * g / (1.0 + g * g);
    // atan2 of (sinJ, cosJ)-proportional components lands on the correct
    // branch in both regimes (the over-barrier n*pi continuation is absorbed
    // by the sign of C); result is principal, matching arg(a_out).
    p.J = std::atan2((2.0 * k * k - k02) * d * Ly, 2.0 * k * Cy);
    p.F = (Ly >= 0.0) ? 0.0 : M_PI;
    return p;
}

}  // namespace tunnelsplit

#endif  // TUNNELSPLIT_BARRIER_HPP
