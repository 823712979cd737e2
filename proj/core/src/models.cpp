#include "invker/model.hpp"

#include <cmath>
#include <algorithm>
#include <stdexcept>

namespace invker {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

cx ipow(const cx& z, long k) {
    // z^k for integer k >= 0 by squaring; grids keep k modest but exactness matters.
    cx r{1.0, 0.0}, b = z;
    long e = k;
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

} // namespace

bool OmegaSet::contains(const Pt& xi) const {
    switch (kind) {
        case Kind::HalfLinePositive: return xi.x() > 0.0;
        case Kind::PuncturedLine: return xi.x() != 0.0;
        case Kind::FullLine: return true;
        case Kind::Plane: return true;
        case Kind::NonnegIntegers: return xi.x() >= -0.5;
        case Kind::AllIntegers: return true;
    }
    return false;
}

cx ModelSpace::kernel(const Pt& x, const Pt& y, const Pt& u, const Pt& v) const {
    if (!y_in_domain(y) || !y_in_domain(v))
        throw std::invalid_argument(id_ + ": kernel argument outside the Y domain");
    if (x.dim != group_.dim() || u.dim != group_.dim())
        throw std::invalid_argument(id_ + ": kernel group argument dimension mismatch");
    return kernel0(group_sub(x, u), v, y);
}

cx ModelSpace::L(const Pt& xi, const Pt& y, const Pt& v) const {
    if (!omega_.contains(xi)) return cx{0.0, 0.0};
    return std::conj(q(xi, y)) * q(xi, v);
}

Pt ModelSpace::group_sub(const Pt& a, const Pt& b) const {
    Pt d = a - b;
    if (group_.kind == GroupKind::Circle) d.c[0] = reduce_angle(d.c[0]);
    return d;
}

YGrid ModelSpace::y_grid(const Window& window, int n, const std::vector<double>& extra_breaks) const {
    if (window.degenerate()) throw std::invalid_argument("y_grid: degenerate window");
    YGrid g;
    g.window = window;
    if (y_dim_ == 1) {
        std::vector<double> active;
        for (double t : defaults_.y_breaks)
            if (t > window.lo[0] && t < window.hi[0]) active.push_back(t);
        for (double t : extra_breaks)
            if (t > window.lo[0] && t < window.hi[0]) active.push_back(t);
        std::sort(active.begin(), active.end());
        const int per_panel = std::max(4, n / static_cast<int>(active.size() + 1));
        std::vector<double> pts, wts;
        quad::composite_gl_panels(window.lo[0], window.hi[0], active, per_panel, pts, wts);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            Pt p = Pt::of(pts[i]);
            g.points.push_back(p);
            g.weights.push_back(wts[i] * y_density(p));
        }
    } else {
        std::vector<double> px, wx, py, wy;
        quad::composite_gl(window.lo[0], window.hi[0], {}, n, px, wx);
        quad::composite_gl(window.lo[1], window.hi[1], {}, n, py, wy);
        for (std::size_t i = 0; i < px.size(); ++i)
            for (std::size_t j = 0; j < py.size(); ++j) {
                Pt p = Pt::of(px[i], py[j]);
                g.points.push_back(p);
                g.weights.push_back(wx[i] * wy[j] * y_density(p));
            }
    }
    return g;
}

DualGrid ModelSpace::omega_grid(double omega_max, int n,
                                const std::vector<double>& extra_breaks) const {
    const double xmax = omega_max > 0.0 ? omega_max : defaults_.omega_max;
    const int nn = n > 0 ? n : defaults_.n_omega;
    const double eps = defaults_.omega_eps;
    DualGrid g;
    g.group = group_;

    auto gl_piece = [&](double a, double b, int count) {
        // geometric panels with equal node counts so decaying integrands keep
        // interior resolution regardless of the window length
        std::vector<double> brk;
        const double span = b - a;
        for (double f : {0.002, 0.01, 0.04, 0.12, 0.3, 0.6}) brk.push_back(a + f * span);
        brk.insert(brk.end(), extra_breaks.begin(), extra_breaks.end());
        std::sort(brk.begin(), brk.end());
        const int per_panel = std::max(6, count / static_cast<int>(brk.size() + 1));
        std::vector<double> pts, wts;
        quad::composite_gl_panels(a, b, brk, per_panel, pts, wts);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            g.points.push_back(Pt::of(pts[i]));
            g.weights.push_back(wts[i]);
        }
    };

    switch (omega_.kind) {
        case OmegaSet::Kind::HalfLinePositive:
            g.window = Window::interval(eps, xmax);
            gl_piece(eps, xmax, nn);
            break;
        case OmegaSet::Kind::PuncturedLine: {
            g.window = Window::interval(-xmax, xmax);
            const double lo = eps > 0.0 ? eps : 1e-6;
            gl_piece(-xmax, -lo, nn / 2);
            gl_piece(lo, xmax, nn / 2);
            break;
        }
        case OmegaSet::Kind::FullLine: {
            g.window = Window::interval(-xmax, xmax);
            std::vector<double> brk;
            for (double f : {-0.5, -0.15, -0.05, 0.0, 0.05, 0.15, 0.5}) brk.push_back(f * xmax);
            brk.insert(brk.end(), extra_breaks.begin(), extra_breaks.end());
            std::sort(brk.begin(), brk.end());
            const int per_panel = std::max(6, nn / static_cast<int>(brk.size() + 1));
            std::vector<double> pts, wts;
            quad::composite_gl_panels(-xmax, xmax, brk, per_panel, pts, wts);
            for (std::size_t i = 0; i < pts.size(); ++i) {
                g.points.push_back(Pt::of(pts[i]));
                g.weights.push_back(wts[i]);
            }
            break;
        }
        case OmegaSet::Kind::Plane: {
            g.window = Window::box(-xmax, xmax, -xmax, xmax);
            std::vector<double> brk;
            for (double f : {-0.5, -0.15, 0.0, 0.15, 0.5}) brk.push_back(f * xmax);
            const int per_panel = std::max(6, nn / 6);
            std::vector<double> pts, wts;
            quad::composite_gl_panels(-xmax, xmax, brk, per_panel, pts, wts);
            for (std::size_t i = 0; i < pts.size(); ++i)
                for (std::size_t j = 0; j < pts.size(); ++j) {
                    g.points.push_back(Pt::of(pts[i], pts[j]));
                    g.weights.push_back(wts[i] * wts[j]);
                }
            break;
        }
        case OmegaSet::Kind::NonnegIntegers: {
            const long kmax = static_cast<long>(std::llround(xmax));
            g.window = Window::interval(0.0, static_cast<double>(kmax));
            for (long k = 0; k <= kmax; ++k) {
                g.points.push_back(Pt::of(static_cast<double>(k)));
                g.weights.push_back(1.0);
            }
            break;
        }
        case OmegaSet::Kind::AllIntegers: {
            const long kmax = static_cast<long>(std::llround(xmax));
            g.window = Window::interval(-static_cast<double>(kmax), static_cast<double>(kmax));
            for (long k = -kmax; k <= kmax; ++k) {
                g.points.push_back(Pt::of(static_cast<double>(k)));
                g.weights.push_back(1.0);
            }
            break;
        }
    }
    return g;
}

std::vector<Pt> ModelSpace::y0_candidates() const {
    const Window& w = defaults_.y_window;
    std::vector<Pt> c;
    if (y_dim_ == 1) {
        c.push_back(Pt::of(w.lo[0] + 0.50 * w.extent(0)));
        c.push_back(Pt::of(w.lo[0] + 0.25 * w.extent(0)));
        c.push_back(Pt::of(w.lo[0] + 0.75 * w.extent(0)));
    } else {
        c.push_back(Pt::of(w.lo[0] + 0.50 * w.extent(0), w.lo[1] + 0.50 * w.extent(1)));
        c.push_back(Pt::of(w.lo[0] + 0.25 * w.extent(0), w.lo[1] + 0.25 * w.extent(1)));
        c.push_back(Pt::of(w.lo[0] + 0.75 * w.extent(0), w.lo[1] + 0.75 * w.extent(1)));
    }
    return c;
}

// ---------------------------------------------------------------------------
// Vertical operators in the Bergman space over the upper half-plane.
// K_{0,y}(u,v) = -1/(pi (u + i(y+v))^2), Omega = (0,inf),
// q_xi(y) = 2 sqrt(pi xi) e^{-2 pi y xi}.
// ---------------------------------------------------------------------------
class BergmanUhpVertical final : public ModelSpace {
public:
    BergmanUhpVertical()
        : ModelSpace("bergman-uhp-vertical", GroupDescriptor::real_line(), 1,
                     OmegaSet{OmegaSet::Kind::HalfLinePositive},
                     ModelDefaults{Window::interval(-6.0, 6.0), 128, Window::interval(0.0, 4.0),
                                   32, {0.02, 0.08, 0.25, 0.8, 2.0}, 50.0, 400, 1e-6}) {}

    cx kernel0(const Pt& u, const Pt& base_y, const Pt& v) const override {
        const cx z{u.x(), base_y.x() + v.x()};
        return -1.0 / (kPi * z * z);
    }

    cx q(const Pt& xi, const Pt& y) const override {
        if (!omega_.contains(xi)) throw std::domain_error(id_ + ": q needs xi in Omega=(0,inf)");
        return 2.0 * std::sqrt(kPi * xi.x()) * std::exp(-kTwoPi * y.x() * xi.x());
    }

    bool y_in_domain(const Pt& y) const override { return y.dim == 1 && y.x() > 0.0; }
    double y_density(const Pt&) const override { return 1.0; }
    OracleWindow oracle_window() const override { return {80.0, 160.0, 8.0, true}; }

    std::vector<Pt> y0_candidates() const override {
        // small y first: the window-convolution bias of the recovery scales
        // with the q-ratio curvature (2 pi y0)^2, and small y0 keeps |q|
        // usable across the whole frequency window
        return {Pt::of(0.4), Pt::of(0.15), Pt::of(0.04), Pt::of(2.0), Pt::of(1.0), Pt::of(3.0)};
    }
};

// ---------------------------------------------------------------------------
// Vertical operators in the harmonic Bergman space: two conjugate Bergman
// terms, Omega = R \ {0}, q_xi(y) = 2 sqrt(pi |xi|) e^{-2 pi y |xi|}.
// ---------------------------------------------------------------------------
class HarmonicBergmanUhpVertical final : public ModelSpace {
public:
    HarmonicBergmanUhpVertical()
        : ModelSpace("harmonic-bergman-uhp-vertical", GroupDescriptor::real_line(), 1,
                     OmegaSet{OmegaSet::Kind::PuncturedLine},
                     ModelDefaults{Window::interval(-6.0, 6.0), 128, Window::interval(0.0, 4.0),
                                   32, {0.02, 0.08, 0.25, 0.8, 2.0}, 50.0, 400, 1e-6}) {}

    cx kernel0(const Pt& u, const Pt& base_y, const Pt& v) const override {
        const double c = base_y.x() + v.x();
        const cx zp{u.x(), c}, zm{u.x(), -c};
        return -1.0 / (kPi * zp * zp) - 1.0 / (kPi * zm * zm);
    }

    cx q(const Pt& xi, const Pt& y) const override {
        if (!omega_.contains(xi)) throw std::domain_error(id_ + ": q needs xi != 0");
        const double a = std::abs(xi.x());
        return 2.0 * std::sqrt(kPi * a) * std::exp(-kTwoPi * y.x() * a);
    }

    bool y_in_domain(const Pt& y) const override { return y.dim == 1 && y.x() > 0.0; }
    double y_density(const Pt&) const override { return 1.0; }
    OracleWindow oracle_window() const override { return {80.0, 160.0, 8.0, true}; }

    std::vector<Pt> y0_candidates() const override {
        return {Pt::of(0.4), Pt::of(0.15), Pt::of(0.04), Pt::of(2.0), Pt::of(1.0), Pt::of(3.0)};
    }
};

// ---------------------------------------------------------------------------
// Radial operators in the Bergman space over the unit disk, pulled back to
// the circle x [0,1) with p = sqrt(2 pi).
// K_{0,s}(theta, r) = 2 / (1 - r s e^{i theta})^2, L_{k,s}(r) = 2(k+1)(rs)^k,
// q_k(r) = sqrt(2(k+1)) r^k, Omega = N_0, d lambda = r dr.
// ---------------------------------------------------------------------------
class BergmanDiskRadial final : public ModelSpace {
public:
    BergmanDiskRadial()
        : ModelSpace("bergman-disk-radial", GroupDescriptor::circle(), 1,
                     OmegaSet{OmegaSet::Kind::NonnegIntegers},
                     ModelDefaults{Window::interval(0.0, kTwoPi), 65, Window::interval(0.0, 1.0),
                                   40, {}, 32.0, 0, 0.0}) {}

    cx kernel0(const Pt& u, const Pt& base_y, const Pt& v) const override {
        const cx t = 1.0 - v.x() * base_y.x() * std::polar(1.0, u.x());
        return 2.0 / (t * t);
    }

    cx L(const Pt& xi, const Pt& y, const Pt& v) const override {
        const long k = std::lround(xi.x());
        if (k < 0) return cx{0.0, 0.0};
        return 2.0 * (k + 1.0) * ipow(cx{y.x() * v.x(), 0.0}, k);
    }

    cx q(const Pt& xi, const Pt& y) const override {
        const long k = std::lround(xi.x());
        if (k < 0) throw std::domain_error(id_ + ": q needs k >= 0");
        return std::sqrt(2.0 * (k + 1.0)) * std::pow(y.x(), static_cast<double>(k));
    }

    bool y_in_domain(const Pt& y) const override { return y.dim == 1 && y.x() >= 0.0 && y.x() < 1.0; }
    double y_density(const Pt& v) const override { return v.x(); }
};

// ---------------------------------------------------------------------------
// Radial operators in the harmonic Bergman space over the disk.
// L_{k,s}(r) = 2(|k|+1)(rs)^{|k|}, Omega = Z.
// ---------------------------------------------------------------------------
class HarmonicBergmanDiskRadial final : public ModelSpace {
public:
    HarmonicBergmanDiskRadial()
        : ModelSpace("harmonic-bergman-disk-radial", GroupDescriptor::circle(), 1,
                     OmegaSet{OmegaSet::Kind::AllIntegers},
                     ModelDefaults{Window::interval(0.0, kTwoPi), 65, Window::interval(0.0, 1.0),
                                   40, {}, 32.0, 0, 0.0}) {}

    cx kernel0(const Pt& u, const Pt& base_y, const Pt& v) const override {
        const cx e = std::polar(1.0, u.x());
        const cx tp = 1.0 - v.x() * base_y.x() * e;
        const cx tm = 1.0 - v.x() * base_y.x() * std::conj(e);
        return 2.0 / (tp * tp) + 2.0 / (tm * tm) - 2.0;
    }

    cx L(const Pt& xi, const Pt& y, const Pt& v) const override {
        const long k = std::labs(std::lround(xi.x()));
        return 2.0 * (k + 1.0) * ipow(cx{y.x() * v.x(), 0.0}, k);
    }

    cx q(const Pt& xi, const Pt& y) const override {
        const long k = std::labs(std::lround(xi.x()));
        return std::sqrt(2.0 * (k + 1.0)) * std::pow(y.x(), static_cast<double>(k));
    }

    bool y_in_domain(const Pt& y) const override { return y.dim == 1 && y.x() >= 0.0 && y.x() < 1.0; }
    double y_density(const Pt& v) const override { return v.x(); }
};

// ---------------------------------------------------------------------------
// Angular operators in the Bergman space over the upper half-plane, in
// log-polar coordinates (r = log radius in G = R, theta in Y = (0, pi)).
// L_{xi,eta}(theta) = 4 pi xi e^{-2 pi xi (theta+eta)} / (1 - e^{-4 pi^2 xi}),
// with the xi = 0 value 1/pi by the removable singularity.
// ---------------------------------------------------------------------------
class BergmanUhpAngular final : public ModelSpace {
public:
    BergmanUhpAngular()
        : ModelSpace("bergman-uhp-angular", GroupDescriptor::real_line(), 1,
                     OmegaSet{OmegaSet::Kind::FullLine},
                     ModelDefaults{Window::interval(-10.0, 10.0), 128,
                                   Window::interval(0.05, kPi - 0.05), 32,
                                   {0.15, 0.5, 1.2, 2.2, 2.8}, 8.0, 400, 0.0}) {}

    cx kernel0(const Pt& u, const Pt& base_y, const Pt& v) const override {
        const cx s = std::sinh(cx{u.x() / 2.0, (base_y.x() + v.x()) / 2.0});
        return -1.0 / (4.0 * kPi * s * s);
    }

    cx q(const Pt& xi, const Pt& y) const override {
        // sqrt(4 pi xi / (1 - e^{-4 pi^2 xi})) e^{-2 pi xi theta}, log-space
        // for large |xi| so neither factor overflows before they combine.
        const double x = xi.x(), th = y.x();
        if (x == 0.0) return std::sqrt(1.0 / kPi);
        const double m = std::abs(x);
        double logC;
        if (x > 0.0)
            logC = std::log(4.0 * kPi * m) - std::log1p(-std::exp(-4.0 * kPi * kPi * m));
        else
            logC = std::log(4.0 * kPi * m) - 4.0 * kPi * kPi * m -
                   std::log1p(-std::exp(-4.0 * kPi * kPi * m));
        return std::exp(0.5 * logC - kTwoPi * x * th);
    }

    cx L(const Pt& xi, const Pt& y, const Pt& v) const override {
        const double x = xi.x();
        if (std::abs(x) < 1e-9) {
            // 4 pi xi / (-expm1(-4 pi^2 xi)) -> 1/pi as xi -> 0
            const double c = std::abs(x) == 0.0
                                 ? 1.0 / kPi
                                 : 4.0 * kPi * x / (-std::expm1(-4.0 * kPi * kPi * x));
            return c * std::exp(-kTwoPi * x * (y.x() + v.x()));
        }
        return std::conj(q(xi, y)) * q(xi, v);
    }

    bool y_in_domain(const Pt& y) const override { return y.dim == 1 && y.x() > 0.0 && y.x() < kPi; }
    double y_density(const Pt&) const override { return 1.0; }
    OracleWindow oracle_window() const override { return {25.0, 40.0, 8.0, true}; }

    std::vector<Pt> y0_candidates() const override {
        // positive frequencies want theta near 0; negative ones near pi
        return {Pt::of(0.3), Pt::of(0.1), Pt::of(kPi / 2.0), Pt::of(2.9), Pt::of(3.05),
                Pt::of(0.82), Pt::of(2.32)};
    }
};

// ---------------------------------------------------------------------------
// Translation-invariant operators in the Steinwart-Hush-Scovel space.
// L_{xi,v}(y) = (pi^{n/2}/alpha^n) e^{-pi^2 |xi|^2/alpha^2 - 2 pi <y+v, xi>},
// q split symmetrically so it stays real positive. Omega = R^n.
// ---------------------------------------------------------------------------
class ShsGaussian final : public ModelSpace {
public:
    ShsGaussian(double alpha, int n)
        : ModelSpace(n == 1 ? "shs-gaussian" : "shs-gaussian-2d",
                     n == 1 ? GroupDescriptor::real_line() : GroupDescriptor::real_plane(), n,
                     OmegaSet{n == 1 ? OmegaSet::Kind::FullLine : OmegaSet::Kind::Plane},
                     n == 1 ? ModelDefaults{Window::interval(-5.0, 5.0), 96,
                                            Window::interval(-3.0, 3.0), 32, {}, 4.0, 300, 0.0}
                            : ModelDefaults{Window::box(-4.0, 4.0, -4.0, 4.0), 24,
                                            Window::box(-2.5, 2.5, -2.5, 2.5), 16, {}, 3.0, 72,
                                            0.0}),
          alpha_(alpha),
          n_(n) {
        if (!(alpha > 0.0)) throw std::invalid_argument("shs-gaussian: alpha must be positive");
        if (n != 1 && n != 2) throw std::invalid_argument("shs-gaussian: n must be 1 or 2");
    }

    double alpha() const { return alpha_; }

    cx kernel0(const Pt& u, const Pt& base_y, const Pt& v) const override {
        const double a2 = alpha_ * alpha_;
        double re = 0.0, im = 0.0;
        for (int j = 0; j < n_; ++j) {
            const double s = base_y.c[j] + v.c[j];
            re += -a2 * u.c[j] * u.c[j] + a2 * s * s;
            im += -2.0 * a2 * u.c[j] * s;
        }
        return std::exp(re) * std::polar(1.0, im);
    }

    cx q(const Pt& xi, const Pt& y) const override {
        const double a2 = alpha_ * alpha_;
        double ex = 0.0;
        for (int j = 0; j < n_; ++j)
            ex += -kPi * kPi * xi.c[j] * xi.c[j] / (2.0 * a2) - kTwoPi * y.c[j] * xi.c[j];
        const double pref = std::pow(kPi, 0.25 * n_) / std::pow(alpha_, 0.5 * n_);
        return pref * std::exp(ex);
    }

    bool y_in_domain(const Pt& y) const override { return y.dim == n_; }

    double y_density(const Pt& v) const override {
        const double a2 = alpha_ * alpha_;
        double d = 1.0;
        for (int j = 0; j < n_; ++j)
            d *= (2.0 * a2 / kPi) * std::exp(-4.0 * a2 * v.c[j] * v.c[j]);
        return d;
    }

    OracleWindow oracle_window() const override {
        return {6.0 / alpha_, 9.0 / alpha_, 6.0 * alpha_, false};
    }

    std::vector<Pt> y0_candidates() const override {
        // q ~ e^{-pi^2 xi^2 / (2 a^2) - 2 pi <y, xi>}: y opposite in sign to xi
        // keeps high-frequency fibers above threshold
        std::vector<double> ladder{0.0, -0.75, 0.75, -1.5, 1.5, -2.25, 2.25};
        std::vector<Pt> c;
        if (n_ == 1) {
            for (double t : ladder) c.push_back(Pt::of(t / alpha_));
        } else {
            for (double t : ladder) c.push_back(Pt::of(t / alpha_, t / alpha_));
            for (double t : {0.75, 1.5, 2.25}) {
                c.push_back(Pt::of(t / alpha_, -t / alpha_));
                c.push_back(Pt::of(-t / alpha_, t / alpha_));
            }
        }
        return c;
    }

private:
    double alpha_;
    int n_;
};

// ---------------------------------------------------------------------------
// Vertical operators in the wavelet space of the Shannon band wavelet,
// defined directly in the spectral domain: F psi = (ln 2)^{-1/2} 1_{1<=|s|<=2}.
// q_xi(y) = sqrt(y) (F psi)(y xi), d lambda = dv / v^2, Omega = R \ {0}.
// ---------------------------------------------------------------------------
class WaveletShannon final : public ModelSpace {
public:
    WaveletShannon()
        : ModelSpace("wavelet-shannon", GroupDescriptor::real_line(), 1,
                     OmegaSet{OmegaSet::Kind::PuncturedLine},
                     ModelDefaults{Window::interval(-40.0, 40.0), 256,
                                   Window::interval(0.125, 8.0), 48,
                                   {0.25, 0.5, 1.0, 2.0, 4.0}, 8.0, 320, 0.25}) {}

    cx kernel0(const Pt& u, const Pt& base_y, const Pt& v) const override {
        // inverse Fourier integral of the band product: two symmetric bands
        const double yy = base_y.x(), vv = v.x();
        const double a = std::max(1.0 / yy, 1.0 / vv);
        const double b = std::min(2.0 / yy, 2.0 / vv);
        if (b <= a) return cx{0.0, 0.0};
        const double amp = std::sqrt(yy * vv) / kLn2;
        const double x = u.x();
        if (std::abs(x) < 1e-9) {
            const double w = kTwoPi * x;
            // series of (sin(wb)-sin(wa))/(pi x) around x=0
            return amp * (2.0 * (b - a) - w * w * (b * b * b - a * a * a) / 3.0);
        }
        return amp * (std::sin(kTwoPi * x * b) - std::sin(kTwoPi * x * a)) / (kPi * x);
    }

    cx q(const Pt& xi, const Pt& y) const override {
        if (!omega_.contains(xi)) throw std::domain_error(id_ + ": q needs xi != 0");
        return std::sqrt(y.x()) * shannon_wavelet_spectrum(y.x() * xi.x());
    }

    bool y_in_domain(const Pt& y) const override { return y.dim == 1 && y.x() > 0.0; }
    double y_density(const Pt& v) const override { return 1.0 / (v.x() * v.x()); }

    std::vector<Pt> y0_candidates() const override {
        // q_xi(y) vanishes off 1 <= |y xi| <= 2; a dyadic ladder covers every
        // grid frequency in [2/y_max, ...] U ... with at least one candidate.
        return {Pt::of(2.0), Pt::of(1.0), Pt::of(0.5), Pt::of(4.0), Pt::of(0.25), Pt::of(0.125),
                Pt::of(2.8284271247461903), Pt::of(1.4142135623730951), Pt::of(0.7071067811865476),
                Pt::of(0.35355339059327373)};
    }

    OracleWindow oracle_window() const override { return {80.0, 160.0, 10.0, true}; }

    std::vector<double> omega_breaks_for(const Pt& y, const Pt& v) const override {
        std::vector<double> b;
        for (double t : {y.x(), v.x()})
            if (t > 0.0) {
                b.push_back(1.0 / t);
                b.push_back(2.0 / t);
                b.push_back(-1.0 / t);
                b.push_back(-2.0 / t);
            }
        return b;
    }
};

double shannon_wavelet_spectrum(double s) {
    const double a = std::abs(s);
    if (a >= 1.0 && a <= 2.0) return 1.0 / std::sqrt(kLn2);
    return 0.0;
}

const std::vector<std::string>& model_ids() {
    static const std::vector<std::string> ids{
        "bergman-uhp-vertical",     "harmonic-bergman-uhp-vertical", "bergman-disk-radial",
        "harmonic-bergman-disk-radial", "bergman-uhp-angular",       "shs-gaussian",
        "wavelet-shannon"};
    return ids;
}

std::shared_ptr<const ModelSpace> make_model(const std::string& id, const ModelParams& p) {
    if (id == "bergman-uhp-vertical") return std::make_shared<BergmanUhpVertical>();
    if (id == "harmonic-bergman-uhp-vertical") return std::make_shared<HarmonicBergmanUhpVertical>();
    if (id == "bergman-disk-radial") return std::make_shared<BergmanDiskRadial>();
    if (id == "harmonic-bergman-disk-radial") return std::make_shared<HarmonicBergmanDiskRadial>();
    if (id == "bergman-uhp-angular") return std::make_shared<BergmanUhpAngular>();
    if (id == "shs-gaussian") return std::make_shared<ShsGaussian>(p.alpha, p.n);
    if (id == "wavelet-shannon") return std::make_shared<WaveletShannon>();
    throw std::invalid_argument("make_model: unknown model id '" + id + "'");
}

cx L_numeric_oracle(const ModelSpace& m, const Pt& xi, const Pt& y, const Pt& v,
                    double resolution) {
    const GroupDescriptor& g = m.group();

    if (g.kind == GroupKind::Circle) {
        const int n = std::max(64, static_cast<int>(std::lround(512 * resolution)));
        SampledGrid grid = build_grid(g, Window::interval(0.0, kTwoPi), n, QuadRule::Trapezoid);
        std::vector<cx> samples(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) samples[i] = m.kernel0(grid.points[i], y, v);
        DualGrid one;
        one.group = g;
        one.points = {xi};
        one.weights = {1.0};
        return fourier_forward(g, samples, grid, one)[0];
    }

    const OracleWindow ow = m.oracle_window();
    const double edge = ow.edge > 0.0 ? ow.edge : 40.0;
    const double core = ow.core > 0.0 ? ow.core : edge;
    const double fmax = std::max(std::abs(xi.c[0]), std::abs(xi.c[1])) + ow.band_pad;
    const int n = std::max(256, static_cast<int>(std::ceil(2.0 * edge * 2.5 * fmax * resolution)));
    const double h = 2.0 * edge / n;

    if (g.dim() == 1) {
        cx acc{0.0, 0.0};
        for (int i = 0; i <= n; ++i) {
            const double u = -edge + h * i;
            double w = h * (i == 0 || i == n ? 0.5 : 1.0);
            if (ow.taper) w *= quad::smooth_cutoff(u, core, edge);
            if (w == 0.0) continue;
            acc += w * m.kernel0(Pt::of(u), y, v) * std::conj(pairing(g, Pt::of(u), xi));
        }
        return acc;
    }

    // 2D tensor: capped per-axis count keeps the tensor grid desk-sized.
    const int na = std::min(n, 900);
    const double ha = 2.0 * edge / na;
    cx acc{0.0, 0.0};
    for (int i = 0; i <= na; ++i) {
        const double u0 = -edge + ha * i;
        double w0 = ha * (i == 0 || i == na ? 0.5 : 1.0);
        if (ow.taper) w0 *= quad::smooth_cutoff(u0, core, edge);
        if (w0 == 0.0) continue;
        for (int j = 0; j <= na; ++j) {
            const double u1 = -edge + ha * j;
            double w1 = ha * (j == 0 || j == na ? 0.5 : 1.0);
            if (ow.taper) w1 *= quad::smooth_cutoff(u1, core, edge);
            if (w1 == 0.0) continue;
            const Pt u = Pt::of(u0, u1);
            acc += w0 * w1 * m.kernel0(u, y, v) * std::conj(pairing(g, u, xi));
        }
    }
    return acc;
}

double wavelet_admissibility_check(const ModelSpace& m, int resolution) {
    if (m.id() != "wavelet-shannon")
        throw std::invalid_argument("wavelet_admissibility_check: needs the wavelet-shannon model");
    const int n = std::max(8, resolution);
    double worst = 0.0;
    for (double xi : {1.0, -3.0, 0.5, -0.7, 2.5, -1.25}) {
        // integral of |F psi(t xi)|^2 dt/t over t = e^s; support edges at
        // |xi| e^s in {1, 2} give exact panel alignment on the log grid.
        const double s0 = -std::log(std::abs(xi));
        const double s1 = s0 + kLn2;
        std::vector<double> pts, wts;
        quad::gauss_legendre_ab(n, s0, s1, pts, wts);
        double val = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double f = shannon_wavelet_spectrum(std::exp(pts[i]) * xi);
            val += wts[i] * f * f;
        }
        worst = std::max(worst, std::abs(val - 1.0));
    }
    return worst;
}

} // namespace invker
