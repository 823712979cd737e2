#include "invker/group.hpp"

#include <cmath>
#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace invker {

const GroupDescriptor& GroupDescriptor::real_line() {
    static const GroupDescriptor g{GroupKind::RealLine, DualKind::RealLine,
                                   "Lebesgue measure on R, dual Lebesgue"};
    return g;
}

const GroupDescriptor& GroupDescriptor::circle() {
    static const GroupDescriptor g{GroupKind::Circle, DualKind::Integers,
                                   "normalized d(theta)/2pi, dual counting measure on Z"};
    return g;
}

const GroupDescriptor& GroupDescriptor::real_plane() {
    static const GroupDescriptor g{GroupKind::RealPlane, DualKind::RealPlane,
                                   "Lebesgue measure on R^2, dual Lebesgue"};
    return g;
}

double reduce_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    return t;
}

cx pairing(const GroupDescriptor& g, const Pt& x, const Pt& xi) {
    if (x.dim != g.dim() || xi.dim != g.dim())
        throw std::invalid_argument("pairing: point dimension does not match group kind");
    switch (g.kind) {
        case GroupKind::RealLine:
            return std::polar(1.0, kTwoPi * x.x() * xi.x());
        case GroupKind::Circle:
            // k integer; exact phase does not depend on the 2pi reduction.
            return std::polar(1.0, xi.x() * x.x());
        case GroupKind::RealPlane:
            return std::polar(1.0, kTwoPi * (x.x() * xi.x() + x.y() * xi.y()));
    }
    throw std::logic_error("pairing: unknown group kind");
}

namespace quad {

namespace {

// Newton iteration on the Legendre recurrence; standard and accurate to ~1e-15.
void gl_compute(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

} // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    if (n == 1) {
        nodes = {0.0};
        weights = {2.0};
        return;
    }
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) {
        std::vector<double> x, w;
        gl_compute(n, x, w);
        it = cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first;
    }
    nodes = it->second.first;
    weights = it->second.second;
}

void gauss_legendre_ab(int n, double a, double b, std::vector<double>& nodes,
                       std::vector<double>& weights) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    nodes.resize(n);
    weights.resize(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        nodes[i] = mid + half * x[i];
        weights[i] = half * w[i];
    }
}

void composite_gl(double a, double b, const std::vector<double>& breakpoints, int n_total,
                  std::vector<double>& nodes, std::vector<double>& weights) {
    std::vector<double> edges{a};
    for (double t : breakpoints)
        if (t > a && t < b) edges.push_back(t);
    edges.push_back(b);
    nodes.clear();
    weights.clear();
    const double total = b - a;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double pa = edges[p], pb = edges[p + 1];
        int n = std::max(4, static_cast<int>(std::lround(n_total * (pb - pa) / total)));
        std::vector<double> xn, wn;
        gauss_legendre_ab(n, pa, pb, xn, wn);
        nodes.insert(nodes.end(), xn.begin(), xn.end());
        weights.insert(weights.end(), wn.begin(), wn.end());
    }
}

void composite_gl_panels(double a, double b, const std::vector<double>& breakpoints,
                         int n_per_panel, std::vector<double>& nodes,
                         std::vector<double>& weights) {
    std::vector<double> edges{a};
    for (double t : breakpoints)
        if (t > a && t < b) edges.push_back(t);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    nodes.clear();
    weights.clear();
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        std::vector<double> xn, wn;
        gauss_legendre_ab(n_per_panel, edges[p], edges[p + 1], xn, wn);
        nodes.insert(nodes.end(), xn.begin(), xn.end());
        weights.insert(weights.end(), wn.begin(), wn.end());
    }
}

double smooth_cutoff(double u, double core, double edge) {
    const double a = std::abs(u);
    if (a <= core) return 1.0;
    if (a >= edge) return 0.0;
    // exp(-1/t) bump blend; all derivatives vanish at both ends.
    const double t = (a - core) / (edge - core);
    const double s1 = std::exp(-1.0 / (1.0 - t));
    const double s0 = std::exp(-1.0 / t);
    return s1 / (s0 + s1);
}

} // namespace quad

namespace {

void build_axis(const Window& w, int axis, int n, QuadRule rule, std::vector<double>& pts,
                std::vector<double>& wts) {
    const double a = w.lo[axis], b = w.hi[axis];
    if (rule == QuadRule::GaussLegendre) {
        quad::gauss_legendre_ab(n, a, b, pts, wts);
        return;
    }
    pts.resize(n);
    wts.resize(n);
    if (n == 1) {  // midpoint rule stand-in
        pts[0] = 0.5 * (a + b);
        wts[0] = b - a;
        return;
    }
    const double h = (b - a) / (n - 1);
    for (int i = 0; i < n; ++i) {
        pts[i] = a + h * i;
        wts[i] = (i == 0 || i == n - 1) ? 0.5 * h : h;
    }
}

} // namespace

SampledGrid build_grid(const GroupDescriptor& g, const Window& window, int n, QuadRule rule) {
    if (n < 1) throw std::invalid_argument("build_grid: n must be >= 1");
    if (window.dim != g.dim()) throw std::invalid_argument("build_grid: window dimension mismatch");
    if (window.degenerate()) throw std::invalid_argument("build_grid: degenerate window");

    SampledGrid grid;
    grid.group = g;
    grid.window = window;

    switch (g.kind) {
        case GroupKind::RealLine: {
            std::vector<double> pts, wts;
            build_axis(window, 0, n, rule, pts, wts);
            for (int i = 0; i < n; ++i) {
                grid.points.push_back(Pt::of(pts[i]));
                grid.weights.push_back(wts[i]);
            }
            break;
        }
        case GroupKind::RealPlane: {
            std::vector<double> px, wx, py, wy;
            build_axis(window, 0, n, rule, px, wx);
            build_axis(window, 1, n, rule, py, wy);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    grid.points.push_back(Pt::of(px[i], py[j]));
                    grid.weights.push_back(wx[i] * wy[j]);
                }
            break;
        }
        case GroupKind::Circle: {
            const double a = window.lo[0], b = window.hi[0];
            if (a < -1e-12 || b > kTwoPi + 1e-12)
                throw std::invalid_argument("build_grid: Circle window must lie in [0, 2pi)");
            const bool full = (b - a) >= kTwoPi - 1e-12;
            if (full && rule == QuadRule::Trapezoid) {
                // periodic rule: equispaced, equal weights, no endpoint duplication
                const double h = kTwoPi / n;
                for (int i = 0; i < n; ++i) {
                    grid.points.push_back(Pt::of(reduce_angle(a + h * i)));
                    grid.weights.push_back(h / kTwoPi);
                }
            } else {
                std::vector<double> pts, wts;
                build_axis(window, 0, n, rule, pts, wts);
                for (int i = 0; i < n; ++i) {
                    grid.points.push_back(Pt::of(reduce_angle(pts[i])));
                    grid.weights.push_back(wts[i] / kTwoPi);
                }
            }
            break;
        }
    }
    return grid;
}

DualGrid build_dual_grid(const GroupDescriptor& g, const Window& window, int n, QuadRule rule) {
    if (window.degenerate() && g.kind != GroupKind::Circle)
        throw std::invalid_argument("build_dual_grid: degenerate window");

    DualGrid grid;
    grid.group = g;
    grid.window = window;

    if (g.kind == GroupKind::Circle) {
        const long kmin = static_cast<long>(std::ceil(window.lo[0] - 1e-12));
        const long kmax = static_cast<long>(std::floor(window.hi[0] + 1e-12));
        if (kmax < kmin) throw std::invalid_argument("build_dual_grid: empty integer range");
        for (long k = kmin; k <= kmax; ++k) {
            grid.points.push_back(Pt::of(static_cast<double>(k)));
            grid.weights.push_back(1.0);
        }
        return grid;
    }

    if (n < 1) throw std::invalid_argument("build_dual_grid: n must be >= 1");
    const int dim = g.dim();
    if (window.dim != dim) throw std::invalid_argument("build_dual_grid: window dimension mismatch");
    if (dim == 1) {
        std::vector<double> pts, wts;
        build_axis(window, 0, n, rule, pts, wts);
        for (int i = 0; i < n; ++i) {
            grid.points.push_back(Pt::of(pts[i]));
            grid.weights.push_back(wts[i]);
        }
    } else {
        std::vector<double> px, wx, py, wy;
        build_axis(window, 0, n, rule, px, wx);
        build_axis(window, 1, n, rule, py, wy);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                grid.points.push_back(Pt::of(px[i], py[j]));
                grid.weights.push_back(wx[i] * wy[j]);
            }
    }
    return grid;
}

std::vector<cx> fourier_forward(const GroupDescriptor& g, const std::vector<cx>& samples,
                                const SampledGrid& grid, const DualGrid& duals) {
    if (samples.size() != grid.size())
        throw std::invalid_argument("fourier_forward: samples/grid length mismatch");
    std::vector<cx> out(duals.size(), cx{0.0, 0.0});
    for (std::size_t j = 0; j < duals.size(); ++j) {
        cx acc{0.0, 0.0};
        const Pt& xi = duals.points[j];
        for (std::size_t i = 0; i < grid.size(); ++i)
            acc += grid.weights[i] * samples[i] * std::conj(pairing(g, grid.points[i], xi));
        out[j] = acc;
    }
    return out;
}

std::vector<cx> fourier_inverse(const GroupDescriptor& g, const std::vector<cx>& dual_samples,
                                const DualGrid& duals, const SampledGrid& grid) {
    if (dual_samples.size() != duals.size())
        throw std::invalid_argument("fourier_inverse: samples/dual-grid length mismatch");
    std::vector<cx> out(grid.size(), cx{0.0, 0.0});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        cx acc{0.0, 0.0};
        const Pt& x = grid.points[i];
        for (std::size_t j = 0; j < duals.size(); ++j)
            acc += duals.weights[j] * dual_samples[j] * pairing(g, x, duals.points[j]);
        out[i] = acc;
    }
    return out;
}

} // namespace invker
