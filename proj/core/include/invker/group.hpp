#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

/// Locally compact abelian groups at desk scale: the real line, the circle
/// R/2piZ, and the real plane, together with Haar-measure quadrature grids
/// over the group and its dual, the duality pairing, and direct-sum Fourier
/// transforms between the two.
namespace invker {

using cx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// A point of a group, dual group, or fiber domain. One or two coordinates.
struct Pt {
    std::array<double, 2> c{0.0, 0.0};
    int dim = 1;

    static Pt of(double x) { return Pt{{x, 0.0}, 1}; }
    static Pt of(double x, double y) { return Pt{{x, y}, 2}; }

    double x() const { return c[0]; }
    double y() const { return c[1]; }

    Pt operator+(const Pt& o) const { return Pt{{c[0] + o.c[0], c[1] + o.c[1]}, dim}; }
    Pt operator-(const Pt& o) const { return Pt{{c[0] - o.c[0], c[1] - o.c[1]}, dim}; }
    Pt operator-() const { return Pt{{-c[0], -c[1]}, dim}; }
};

/// Axis-aligned interval (dim 1) or box (dim 2).
struct Window {
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{0.0, 0.0};
    int dim = 1;

    static Window interval(double a, double b) { return Window{{a, 0}, {b, 0}, 1}; }
    static Window box(double ax, double bx, double ay, double by) {
        return Window{{ax, ay}, {bx, by}, 2};
    }

    double extent(int axis) const { return hi[axis] - lo[axis]; }
    double measure() const {
        double m = extent(0);
        if (dim == 2) m *= extent(1);
        return m;
    }
    bool degenerate() const {
        for (int a = 0; a < dim; ++a)
            if (!(extent(a) > 0.0)) return true;
        return false;
    }
};

enum class GroupKind { RealLine, Circle, RealPlane };
enum class DualKind { RealLine, Integers, RealPlane };

/// Which group we are on, with the dual it forces and the Haar normalization
/// that makes the Fourier-Plancherel transform isometric.
struct GroupDescriptor {
    GroupKind kind = GroupKind::RealLine;
    DualKind dual_kind = DualKind::RealLine;
    std::string haar_normalization;

    int dim() const { return kind == GroupKind::RealPlane ? 2 : 1; }

    static const GroupDescriptor& real_line();
    static const GroupDescriptor& circle();
    static const GroupDescriptor& real_plane();
};

/// Quadrature grid for the Haar measure over a window of the group.
/// Weights are strictly positive and sum to the Haar measure of the window.
struct SampledGrid {
    GroupDescriptor group;
    std::vector<Pt> points;
    std::vector<double> weights;
    Window window;

    std::size_t size() const { return points.size(); }
};

/// Same shape over the dual group. For Circle duals the points are integers
/// with unit (counting-measure) weights.
struct DualGrid {
    GroupDescriptor group;  // the *primal* group; points live in its dual
    std::vector<Pt> points;
    std::vector<double> weights;
    Window window;

    std::size_t size() const { return points.size(); }
};

enum class QuadRule { Trapezoid, GaussLegendre };

/// Duality pairing E(x, xi): e^{2pi i x xi} on R and R^2, e^{i k theta} on the
/// circle. Unit modulus up to rounding. Throws std::invalid_argument on a
/// dimension mismatch.
cx pairing(const GroupDescriptor& g, const Pt& x, const Pt& xi);

/// Reduce a circle point into [0, 2pi).
double reduce_angle(double theta);

/// Quadrature grid over a window of the group. For the Circle a full-period
/// window gets the periodic equispaced rule (no duplicated endpoint); weights
/// carry the d(theta)/2pi normalization. For RealPlane, n is per axis.
SampledGrid build_grid(const GroupDescriptor& g, const Window& window, int n, QuadRule rule);

/// Dual-side grid. For Circle duals the window [a,b] selects the integers in
/// it and n is ignored; otherwise mirrors build_grid with Lebesgue weights.
DualGrid build_dual_grid(const GroupDescriptor& g, const Window& window, int n, QuadRule rule);

/// result[j] = sum_i w_i f_i conj(E(x_i, xi_j)). For the Circle this is the
/// k-th Fourier coefficient under the normalized Haar measure. Window
/// truncation error is the caller's responsibility; see SampledGrid docs.
std::vector<cx> fourier_forward(const GroupDescriptor& g, const std::vector<cx>& samples,
                                const SampledGrid& grid, const DualGrid& duals);

/// Adjoint formula with the pairing un-conjugated:
/// result[i] = sum_j w_j g_j E(x_i, xi_j).
std::vector<cx> fourier_inverse(const GroupDescriptor& g, const std::vector<cx>& dual_samples,
                                const DualGrid& duals, const SampledGrid& grid);

namespace quad {

/// Gauss-Legendre nodes and weights on [-1, 1], cached per n.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// n-point Gauss-Legendre on [a, b].
void gauss_legendre_ab(int n, double a, double b, std::vector<double>& nodes,
                       std::vector<double>& weights);

/// Composite Gauss-Legendre: the window split at the given interior
/// breakpoints, each panel getting nodes proportional to its share of
/// n_total (at least 4 per panel).
void composite_gl(double a, double b, const std::vector<double>& breakpoints, int n_total,
                  std::vector<double>& nodes, std::vector<double>& weights);

/// Composite Gauss-Legendre with the same node count on every panel
/// (geometric panel layouts resolving boundary layers).
void composite_gl_panels(double a, double b, const std::vector<double>& breakpoints,
                         int n_per_panel, std::vector<double>& nodes,
                         std::vector<double>& weights);

/// C-infinity cutoff: 1 for |u| <= core, 0 for |u| >= edge, smooth between.
double smooth_cutoff(double u, double core, double edge);

} // namespace quad

} // namespace invker
