#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "invker/group.hpp"

namespace invker {

/// The effective spectrum Omega: where the fiber kernel is nontrivial.
struct OmegaSet {
    enum class Kind { HalfLinePositive, PuncturedLine, FullLine, Plane, NonnegIntegers, AllIntegers };
    Kind kind = Kind::FullLine;

    bool contains(const Pt& xi) const;
};

/// Quadrature grid over the fiber domain Y; weights carry the measure density.
struct YGrid {
    std::vector<Pt> points;
    std::vector<double> weights;
    Window window;

    std::size_t size() const { return points.size(); }
};

/// Per-model default windows and node counts for the numerical pipelines.
struct ModelDefaults {
    Window g_window;
    int ng = 128;
    Window y_window;
    int ny = 32;
    std::vector<double> y_breaks;   // interior panel breakpoints for the Y rule
    double omega_max = 8.0;         // |xi| cap (Kmax for discrete spectra)
    int n_omega = 400;
    double omega_eps = 0.0;         // lower cutoff for half-line / punctured spectra
};

/// Smooth-cutoff window for Fourier quadrature of slowly decaying kernels.
struct OracleWindow {
    double core = 0.0;   // taper is 1 on [-core, core]
    double edge = 0.0;   // and 0 beyond [-edge, edge]
    double band_pad = 8.0;  // extra resolved bandwidth beyond |xi|
    bool taper = false;
};

/// A worked RKHS example: closed-form reproducing kernel K_{0,y}(u,v) over
/// G x Y, fiber spectrum Omega, normalized fiber vector q_xi(y), and the
/// rank-one fiber kernel L_{xi,y}(v) = conj(q_xi(y)) q_xi(v).
///
/// Only K_{0,y} is stored; translation invariance K_{x,y}(u,v) = K_{0,y}(u-x,v)
/// holds by construction. All evaluators are pure; instances are immutable and
/// safe for concurrent use.
class ModelSpace {
public:
    virtual ~ModelSpace() = default;

    const std::string& id() const { return id_; }
    const GroupDescriptor& group() const { return group_; }
    int y_dim() const { return y_dim_; }
    const OmegaSet& omega() const { return omega_; }
    const ModelDefaults& defaults() const { return defaults_; }

    /// K_{0,y}(u,v): kernel based at (0, y), evaluated at (u, v).
    virtual cx kernel0(const Pt& u, const Pt& base_y, const Pt& v) const = 0;

    /// K_{u,v}(x,y) = K_{0,v}(x-u, y). Throws on out-of-domain arguments.
    cx kernel(const Pt& x, const Pt& y, const Pt& u, const Pt& v) const;

    /// Fiber vector q_xi(y); only defined on Omega (std::domain_error outside).
    virtual cx q(const Pt& xi, const Pt& y) const = 0;

    /// L_{xi,y}(v) = conj(q_xi(y)) q_xi(v); returns 0 for xi outside Omega.
    virtual cx L(const Pt& xi, const Pt& y, const Pt& v) const;

    virtual bool y_in_domain(const Pt& y) const = 0;

    /// Density of the Y-measure against Lebesgue at v.
    virtual double y_density(const Pt& v) const = 0;

    /// Quadrature grid for (Y, lambda) over a window (composite Gauss-Legendre
    /// split at the model's panel breakpoints plus any caller-supplied ones,
    /// density baked into weights).
    virtual YGrid y_grid(const Window& window, int n,
                         const std::vector<double>& extra_breaks = {}) const;

    /// Omega-restricted dual grid: composite GL panels over the continuum
    /// pieces, or the integer range for circle models. omega_max <= 0 and
    /// n <= 0 pick the model defaults. `extra_breaks` forces panel edges at
    /// the given frequencies (symbol jump locations).
    virtual DualGrid omega_grid(double omega_max, int n,
                                const std::vector<double>& extra_breaks = {}) const;

    /// Group difference x - u (wrapped mod 2pi on the circle).
    Pt group_sub(const Pt& a, const Pt& b) const;

    /// y0 candidates for the fiber-division inverse (midpoint first).
    virtual std::vector<Pt> y0_candidates() const;

    /// Frequencies where xi -> L_{xi,y}(v) jumps (quadrature panels should
    /// split there). Empty for models with smooth fiber kernels.
    virtual std::vector<double> omega_breaks_for(const Pt& y, const Pt& v) const {
        (void)y;
        (void)v;
        return {};
    }

    /// Fourier-quadrature window for the brute-force fiber oracle.
    virtual OracleWindow oracle_window() const { return {}; }

protected:
    ModelSpace(std::string id, const GroupDescriptor& g, int y_dim, OmegaSet omega,
               ModelDefaults d)
        : id_(std::move(id)), group_(g), y_dim_(y_dim), omega_(omega), defaults_(d) {}

    std::string id_;
    GroupDescriptor group_;
    int y_dim_;
    OmegaSet omega_;
    ModelDefaults defaults_;
};

struct ModelParams {
    double alpha = 1.0;  // SHS width
    int n = 1;           // SHS dimension (1 or 2)
};

/// Catalog lookup by id ("bergman-uhp-vertical", "harmonic-bergman-uhp-vertical",
/// "bergman-disk-radial", "harmonic-bergman-disk-radial", "bergman-uhp-angular",
/// "shs-gaussian", "wavelet-shannon"). Throws std::invalid_argument on an
/// unknown id.
std::shared_ptr<const ModelSpace> make_model(const std::string& id, const ModelParams& p = {});

const std::vector<std::string>& model_ids();

/// Recomputes L_{xi,y}(v) from K samples by Fourier quadrature, independent of
/// the closed form. Continuous groups integrate u -> K_{0,y}(u,v) over the
/// model's oracle window (smooth-cutoff tapered where the kernel decays
/// slowly); circle models take the exact Fourier-coefficient sum with
/// `resolution` angular nodes. `resolution` scales the node count (1 = default).
cx L_numeric_oracle(const ModelSpace& m, const Pt& xi, const Pt& y, const Pt& v,
                    double resolution = 1.0);

/// Max absolute deviation of the wavelet admissibility integral from 1 over a
/// battery of nonzero frequencies, evaluated on a log grid with panels aligned
/// to the spectral support edges. Requires the wavelet-shannon model.
double wavelet_admissibility_check(const ModelSpace& m, int resolution = 64);

/// Shannon band wavelet spectrum: (ln 2)^{-1/2} on 1 <= |s| <= 2, else 0.
double shannon_wavelet_spectrum(double s);

} // namespace invker
