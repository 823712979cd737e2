#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "invker/group.hpp"
#include "invker/model.hpp"

/// The symbol calculus: bounded functions b on Omega, the invariant integral
/// kernels phi_b they generate, and the explicit fiber-division inverse that
/// recovers b from a kernel.
namespace invker {

/// A bounded function on Omega, either closed-form or sampled on an Omega grid.
class SpectralSymbol {
public:
    /// Closed-form symbol. `breakpoints` lists jump locations so quadrature
    /// panels can split there (indicator edges); `sup_hint` is a declared
    /// essential sup bound (none for deliberately unbounded demos).
    static SpectralSymbol closed_form(std::function<cx(const Pt&)> eval,
                                      std::optional<double> sup_hint = std::nullopt,
                                      std::vector<double> breakpoints = {});

    /// Values on an Omega grid (finite values only).
    static SpectralSymbol sampled(DualGrid grid, std::vector<cx> values);

    static SpectralSymbol one();
    static SpectralSymbol indicator(double lo, double hi);

    bool is_sampled() const { return sampled_.has_value(); }
    cx operator()(const Pt& xi) const;

    /// Values aligned with the given grid (evaluates or re-samples; sampled
    /// symbols require the identical grid point count).
    std::vector<cx> on_grid(const DualGrid& grid) const;

    const std::optional<double>& sup_hint() const { return sup_hint_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const DualGrid* grid() const { return sampled_ ? &sampled_->grid : nullptr; }
    const std::vector<cx>* values() const { return sampled_ ? &sampled_->values : nullptr; }

    double grid_sup(const DualGrid& grid) const;

private:
    struct Sampled {
        DualGrid grid;
        std::vector<cx> values;
    };
    std::function<cx(const Pt&)> eval_;
    std::optional<double> sup_hint_;
    std::vector<double> breakpoints_;
    std::optional<Sampled> sampled_;
};

/// An element of the invariant-kernel class: a function psi(x, y, v) on
/// G x Y x Y, closed-form or sampled on a G x Y x Y tensor.
///
/// Kernels built from a spectral symbol carry their defining Omega grid and
/// symbol values; bulk consumers (recovery, products, assembly) use that
/// separable structure instead of calling the pointwise quadrature per entry.
class InvariantKernel {
public:
    struct PhiStructure {
        std::shared_ptr<const ModelSpace> model;
        std::shared_ptr<const DualGrid> omega;
        std::shared_ptr<const std::vector<cx>> values;
    };

    static InvariantKernel closed_form(std::string model_id,
                                       std::function<cx(const Pt&, const Pt&, const Pt&)> eval);
    static InvariantKernel sampled(std::string model_id, SampledGrid g, YGrid y,
                                   std::vector<cx> tensor);  // [g][y][v] row-major
    static InvariantKernel zero(std::string model_id);

    cx operator()(const Pt& x, const Pt& y, const Pt& v) const;
    const std::string& model_id() const { return model_id_; }
    bool is_zero() const { return zero_; }

    const PhiStructure* phi_structure() const { return phi_ ? phi_.get() : nullptr; }
    void set_phi_structure(PhiStructure s) { phi_ = std::make_shared<PhiStructure>(std::move(s)); }

private:
    std::string model_id_;
    std::function<cx(const Pt&, const Pt&, const Pt&)> eval_;
    bool zero_ = false;
    std::shared_ptr<PhiStructure> phi_;
};

/// Options for the Omega quadrature behind phi_from_symbol.
struct OmegaQuad {
    double omega_max = 0.0;  // <= 0: model default
    int nodes = 0;           // <= 0: model default
};

/// phi_b(x,y,v) = int_Omega E(x,xi) L_{xi,v}(y) b(xi) d nu^(xi) (a sum for
/// discrete spectra). Quadrature panels split at the symbol's breakpoints.
/// An unbounded closed-form symbol without a sup hint is accepted; a warning
/// status is recorded on the returned evaluation context (see PhiStatus).
cx phi_from_symbol(const ModelSpace& m, const SpectralSymbol& b, const Pt& x, const Pt& y,
                   const Pt& v, const OmegaQuad& oq = {});

/// Same integral against an explicit Omega grid (the workhorse).
cx phi_on_grid(const ModelSpace& m, const DualGrid& omega, const std::vector<cx>& b_values,
               const Pt& x, const Pt& y, const Pt& v);

/// phi_b as an InvariantKernel (curried quadrature; evaluator is pure).
InvariantKernel phi_kernel(const std::shared_ptr<const ModelSpace>& m, const SpectralSymbol& b,
                           const OmegaQuad& oq = {});

/// Whether the last phi_from_symbol-style construction saw an unbounded
/// declared symbol. Kept per-kernel, not global: see phi_kernel_status.
struct PhiStatus {
    bool unbounded_symbol_warning = false;
};
PhiStatus phi_symbol_status(const SpectralSymbol& b);

/// y0 selection policy for the fiber-division inverse. Candidates are tried
/// in order: first any with |q| >= preferred_abs_q (division well away from
/// the noise floor), then any with |q| >= min_abs_q (the hard fallback
/// threshold), then the degenerate-fiber error.
struct Y0Policy {
    std::vector<Pt> candidates;     // empty: model's candidate list
    double preferred_abs_q = 1e-4;
    double min_abs_q = 1e-13;
};

/// Quadrature configuration for R applied to psi(.,.,y0). When `y_for_xi` is
/// set, the Y rule is rebuilt per recovered frequency (needed when the fiber
/// vector q has xi-dependent support edges, e.g. the wavelet band); the fixed
/// `y` grid is used otherwise.
struct RecoveryGrids {
    SampledGrid g;  // group grid (tapered high-resolution recommended)
    YGrid y;
    std::function<YGrid(const Pt&)> y_for_xi;
};

/// Recovers b(xi) = (R psi(.,.,y0))(xi) / conj(q_xi(y0)) on the Omega grid,
/// falling back through y0 candidates per grid point where |q| is degenerate.
/// Throws std::runtime_error if every candidate fails at some grid point.
SpectralSymbol symbol_from_kernel(const ModelSpace& m, const InvariantKernel& psi,
                                  const DualGrid& omega, const RecoveryGrids& grids,
                                  const Y0Policy& policy = {});

/// Toeplitz symbol gamma_g(xi) = int_Y g(t) |q_xi(t)|^2 d lambda(t), computed
/// on a dedicated fine Y rule; sup |gamma_g| <= sup |g|.
SpectralSymbol toeplitz_symbol(const std::shared_ptr<const ModelSpace>& m,
                               std::function<double(const Pt&)> g, const Window& y_window,
                               int ny = 256, const std::vector<double>& y_breaks = {});

/// Wiener pair: b = Fh on Omega, and phi by the convolution formula
/// phi(x,y,v) = int_G h(u) K_{0,v}(x-u, y) d nu(u). The two routes to phi
/// agree up to quadrature.
struct WienerPair {
    SpectralSymbol symbol;
    InvariantKernel kernel;
};
WienerPair wiener_symbol(const std::shared_ptr<const ModelSpace>& m,
                         std::function<cx(const Pt&)> h, const Window& support, int n = 512);

/// phi_{1_E} for E a union of intervals (continuum) or an integer set
/// (circle duals). Empty E gives the zero kernel.
InvariantKernel projection_kernel(const std::shared_ptr<const ModelSpace>& m,
                                  const std::vector<Window>& intervals,
                                  const OmegaQuad& oq = {});
InvariantKernel projection_kernel(const std::shared_ptr<const ModelSpace>& m,
                                  const std::vector<long>& modes);

} // namespace invker
