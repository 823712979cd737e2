#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "invker/model.hpp"
#include "invker/symbol.hpp"

/// Discretized operators on H: the analysis/synthesis pair R, R*, diagonal
/// operators V_b = R* M_b R, direct quadrature of S_psi, translations,
/// Toeplitz operators, dense-matrix assembly, operator-norm estimation, and
/// weighted changes of variables to native domains.
namespace invker {

/// Samples of an H-function on a G-grid x Y-grid. `generator`, when present,
/// is the closed form behind the samples: translations and off-grid
/// evaluations use it instead of interpolating.
struct SampledField {
    std::shared_ptr<const ModelSpace> model;
    SampledGrid g;
    YGrid y;
    std::vector<cx> values;  // index i*ny + j
    std::function<cx(const Pt&, const Pt&)> generator;
    double padding = 0.0;  // admissible translation margin for generator-free fields

    std::size_t ng() const { return g.size(); }
    std::size_t ny() const { return y.size(); }
    cx at(std::size_t i, std::size_t j) const { return values[i * y.size() + j]; }
};

struct FieldGrids {
    SampledGrid g;
    YGrid y;
};

/// Dense-oracle grids (model defaults; NG*NY stays within the assembly guard).
FieldGrids default_grids(const ModelSpace& m);

/// High-resolution 1D grids for closed-form fidelity checks: uniform
/// trapezoid with a smooth taper on the window margin so 1/u^2-type kernels
/// transform at 1e-6 class accuracy. Not available for 2D groups.
FieldGrids transform_grids(const ModelSpace& m, double half_width = 0.0, double nodes_per_unit = 0.0);

SampledField sample_field(const std::shared_ptr<const ModelSpace>& m, const FieldGrids& grids,
                          std::function<cx(const Pt&, const Pt&)> f);

/// f = K_{x0,y0} sampled, generator-backed.
SampledField sample_kernel_field(const std::shared_ptr<const ModelSpace>& m,
                                 const FieldGrids& grids, const Pt& x0, const Pt& y0);

cx field_inner(const SampledField& a, const SampledField& b);
double field_norm(const SampledField& a);
double field_max_abs_diff(const SampledField& a, const SampledField& b);

/// (Rf)(xi) = sum w_g w_y f(u,v) conj(E(u,xi)) conj(q_xi(v)).
std::vector<cx> analysis_R(const SampledField& f, const DualGrid& omega);

/// (R*g)(x,y) = sum w_xi g(xi) E(x,xi) q_xi(y); generator-backed (the
/// synthesis sum evaluates anywhere).
SampledField synthesis_Rstar(const std::shared_ptr<const ModelSpace>& m, const std::vector<cx>& g,
                             const DualGrid& omega, const FieldGrids& grids);

/// V_b f = R*(b . (Rf)) over the given Omega grid.
SampledField apply_V(const SampledField& f, const SpectralSymbol& b, const DualGrid& omega);

/// (S_psi f)(x,y) = quadrature of f(u,v) psi(x-u, y, v) over f's grids.
/// Throws if a sampled psi cannot cover the required difference set.
SampledField apply_S(const SampledField& f, const InvariantKernel& psi);

/// (rho(a) f)(x,y) = f(x-a, y): closed-form re-evaluation for generator-backed
/// fields; otherwise trigonometric (Circle) or 6-point local polynomial
/// (RealLine) interpolation, requiring |a| <= padding.
SampledField rho_translate(const SampledField& f, const Pt& a);

/// Toeplitz with vertical symbol: quadrature of f(u,v) g(v) conj(K_{0,y}(u-x,v)).
SampledField toeplitz_apply(const SampledField& f, std::function<double(const Pt&)> g);

/// Dense matrix of S_psi on fixed grids: M[(x,y),(u,v)] = psi(x-u,y,v) w_u w_v.
/// Refuses grids with more than 20000 rows.
struct DiscretizedOperator {
    std::shared_ptr<const ModelSpace> model;
    SampledGrid g;
    YGrid y;
    std::vector<cx> mat;       // row-major rows x rows
    std::vector<double> w;     // combined quadrature weight per index
    std::size_t rows = 0;

    cx entry(std::size_t r, std::size_t c) const { return mat[r * rows + c]; }
};

DiscretizedOperator assemble_matrix(const std::shared_ptr<const ModelSpace>& m,
                                    const InvariantKernel& psi, const FieldGrids& grids);
DiscretizedOperator assemble_matrix(const std::shared_ptr<const ModelSpace>& m,
                                    const SpectralSymbol& b, const FieldGrids& grids,
                                    const OmegaQuad& oq = {});

std::vector<cx> apply_matrix(const DiscretizedOperator& op, const std::vector<cx>& v);

/// Adjoint in the weighted inner product <f,g> = sum w f conj(g):
/// A* = W^{-1} A^H W.
std::vector<cx> apply_matrix_adjoint(const DiscretizedOperator& op, const std::vector<cx>& v);

/// Adjoint as a matrix: W^{-1} A^H W on the same grids.
DiscretizedOperator matrix_adjoint(const DiscretizedOperator& op);

/// Weighted operator-norm distance ||A - B|| estimated by power iteration
/// on the difference.
double matrix_norm_distance(const DiscretizedOperator& a, const DiscretizedOperator& b);

struct NormResult {
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
    double grid_sup_b = 0.0;  // set by the symbol route
};

/// Power iteration on A*A in the weighted inner product, seeded with the
/// constant-1 vector plus a 1e-3 fixed-seed perturbation; stops at relative
/// change <= tol or max_iter (returning the best estimate, unconverged).
NormResult operator_norm(const DiscretizedOperator& op, int max_iter = 500, double tol = 1e-10);

/// Same iteration with the factored applies f -> V_conj(b) V_b f (the
/// W-adjoint of the discretized V_b is exactly V_conj(b)); also reports the
/// grid sup of |b|.
NormResult operator_norm(const std::shared_ptr<const ModelSpace>& m, const SpectralSymbol& b,
                         const DualGrid& omega, const FieldGrids& grids, int max_iter = 500,
                         double tol = 1e-10);

/// Weighted change of variables to the model's native domain (disk, upper
/// half-plane, Fock). U f samples the native function onto G x Y; (U* field)(z)
/// evaluates a generator-backed field back on the native domain.
bool has_native_map(const ModelSpace& m);
SampledField native_pull(const std::shared_ptr<const ModelSpace>& m, const FieldGrids& grids,
                         std::function<cx(cx)> f);
cx native_push_eval(const ModelSpace& m, const SampledField& field, cx z);

} // namespace invker
