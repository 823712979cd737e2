#include "invker/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace invker {

namespace {

constexpr std::size_t kMaxRows = 20000;

struct TransformSpec {
    double half = 40.0;
    double core = 25.0;
    double nodes_per_unit = 32.0;
    int ny = 48;
};

TransformSpec transform_spec(const ModelSpace& m) {
    const std::string& id = m.id();
    if (id == "bergman-uhp-vertical" || id == "harmonic-bergman-uhp-vertical")
        return {160.0, 100.0, 32.0, 48};
    if (id == "bergman-uhp-angular") return {30.0, 20.0, 24.0, 48};
    if (id == "shs-gaussian") return {7.0, 5.0, 24.0, 40};
    if (id == "wavelet-shannon") return {160.0, 80.0, 24.0, 64};
    return {};
}

// conj(E(u_i, xi_k)) tables; the transforms spend their time here.
std::vector<cx> pairing_table(const ModelSpace& m, const std::vector<Pt>& xs,
                              const std::vector<Pt>& xis) {
    std::vector<cx> t(xs.size() * xis.size());
    for (std::size_t k = 0; k < xis.size(); ++k)
        for (std::size_t i = 0; i < xs.size(); ++i)
            t[k * xs.size() + i] = pairing(m.group(), xs[i], xis[k]);
    return t;
}

std::vector<cx> q_table(const ModelSpace& m, const DualGrid& omega, const YGrid& y) {
    std::vector<cx> t(omega.size() * y.size());
    for (std::size_t k = 0; k < omega.size(); ++k)
        for (std::size_t j = 0; j < y.size(); ++j) {
            try {
                t[k * y.size() + j] = m.q(omega.points[k], y.points[j]);
            } catch (const std::domain_error&) {
                t[k * y.size() + j] = cx{0.0, 0.0};
            }
        }
    return t;
}

// The continuum q is normalized in L^2(Y, lambda); on a finite Y grid the
// discrete mass N(xi) = sum w_j |q_xi(v_j)|^2 drops below 1 where the window
// truncates the fiber (small xi). The discrete transforms use q / sqrt(N),
// which restores the isometry and the V_1 = I identity exactly at the level
// of the remaining quadratures. Empty fibers (N ~ 0) get scale 0.
std::vector<double> fiber_scales(const std::vector<cx>& qt, const YGrid& y, std::size_t nw) {
    const std::size_t ny = y.size();
    std::vector<double> s(nw, 0.0);
    for (std::size_t k = 0; k < nw; ++k) {
        double n = 0.0;
        for (std::size_t j = 0; j < ny; ++j) n += y.weights[j] * std::norm(qt[k * ny + j]);
        s[k] = n > 1e-30 ? 1.0 / std::sqrt(n) : 0.0;
    }
    return s;
}

} // namespace

FieldGrids default_grids(const ModelSpace& m) {
    const ModelDefaults& d = m.defaults();
    FieldGrids fg;
    const QuadRule rule =
        m.group().kind == GroupKind::Circle ? QuadRule::Trapezoid : QuadRule::GaussLegendre;
    fg.g = build_grid(m.group(), d.g_window, d.ng, rule);
    fg.y = m.y_grid(d.y_window, d.ny);
    return fg;
}

FieldGrids transform_grids(const ModelSpace& m, double half_width, double nodes_per_unit) {
    if (m.group().kind == GroupKind::Circle) return default_grids(m);
    if (m.group().dim() != 1)
        throw std::invalid_argument("transform_grids: one-dimensional groups only");
    TransformSpec ts = transform_spec(m);
    if (half_width > 0.0) {
        ts.core *= half_width / ts.half;
        ts.half = half_width;
    }
    if (nodes_per_unit > 0.0) ts.nodes_per_unit = nodes_per_unit;

    const int n = static_cast<int>(std::lround(2.0 * ts.half * ts.nodes_per_unit)) + 1;
    const double h = 2.0 * ts.half / (n - 1);
    FieldGrids fg;
    fg.g.group = m.group();
    fg.g.window = Window::interval(-ts.half, ts.half);
    for (int i = 0; i < n; ++i) {
        const double u = -ts.half + h * i;
        double w = h * (i == 0 || i == n - 1 ? 0.5 : 1.0);
        w *= quad::smooth_cutoff(u, ts.core, ts.half);
        if (w <= 0.0) continue;
        fg.g.points.push_back(Pt::of(u));
        fg.g.weights.push_back(w);
    }
    fg.y = m.y_grid(m.defaults().y_window, ts.ny);
    return fg;
}

SampledField sample_field(const std::shared_ptr<const ModelSpace>& m, const FieldGrids& grids,
                          std::function<cx(const Pt&, const Pt&)> f) {
    SampledField out;
    out.model = m;
    out.g = grids.g;
    out.y = grids.y;
    out.values.resize(grids.g.size() * grids.y.size());
    for (std::size_t i = 0; i < grids.g.size(); ++i)
        for (std::size_t j = 0; j < grids.y.size(); ++j)
            out.values[i * grids.y.size() + j] = f(grids.g.points[i], grids.y.points[j]);
    out.generator = std::move(f);
    return out;
}

SampledField sample_kernel_field(const std::shared_ptr<const ModelSpace>& m,
                                 const FieldGrids& grids, const Pt& x0, const Pt& y0) {
    auto mod = m;
    return sample_field(m, grids, [mod, x0, y0](const Pt& x, const Pt& y) {
        return mod->kernel(x, y, x0, y0);
    });
}

cx field_inner(const SampledField& a, const SampledField& b) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("field_inner: shape mismatch");
    cx acc{0.0, 0.0};
    const std::size_t ny = a.ny();
    for (std::size_t i = 0; i < a.ng(); ++i)
        for (std::size_t j = 0; j < ny; ++j)
            acc += a.g.weights[i] * a.y.weights[j] * a.values[i * ny + j] *
                   std::conj(b.values[i * ny + j]);
    return acc;
}

double field_norm(const SampledField& a) {
    if (a.values.size() != a.ng() * a.ny())
        throw std::invalid_argument("field_norm: field has no filled values (lazy evaluator only)");
    double acc = 0.0;
    const std::size_t ny = a.ny();
    for (std::size_t i = 0; i < a.ng(); ++i)
        for (std::size_t j = 0; j < ny; ++j)
            acc += a.g.weights[i] * a.y.weights[j] * std::norm(a.values[i * ny + j]);
    return std::sqrt(std::max(0.0, acc));
}

double field_max_abs_diff(const SampledField& a, const SampledField& b) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("field_max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

std::vector<cx> analysis_R(const SampledField& f, const DualGrid& omega) {
    const ModelSpace& m = *f.model;
    const std::size_t ng = f.ng(), ny = f.ny(), nw = omega.size();
    if (f.values.size() != ng * ny) throw std::invalid_argument("analysis_R: shape mismatch");

    // transpose for stride-1 access in the hot loop
    std::vector<cx> ft(ny * ng);
    for (std::size_t i = 0; i < ng; ++i)
        for (std::size_t j = 0; j < ny; ++j) ft[j * ng + i] = f.values[i * ny + j];

    const std::vector<cx> qt = q_table(m, omega, f.y);
    const std::vector<double> fs = fiber_scales(qt, f.y, nw);
    std::vector<cx> out(nw);
    std::vector<cx> e(ng);
    for (std::size_t k = 0; k < nw; ++k) {
        if (fs[k] == 0.0) {
            out[k] = cx{0.0, 0.0};
            continue;
        }
        for (std::size_t i = 0; i < ng; ++i)
            e[i] = f.g.weights[i] * std::conj(pairing(m.group(), f.g.points[i], omega.points[k]));
        cx acc{0.0, 0.0};
        for (std::size_t j = 0; j < ny; ++j) {
            const cx qv = qt[k * ny + j];
            if (qv == cx{0.0, 0.0}) continue;
            cx s{0.0, 0.0};
            const cx* row = &ft[j * ng];
            for (std::size_t i = 0; i < ng; ++i) s += row[i] * e[i];
            acc += f.y.weights[j] * std::conj(qv) * s;
        }
        out[k] = acc * fs[k];
    }
    return out;
}

SampledField synthesis_Rstar(const std::shared_ptr<const ModelSpace>& m, const std::vector<cx>& g,
                             const DualGrid& omega, const FieldGrids& grids) {
    if (g.size() != omega.size()) throw std::invalid_argument("synthesis_Rstar: shape mismatch");
    auto mod = m;
    auto om = std::make_shared<DualGrid>(omega);
    const std::vector<cx> qt = q_table(*m, omega, grids.y);
    const std::vector<double> fs = fiber_scales(qt, grids.y, omega.size());
    auto coeff = std::make_shared<std::vector<cx>>(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) (*coeff)[k] = omega.weights[k] * g[k] * fs[k];

    // fill the grid through E and q tables (the per-point generator would pay
    // two exponentials per term), keep the generator for off-grid points
    SampledField out;
    out.model = m;
    out.g = grids.g;
    out.y = grids.y;
    const std::size_t ng = grids.g.size(), ny = grids.y.size(), nw = omega.size();
    out.values.assign(ng * ny, cx{0.0, 0.0});
    const std::vector<cx> et = pairing_table(*m, grids.g.points, omega.points);
    for (std::size_t k = 0; k < nw; ++k) {
        if ((*coeff)[k] == cx{0.0, 0.0}) continue;
        const cx* e = &et[k * ng];
        const cx* qq = &qt[k * ny];
        for (std::size_t i = 0; i < ng; ++i) {
            const cx a = (*coeff)[k] * e[i];
            cx* row = &out.values[i * ny];
            for (std::size_t j = 0; j < ny; ++j) row[j] += a * qq[j];
        }
    }
    out.generator = [mod, om, coeff](const Pt& x, const Pt& y) {
        cx acc{0.0, 0.0};
        for (std::size_t k = 0; k < om->size(); ++k) {
            if ((*coeff)[k] == cx{0.0, 0.0}) continue;
            cx qv;
            try {
                qv = mod->q(om->points[k], y);
            } catch (const std::domain_error&) {
                continue;
            }
            acc += (*coeff)[k] * pairing(mod->group(), x, om->points[k]) * qv;
        }
        return acc;
    };
    return out;
}

SampledField apply_V(const SampledField& f, const SpectralSymbol& b, const DualGrid& omega) {
    std::vector<cx> g = analysis_R(f, omega);
    const std::vector<cx> bv = b.on_grid(omega);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] *= bv[k];
    return synthesis_Rstar(f.model, g, omega, FieldGrids{f.g, f.y});
}

SampledField apply_S(const SampledField& f, const InvariantKernel& psi) {
    const InvariantKernel::PhiStructure* ps = psi.phi_structure();
    if (ps && ps->model->id() == f.model->id() && f.model->group().dim() == 1) {
        // psi(x-u, y, v) = sum_k w_k b_k E(x-u, xi_k) L(xi_k, v, y): the
        // defining double sum, accumulated frequency-first
        const ModelSpace& m = *f.model;
        const DualGrid& om = *ps->omega;
        const std::vector<cx>& bv = *ps->values;
        const std::size_t ng = f.ng(), ny = f.ny(), nw = om.size();
        const std::vector<cx> et = pairing_table(m, f.g.points, om.points);
        // Fhat(k, m) = sum_l w_l f(u_l, v_m) conj(E(u_l, xi_k))
        std::vector<cx> fhat(nw * ny, cx{0.0, 0.0});
        for (std::size_t k = 0; k < nw; ++k) {
            if (om.weights[k] * bv[k] == cx{0.0, 0.0}) continue;
            const cx* e = &et[k * ng];
            for (std::size_t l = 0; l < ng; ++l) {
                const cx wl = f.g.weights[l] * std::conj(e[l]);
                const cx* row = &f.values[l * ny];
                cx* out = &fhat[k * ny];
                for (std::size_t mI = 0; mI < ny; ++mI) out[mI] += wl * row[mI];
            }
        }
        // G(k, j) = sum_m wY_m L(xi_k, v_m, y_j) Fhat(k, m)
        std::vector<cx> gkj(nw * ny, cx{0.0, 0.0});
        for (std::size_t k = 0; k < nw; ++k) {
            if (om.weights[k] * bv[k] == cx{0.0, 0.0}) continue;
            for (std::size_t j = 0; j < ny; ++j) {
                cx acc{0.0, 0.0};
                for (std::size_t mI = 0; mI < ny; ++mI)
                    acc += f.y.weights[mI] * m.L(om.points[k], f.y.points[mI], f.y.points[j]) *
                           fhat[k * ny + mI];
                gkj[k * ny + j] = acc;
            }
        }
        SampledField out;
        out.model = f.model;
        out.g = f.g;
        out.y = f.y;
        out.values.assign(ng * ny, cx{0.0, 0.0});
        for (std::size_t k = 0; k < nw; ++k) {
            const cx wk = om.weights[k] * bv[k];
            if (wk == cx{0.0, 0.0}) continue;
            const cx* e = &et[k * ng];
            for (std::size_t i = 0; i < ng; ++i) {
                const cx a = wk * e[i];
                cx* row = &out.values[i * ny];
                const cx* gg = &gkj[k * ny];
                for (std::size_t j = 0; j < ny; ++j) row[j] += a * gg[j];
            }
        }
        auto fg = std::make_shared<SampledField>(f);
        auto ker = std::make_shared<InvariantKernel>(psi);
        auto mptr = f.model;
        out.generator = [mptr, fg, ker](const Pt& x, const Pt& y) {
            cx acc{0.0, 0.0};
            const std::size_t nyy = fg->ny();
            for (std::size_t l = 0; l < fg->ng(); ++l) {
                const Pt d = mptr->group_sub(x, fg->g.points[l]);
                cx inner{0.0, 0.0};
                for (std::size_t mI = 0; mI < nyy; ++mI)
                    inner += fg->y.weights[mI] * fg->values[l * nyy + mI] *
                             (*ker)(d, y, fg->y.points[mI]);
                acc += fg->g.weights[l] * inner;
            }
            return acc;
        };
        return out;
    }
    auto mod = f.model;
    auto fg = std::make_shared<SampledField>(f);
    auto ker = std::make_shared<InvariantKernel>(psi);
    auto eval = [mod, fg, ker](const Pt& x, const Pt& y) {
        cx acc{0.0, 0.0};
        const std::size_t nyy = fg->ny();
        for (std::size_t l = 0; l < fg->ng(); ++l) {
            const Pt d = mod->group_sub(x, fg->g.points[l]);
            cx inner{0.0, 0.0};
            for (std::size_t mI = 0; mI < nyy; ++mI)
                inner += fg->y.weights[mI] * fg->values[l * nyy + mI] *
                         (*ker)(d, y, fg->y.points[mI]);
            acc += fg->g.weights[l] * inner;
        }
        return acc;
    };
    // The double quadrature per point is the cost; fill the whole grid only
    // when it is small enough to be useful, otherwise hand back the evaluator.
    if (f.ng() * f.ny() <= 8192) return sample_field(f.model, FieldGrids{f.g, f.y}, eval);
    SampledField out;
    out.model = f.model;
    out.g = f.g;
    out.y = f.y;
    out.generator = eval;
    return out;
}

SampledField rho_translate(const SampledField& f, const Pt& a) {
    const ModelSpace& m = *f.model;
    if (a.dim != m.group().dim()) throw std::invalid_argument("rho_translate: dimension mismatch");

    if (f.generator) {
        auto gen = f.generator;
        auto mod = f.model;
        Pt shift = a;
        auto shifted = [gen, mod, shift](const Pt& x, const Pt& y) {
            return gen(mod->group_sub(x, shift), y);
        };
        SampledField out = sample_field(f.model, FieldGrids{f.g, f.y}, shifted);
        out.padding = f.padding;
        return out;
    }

    SampledField out = f;
    const std::size_t ng = f.ng(), ny = f.ny();

    if (m.group().kind == GroupKind::Circle) {
        // trigonometric interpolation: exact for band-limited samples on the
        // equispaced full-circle grid
        const std::size_t n = ng;
        for (std::size_t j = 0; j < ny; ++j) {
            std::vector<cx> col(n);
            for (std::size_t i = 0; i < n; ++i) col[i] = f.values[i * ny + j];
            std::vector<cx> coef(n, cx{0.0, 0.0});
            for (std::size_t k = 0; k < n; ++k) {
                const long kk = static_cast<long>(k) - static_cast<long>(n / 2);
                cx acc{0.0, 0.0};
                for (std::size_t i = 0; i < n; ++i)
                    acc += col[i] * std::polar(1.0, -kk * f.g.points[i].x());
                coef[k] = acc / static_cast<double>(n);
            }
            for (std::size_t i = 0; i < n; ++i) {
                cx acc{0.0, 0.0};
                for (std::size_t k = 0; k < n; ++k) {
                    const long kk = static_cast<long>(k) - static_cast<long>(n / 2);
                    acc += coef[k] * std::polar(1.0, kk * (f.g.points[i].x() - a.x()));
                }
                out.values[i * ny + j] = acc;
            }
        }
        return out;
    }

    if (std::abs(a.x()) > f.padding)
        throw std::invalid_argument("rho_translate: shift exceeds the field's padding margin");

    // 6-point local polynomial interpolation on the G grid
    const auto& xs = f.g.points;
    for (std::size_t i = 0; i < ng; ++i) {
        const double xt = xs[i].x() - a.x();
        std::size_t hi = 0;
        while (hi < ng && xs[hi].x() < xt) ++hi;
        const long lo = std::clamp<long>(static_cast<long>(hi) - 3, 0, static_cast<long>(ng) - 6);
        for (std::size_t j = 0; j < ny; ++j) {
            cx acc{0.0, 0.0};
            for (long p = lo; p < lo + 6; ++p) {
                double w = 1.0;
                for (long r = lo; r < lo + 6; ++r)
                    if (r != p) w *= (xt - xs[r].x()) / (xs[p].x() - xs[r].x());
                acc += w * f.values[p * ny + j];
            }
            out.values[i * ny + j] = acc;
        }
    }
    return out;
}

SampledField toeplitz_apply(const SampledField& f, std::function<double(const Pt&)> g) {
    auto mod = f.model;
    auto fg = std::make_shared<SampledField>(f);
    auto gv = std::make_shared<std::vector<double>>(f.ny());
    for (std::size_t j = 0; j < f.ny(); ++j) (*gv)[j] = g(f.y.points[j]);
    auto eval = [mod, fg, gv](const Pt& x, const Pt& y) {
        cx acc{0.0, 0.0};
        const std::size_t nyy = fg->ny();
        for (std::size_t l = 0; l < fg->ng(); ++l) {
            const Pt d = mod->group_sub(fg->g.points[l], x);
            cx inner{0.0, 0.0};
            for (std::size_t mI = 0; mI < nyy; ++mI)
                inner += fg->y.weights[mI] * fg->values[l * nyy + mI] * (*gv)[mI] *
                         std::conj(mod->kernel0(d, y, fg->y.points[mI]));
            acc += fg->g.weights[l] * inner;
        }
        return acc;
    };
    // Values on demand only (the double quadrature per point is the cost);
    // fill the grid when it is small enough to be useful.
    if (f.ng() * f.ny() <= 8192) return sample_field(f.model, FieldGrids{f.g, f.y}, eval);
    SampledField out;
    out.model = f.model;
    out.g = f.g;
    out.y = f.y;
    out.generator = eval;
    return out;
}

// --------------------------------------------------------------------------
// Dense oracle
// --------------------------------------------------------------------------

namespace {

DiscretizedOperator make_op_shell(const std::shared_ptr<const ModelSpace>& m,
                                  const FieldGrids& grids) {
    DiscretizedOperator op;
    op.model = m;
    op.g = grids.g;
    op.y = grids.y;
    op.rows = grids.g.size() * grids.y.size();
    if (op.rows > kMaxRows)
        throw std::invalid_argument("assemble_matrix: grid exceeds the 20000-row guard");
    op.w.resize(op.rows);
    const std::size_t ny = grids.y.size();
    for (std::size_t i = 0; i < grids.g.size(); ++i)
        for (std::size_t j = 0; j < ny; ++j)
            op.w[i * ny + j] = grids.g.weights[i] * grids.y.weights[j];
    return op;
}

} // namespace

DiscretizedOperator assemble_matrix(const std::shared_ptr<const ModelSpace>& m,
                                    const InvariantKernel& psi, const FieldGrids& grids) {
    DiscretizedOperator op = make_op_shell(m, grids);
    const std::size_t ny = grids.y.size();
    op.mat.resize(op.rows * op.rows);
    for (std::size_t r = 0; r < op.rows; ++r) {
        const Pt& xr = grids.g.points[r / ny];
        const Pt& yr = grids.y.points[r % ny];
        for (std::size_t c = 0; c < op.rows; ++c) {
            const Pt& uc = grids.g.points[c / ny];
            const Pt& vc = grids.y.points[c % ny];
            op.mat[r * op.rows + c] = psi(m->group_sub(xr, uc), yr, vc) * op.w[c];
        }
    }
    return op;
}

DiscretizedOperator assemble_matrix(const std::shared_ptr<const ModelSpace>& m,
                                    const SpectralSymbol& b, const FieldGrids& grids,
                                    const OmegaQuad& oq) {
    // rank-per-frequency accumulation of R* M_b R; algebraically identical to
    // assembling phi_b entries on the same Omega grid, and much cheaper.
    DiscretizedOperator op = make_op_shell(m, grids);
    const DualGrid omega =
        b.grid() ? *b.grid() : m->omega_grid(oq.omega_max, oq.nodes, b.breakpoints());
    const std::vector<cx> bv = b.on_grid(omega);
    const std::size_t ny = grids.y.size(), nw = omega.size();
    const std::vector<cx> qt = q_table(*m, omega, grids.y);
    const std::vector<double> fs = fiber_scales(qt, grids.y, nw);
    op.mat.assign(op.rows * op.rows, cx{0.0, 0.0});
    std::vector<cx> row(op.rows), col(op.rows);
    for (std::size_t k = 0; k < nw; ++k) {
        if (bv[k] == cx{0.0, 0.0} || fs[k] == 0.0) continue;
        const Pt& xi = omega.points[k];
        for (std::size_t i = 0; i < grids.g.size(); ++i) {
            const cx e = pairing(m->group(), grids.g.points[i], xi);
            for (std::size_t j = 0; j < ny; ++j) {
                row[i * ny + j] = e * qt[k * ny + j] * fs[k];
                col[i * ny + j] = std::conj(row[i * ny + j]) * op.w[i * ny + j];
            }
        }
        const cx scale = omega.weights[k] * bv[k];
        for (std::size_t r = 0; r < op.rows; ++r) {
            const cx a = scale * row[r];
            if (a == cx{0.0, 0.0}) continue;
            cx* out = &op.mat[r * op.rows];
            for (std::size_t c = 0; c < op.rows; ++c) out[c] += a * col[c];
        }
    }
    return op;
}

std::vector<cx> apply_matrix(const DiscretizedOperator& op, const std::vector<cx>& v) {
    if (v.size() != op.rows) throw std::invalid_argument("apply_matrix: shape mismatch");
    std::vector<cx> out(op.rows, cx{0.0, 0.0});
    for (std::size_t r = 0; r < op.rows; ++r) {
        const cx* row = &op.mat[r * op.rows];
        cx acc{0.0, 0.0};
        for (std::size_t c = 0; c < op.rows; ++c) acc += row[c] * v[c];
        out[r] = acc;
    }
    return out;
}

std::vector<cx> apply_matrix_adjoint(const DiscretizedOperator& op, const std::vector<cx>& v) {
    if (v.size() != op.rows) throw std::invalid_argument("apply_matrix_adjoint: shape mismatch");
    std::vector<cx> out(op.rows, cx{0.0, 0.0});
    for (std::size_t r = 0; r < op.rows; ++r) {
        const cx wr = v[r] * op.w[r];
        const cx* row = &op.mat[r * op.rows];
        for (std::size_t c = 0; c < op.rows; ++c) out[c] += std::conj(row[c]) * wr;
    }
    for (std::size_t c = 0; c < op.rows; ++c) out[c] /= op.w[c];
    return out;
}

namespace {

double weighted_norm(const std::vector<double>& w, const std::vector<cx>& v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) acc += w[i] * std::norm(v[i]);
    return std::sqrt(std::max(0.0, acc));
}

std::vector<cx> power_seed(std::size_t n) {
    std::mt19937 gen(424242u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cx> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = cx{1.0 + 1e-3 * u(gen), 1e-3 * u(gen)};
    return v;
}

template <class Fwd, class Adj>
NormResult power_iterate(const std::vector<double>& w, std::size_t n, Fwd fwd, Adj adj,
                         int max_iter, double tol) {
    std::vector<cx> v = power_seed(n);
    double nv = weighted_norm(w, v);
    for (auto& c : v) c /= nv;
    NormResult res;
    double lambda = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        std::vector<cx> av = fwd(v);
        const double s = weighted_norm(w, av);
        const double lam = s * s;  // Rayleigh quotient of A*A at unit v
        std::vector<cx> v2 = adj(av);
        const double n2 = weighted_norm(w, v2);
        res.iterations = it;
        if (n2 == 0.0 || lam < 1e-24) {
            res.value = std::sqrt(lam);
            res.converged = true;
            return res;
        }
        for (auto& c : v2) c /= n2;
        v = std::move(v2);
        if (it > 1 && std::abs(lam - lambda) <= tol * std::max(lam, 1e-300)) {
            lambda = lam;
            res.converged = true;
            break;
        }
        lambda = lam;
    }
    res.value = std::sqrt(lambda);
    return res;
}

} // namespace

NormResult operator_norm(const DiscretizedOperator& op, int max_iter, double tol) {
    return power_iterate(
        op.w, op.rows, [&](const std::vector<cx>& v) { return apply_matrix(op, v); },
        [&](const std::vector<cx>& v) { return apply_matrix_adjoint(op, v); }, max_iter, tol);
}

DiscretizedOperator matrix_adjoint(const DiscretizedOperator& op) {
    DiscretizedOperator adj = op;
    for (std::size_t r = 0; r < op.rows; ++r)
        for (std::size_t c = 0; c < op.rows; ++c)
            adj.mat[r * op.rows + c] =
                std::conj(op.mat[c * op.rows + r]) * (op.w[c] / op.w[r]);
    return adj;
}

double matrix_norm_distance(const DiscretizedOperator& a, const DiscretizedOperator& b) {
    if (a.rows != b.rows) throw std::invalid_argument("matrix_norm_distance: shape mismatch");
    auto fwd = [&](const std::vector<cx>& v) {
        std::vector<cx> r1 = apply_matrix(a, v), r2 = apply_matrix(b, v);
        for (std::size_t i = 0; i < r1.size(); ++i) r1[i] -= r2[i];
        return r1;
    };
    auto adj = [&](const std::vector<cx>& v) {
        std::vector<cx> r1 = apply_matrix_adjoint(a, v), r2 = apply_matrix_adjoint(b, v);
        for (std::size_t i = 0; i < r1.size(); ++i) r1[i] -= r2[i];
        return r1;
    };
    return power_iterate(a.w, a.rows, fwd, adj, 500, 1e-10).value;
}

NormResult operator_norm(const std::shared_ptr<const ModelSpace>& m, const SpectralSymbol& b,
                         const DualGrid& omega, const FieldGrids& grids, int max_iter,
                         double tol) {
    const std::size_t ng = grids.g.size(), ny = grids.y.size(), nw = omega.size();
    const std::size_t n = ng * ny;
    std::vector<double> w(n);
    for (std::size_t i = 0; i < ng; ++i)
        for (std::size_t j = 0; j < ny; ++j) w[i * ny + j] = grids.g.weights[i] * grids.y.weights[j];

    const std::vector<cx> et = pairing_table(*m, grids.g.points, omega.points);
    std::vector<cx> qt = q_table(*m, omega, grids.y);
    const std::vector<double> fs = fiber_scales(qt, grids.y, nw);
    for (std::size_t k = 0; k < nw; ++k)
        for (std::size_t j = 0; j < ny; ++j) qt[k * ny + j] *= fs[k];
    const std::vector<cx> bv = b.on_grid(omega);

    auto v_apply = [&](const std::vector<cx>& v, bool conj_b) {
        std::vector<cx> coef(nw, cx{0.0, 0.0});
        for (std::size_t k = 0; k < nw; ++k) {
            cx acc{0.0, 0.0};
            const cx* e = &et[k * ng];
            for (std::size_t i = 0; i < ng; ++i) {
                cx inner{0.0, 0.0};
                const cx* vv = &v[i * ny];
                const cx* qq = &qt[k * ny];
                for (std::size_t j = 0; j < ny; ++j)
                    inner += grids.y.weights[j] * vv[j] * std::conj(qq[j]);
                acc += grids.g.weights[i] * std::conj(e[i]) * inner;
            }
            const cx bb = conj_b ? std::conj(bv[k]) : bv[k];
            coef[k] = omega.weights[k] * bb * acc;
        }
        std::vector<cx> out(n, cx{0.0, 0.0});
        for (std::size_t k = 0; k < nw; ++k) {
            if (coef[k] == cx{0.0, 0.0}) continue;
            const cx* e = &et[k * ng];
            const cx* qq = &qt[k * ny];
            for (std::size_t i = 0; i < ng; ++i) {
                const cx a = coef[k] * e[i];
                cx* vv = &out[i * ny];
                for (std::size_t j = 0; j < ny; ++j) vv[j] += a * qq[j];
            }
        }
        return out;
    };

    NormResult res = power_iterate(
        w, n, [&](const std::vector<cx>& v) { return v_apply(v, false); },
        [&](const std::vector<cx>& v) { return v_apply(v, true); }, max_iter, tol);
    res.grid_sup_b = b.grid_sup(omega);
    return res;
}

// --------------------------------------------------------------------------
// Native-domain conjugation
// --------------------------------------------------------------------------

namespace {

enum class NativeKind { None, DiskRadial, AngularLogPolar, FockVertical };

NativeKind native_kind(const ModelSpace& m) {
    if (m.id() == "bergman-disk-radial") return NativeKind::DiskRadial;
    if (m.id() == "bergman-uhp-angular") return NativeKind::AngularLogPolar;
    if (m.id() == "shs-gaussian") return NativeKind::FockVertical;
    return NativeKind::None;
}

} // namespace

bool has_native_map(const ModelSpace& m) { return native_kind(m) != NativeKind::None; }

SampledField native_pull(const std::shared_ptr<const ModelSpace>& m, const FieldGrids& grids,
                         std::function<cx(cx)> f) {
    auto fn = std::make_shared<std::function<cx(cx)>>(std::move(f));
    switch (native_kind(*m)) {
        case NativeKind::DiskRadial:
            return sample_field(m, grids, [fn](const Pt& x, const Pt& y) {
                const cx z = std::polar(y.x(), x.x());
                return std::sqrt(kTwoPi) * (*fn)(z);
            });
        case NativeKind::AngularLogPolar:
            return sample_field(m, grids, [fn](const Pt& x, const Pt& y) {
                const cx z = std::exp(cx{x.x(), y.x()});
                return z * (*fn)(z);
            });
        case NativeKind::FockVertical:
            return sample_field(m, grids, [fn](const Pt& x, const Pt& y) {
                const cx z{x.x(), y.x()};
                return std::exp(-z * z / 2.0) * (*fn)(z);
            });
        default:
            throw std::invalid_argument("native_pull: no registered change of variables for " +
                                        m->id());
    }
}

cx native_push_eval(const ModelSpace& m, const SampledField& field, cx z) {
    if (!field.generator)
        throw std::invalid_argument("native_push_eval: field lacks a generator");
    switch (native_kind(m)) {
        case NativeKind::DiskRadial: {
            const double r = std::abs(z), th = reduce_angle(std::arg(z));
            return field.generator(Pt::of(th), Pt::of(r)) / std::sqrt(kTwoPi);
        }
        case NativeKind::AngularLogPolar: {
            const double r = std::log(std::abs(z)), th = std::arg(z);
            return field.generator(Pt::of(r), Pt::of(th)) / z;
        }
        case NativeKind::FockVertical: {
            const cx val = field.generator(Pt::of(z.real()), Pt::of(z.imag()));
            return std::exp(z * z / 2.0) * val;
        }
        default:
            throw std::invalid_argument("native_push_eval: no registered change of variables for " +
                                        m.id());
    }
}

} // namespace invker
