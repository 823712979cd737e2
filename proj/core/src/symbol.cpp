#include "invker/symbol.hpp"

#include <algorithm>
#include <mutex>
#include <cmath>
#include <stdexcept>

namespace invker {

// --------------------------------------------------------------------------
// SpectralSymbol
// --------------------------------------------------------------------------

SpectralSymbol SpectralSymbol::closed_form(std::function<cx(const Pt&)> eval,
                                           std::optional<double> sup_hint,
                                           std::vector<double> breakpoints) {
    SpectralSymbol s;
    s.eval_ = std::move(eval);
    s.sup_hint_ = sup_hint;
    s.breakpoints_ = std::move(breakpoints);
    return s;
}

SpectralSymbol SpectralSymbol::sampled(DualGrid grid, std::vector<cx> values) {
    if (grid.size() != values.size())
        throw std::invalid_argument("SpectralSymbol::sampled: grid/value length mismatch");
    for (const cx& v : values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("SpectralSymbol::sampled: non-finite value");
    SpectralSymbol s;
    s.sampled_ = Sampled{std::move(grid), std::move(values)};
    return s;
}

SpectralSymbol SpectralSymbol::one() {
    return closed_form([](const Pt&) { return cx{1.0, 0.0}; }, 1.0);
}

SpectralSymbol SpectralSymbol::indicator(double lo, double hi) {
    return closed_form(
        [lo, hi](const Pt& xi) {
            return cx{(xi.x() >= lo && xi.x() <= hi) ? 1.0 : 0.0, 0.0};
        },
        1.0, {lo, hi});
}

cx SpectralSymbol::operator()(const Pt& xi) const {
    if (!sampled_) return eval_(xi);
    // piecewise-linear in xi.x() over the sampled grid; exact at grid points
    const auto& pts = sampled_->grid.points;
    const auto& val = sampled_->values;
    if (pts.empty()) return cx{0.0, 0.0};
    const double x = xi.x();
    std::size_t hi = 0;
    while (hi < pts.size() && pts[hi].x() < x) ++hi;
    if (hi == 0) return val.front();
    if (hi >= pts.size()) return val.back();
    const double x0 = pts[hi - 1].x(), x1 = pts[hi].x();
    if (x1 == x0) return val[hi];
    const double t = (x - x0) / (x1 - x0);
    return (1.0 - t) * val[hi - 1] + t * val[hi];
}

std::vector<cx> SpectralSymbol::on_grid(const DualGrid& grid) const {
    std::vector<cx> out(grid.size());
    if (sampled_ && sampled_->grid.size() == grid.size()) {
        out = sampled_->values;
        return out;
    }
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = (*this)(grid.points[i]);
    return out;
}

double SpectralSymbol::grid_sup(const DualGrid& grid) const {
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) s = std::max(s, std::abs((*this)(grid.points[i])));
    return s;
}

PhiStatus phi_symbol_status(const SpectralSymbol& b) {
    return PhiStatus{!b.is_sampled() && !b.sup_hint().has_value()};
}

// --------------------------------------------------------------------------
// InvariantKernel
// --------------------------------------------------------------------------

InvariantKernel InvariantKernel::closed_form(
    std::string model_id, std::function<cx(const Pt&, const Pt&, const Pt&)> eval) {
    InvariantKernel k;
    k.model_id_ = std::move(model_id);
    k.eval_ = std::move(eval);
    return k;
}

InvariantKernel InvariantKernel::zero(std::string model_id) {
    InvariantKernel k;
    k.model_id_ = std::move(model_id);
    k.eval_ = [](const Pt&, const Pt&, const Pt&) { return cx{0.0, 0.0}; };
    k.zero_ = true;
    return k;
}

namespace {

std::size_t nearest_index_1d(const std::vector<Pt>& pts, double x) {
    std::size_t best = 0;
    double bd = std::abs(pts[0].x() - x);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double d = std::abs(pts[i].x() - x);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

} // namespace

InvariantKernel InvariantKernel::sampled(std::string model_id, SampledGrid g, YGrid y,
                                         std::vector<cx> tensor) {
    const std::size_t ng = g.size(), ny = y.size();
    if (tensor.size() != ng * ny * ny)
        throw std::invalid_argument("InvariantKernel::sampled: tensor shape mismatch");
    auto gp = std::make_shared<SampledGrid>(std::move(g));
    auto yp = std::make_shared<YGrid>(std::move(y));
    auto tp = std::make_shared<std::vector<cx>>(std::move(tensor));
    InvariantKernel k;
    k.model_id_ = std::move(model_id);
    // nearest-node lookup; adequate for CLI round trips of smooth kernels
    k.eval_ = [gp, yp, tp, ny](const Pt& x, const Pt& yy, const Pt& v) {
        const std::size_t i = nearest_index_1d(gp->points, x.x());
        const std::size_t j = nearest_index_1d(yp->points, yy.x());
        const std::size_t l = nearest_index_1d(yp->points, v.x());
        return (*tp)[(i * ny + j) * ny + l];
    };
    return k;
}

cx InvariantKernel::operator()(const Pt& x, const Pt& y, const Pt& v) const {
    return eval_(x, y, v);
}

// --------------------------------------------------------------------------
// phi_b
// --------------------------------------------------------------------------

cx phi_on_grid(const ModelSpace& m, const DualGrid& omega, const std::vector<cx>& b_values,
               const Pt& x, const Pt& y, const Pt& v) {
    if (b_values.size() != omega.size())
        throw std::invalid_argument("phi_on_grid: symbol/grid length mismatch");
    cx acc{0.0, 0.0};
    for (std::size_t k = 0; k < omega.size(); ++k) {
        const cx term = b_values[k] * m.L(omega.points[k], v, y);
        if (term == cx{0.0, 0.0}) continue;
        acc += omega.weights[k] * pairing(m.group(), x, omega.points[k]) * term;
    }
    return acc;
}

namespace {

// The integrand of phi_b carries E(x, xi): at large |x| the grid must resolve
// |x| * (Omega span) cycles or the panel sums are noise. Closed-form symbols
// get per-point grids with oscillation-scaled node counts (and panels aligned
// to any xi-jumps of the fiber kernel); a small memo keyed on (y, v, nodes)
// keeps repeated evaluations cheap. Sampled symbols stay tied to their grid.
struct PhiEvaluator {
    const ModelSpace& m;
    const SpectralSymbol& b;
    const DualGrid& shared;
    const std::vector<cx>& shared_values;
    OmegaQuad oq;

    struct Memo {
        double key[4] = {0, 0, 0, 0};
        int nodes = -1;
        DualGrid grid;
        std::vector<cx> values;
        bool valid = false;
    };
    mutable Memo memo;

    cx eval(const Pt& x, const Pt& y, const Pt& v) const {
        if (b.is_sampled()) return phi_on_grid(m, shared, shared_values, x, y, v);

        const int base = oq.nodes > 0 ? oq.nodes : m.defaults().n_omega;
        int need = base;
        if (m.group().dim() == 1 && m.group().kind != GroupKind::Circle) {
            const double span = shared.window.hi[0] - shared.window.lo[0];
            const double cycles = std::abs(x.x()) * span;
            need = std::max<int>(base, std::min(40000.0, 4.0 * cycles + base / 4.0));
        }

        std::vector<double> breaks = m.omega_breaks_for(y, v);
        if (breaks.empty() && need <= base)
            return phi_on_grid(m, shared, shared_values, x, y, v);

        // bucket the node count so nearby |x| reuse one grid
        int bucket = base;
        while (bucket < need) bucket += bucket / 2;

        const bool hit = memo.valid && memo.nodes == bucket && memo.key[0] == y.c[0] &&
                         memo.key[1] == y.c[1] && memo.key[2] == v.c[0] && memo.key[3] == v.c[1];
        if (!hit) {
            for (double t : b.breakpoints()) breaks.push_back(t);
            memo.grid = m.omega_grid(oq.omega_max, bucket, breaks);
            memo.values = b.on_grid(memo.grid);
            memo.key[0] = y.c[0];
            memo.key[1] = y.c[1];
            memo.key[2] = v.c[0];
            memo.key[3] = v.c[1];
            memo.nodes = bucket;
            memo.valid = true;
        }
        return phi_on_grid(m, memo.grid, memo.values, x, y, v);
    }
};

cx phi_point(const ModelSpace& m, const SpectralSymbol& b, const DualGrid& shared,
             const std::vector<cx>& shared_values, const OmegaQuad& oq, const Pt& x, const Pt& y,
             const Pt& v) {
    PhiEvaluator ev{m, b, shared, shared_values, oq};
    return ev.eval(x, y, v);
}

} // namespace

cx phi_from_symbol(const ModelSpace& m, const SpectralSymbol& b, const Pt& x, const Pt& y,
                   const Pt& v, const OmegaQuad& oq) {
    const DualGrid omega =
        b.grid() ? *b.grid() : m.omega_grid(oq.omega_max, oq.nodes, b.breakpoints());
    return phi_point(m, b, omega, b.on_grid(omega), oq, x, y, v);
}

InvariantKernel phi_kernel(const std::shared_ptr<const ModelSpace>& m, const SpectralSymbol& b,
                           const OmegaQuad& oq) {
    auto omega = std::make_shared<DualGrid>(
        b.grid() ? *b.grid() : m->omega_grid(oq.omega_max, oq.nodes, b.breakpoints()));
    auto values = std::make_shared<std::vector<cx>>(b.on_grid(*omega));
    auto mod = m;
    auto sym = std::make_shared<SpectralSymbol>(b);
    auto quad = oq;
    // one evaluator per kernel so its oscillation-grid memo survives across
    // calls; guarded for concurrent evaluation
    auto mtx = std::make_shared<std::mutex>();
    auto ev = std::make_shared<PhiEvaluator>(PhiEvaluator{*mod, *sym, *omega, *values, quad});
    InvariantKernel k = InvariantKernel::closed_form(
        m->id(), [mod, omega, values, sym, ev, mtx](const Pt& x, const Pt& y, const Pt& v) {
            std::lock_guard<std::mutex> lock(*mtx);
            return ev->eval(x, y, v);
        });
    k.set_phi_structure(InvariantKernel::PhiStructure{mod, omega, values});
    return k;
}

// --------------------------------------------------------------------------
// Fiber-division inverse
// --------------------------------------------------------------------------

SpectralSymbol symbol_from_kernel(const ModelSpace& m, const InvariantKernel& psi,
                                  const DualGrid& omega, const RecoveryGrids& grids,
                                  const Y0Policy& policy) {
    const std::vector<Pt> candidates =
        policy.candidates.empty() ? m.y0_candidates() : policy.candidates;
    const std::size_t ng = grids.g.size(), ny = grids.y.size(), nw = omega.size();

    const InvariantKernel::PhiStructure* ps = psi.phi_structure();
    if (ps && ps->model->id() != m.id()) ps = nullptr;

    // psi(u_i, v_j, y0) = sum_k w_k b_k E(u_i, xi_k) L(xi_k, y0, v_j) is
    // separable; precompute the E table once when the structure is available.
    std::shared_ptr<std::vector<cx>> e_table;
    if (ps) {
        e_table = std::make_shared<std::vector<cx>>(ps->omega->size() * ng);
        for (std::size_t k = 0; k < ps->omega->size(); ++k)
            for (std::size_t i = 0; i < ng; ++i)
                (*e_table)[k * ng + i] = pairing(m.group(), grids.g.points[i], ps->omega->points[k]);
    }

    // R psi(.,.,y0) per candidate, computed lazily the first time some grid
    // frequency needs it.
    std::vector<std::vector<cx>> r_psi(candidates.size());
    std::vector<char> ready(candidates.size(), 0);

    auto psi_slice = [&](const Pt& y0, std::vector<cx>& slice) {
        slice.assign(ng * ny, cx{0.0, 0.0});
        if (!ps) {
            for (std::size_t j = 0; j < ny; ++j)
                for (std::size_t i = 0; i < ng; ++i)
                    slice[i * ny + j] = grids.g.weights[i] < 1e-12
                                            ? cx{0.0, 0.0}
                                            : psi(grids.g.points[i], grids.y.points[j], y0);
            return;
        }
        const std::size_t nk = ps->omega->size();
        std::vector<cx> lw(ny);
        for (std::size_t k = 0; k < nk; ++k) {
            const cx bk = (*ps->values)[k];
            if (bk == cx{0.0, 0.0}) continue;
            const cx wk = ps->omega->weights[k] * bk;
            bool any = false;
            for (std::size_t j = 0; j < ny; ++j) {
                lw[j] = wk * m.L(ps->omega->points[k], y0, grids.y.points[j]);
                any = any || lw[j] != cx{0.0, 0.0};
            }
            if (!any) continue;
            const cx* e = &(*e_table)[k * ng];
            for (std::size_t i = 0; i < ng; ++i) {
                cx* row = &slice[i * ny];
                const cx ei = e[i];
                for (std::size_t j = 0; j < ny; ++j) row[j] += ei * lw[j];
            }
        }
    };

    auto ensure = [&](std::size_t c) {
        if (ready[c]) return;
        std::vector<cx> slice;
        psi_slice(candidates[c], slice);
        std::vector<cx>& out = r_psi[c];
        out.assign(nw, cx{0.0, 0.0});
        for (std::size_t k = 0; k < nw; ++k) {
            const Pt& xi = omega.points[k];
            cx acc{0.0, 0.0};
            for (std::size_t i = 0; i < ng; ++i) {
                const cx e = std::conj(pairing(m.group(), grids.g.points[i], xi));
                cx inner{0.0, 0.0};
                for (std::size_t j = 0; j < ny; ++j) {
                    cx qv;
                    try {
                        qv = m.q(xi, grids.y.points[j]);
                    } catch (const std::domain_error&) {
                        qv = cx{0.0, 0.0};
                    }
                    inner += grids.y.weights[j] * slice[i * ny + j] * std::conj(qv);
                }
                acc += grids.g.weights[i] * e * inner;
            }
            out[k] = acc;
        }
        ready[c] = 1;
    };

    // Per-frequency Y rule: evaluate R psi(.,.,y0) at one xi with a Y grid
    // tailored to that frequency (q support edges aligned).
    auto r_psi_at = [&](const Pt& xi, const Pt& y0) {
        const YGrid yg = grids.y_for_xi(xi);
        if (ps) {
            // sum_k w_k b_k [sum_i w_i conj(E(u_i,xi)) E(u_i,xi_k)]
            //             [sum_j wY_j conj(q(xi,v_j)) L(xi_k, y0, v_j)]
            const std::size_t nk = ps->omega->size();
            std::vector<cx> d(nk, cx{0.0, 0.0});
            std::vector<cx> er(ng);
            for (std::size_t i = 0; i < ng; ++i)
                er[i] = grids.g.weights[i] * std::conj(pairing(m.group(), grids.g.points[i], xi));
            for (std::size_t k = 0; k < nk; ++k) {
                const cx* e = &(*e_table)[k * ng];
                cx acc{0.0, 0.0};
                for (std::size_t i = 0; i < ng; ++i) acc += er[i] * e[i];
                d[k] = acc;
            }
            cx out{0.0, 0.0};
            for (std::size_t k = 0; k < nk; ++k) {
                const cx bk = (*ps->values)[k];
                if (bk == cx{0.0, 0.0}) continue;
                cx vpart{0.0, 0.0};
                for (std::size_t j = 0; j < yg.size(); ++j) {
                    cx qv;
                    try {
                        qv = m.q(xi, yg.points[j]);
                    } catch (const std::domain_error&) {
                        continue;
                    }
                    vpart += yg.weights[j] * std::conj(qv) *
                             m.L(ps->omega->points[k], y0, yg.points[j]);
                }
                out += ps->omega->weights[k] * bk * d[k] * vpart;
            }
            return out;
        }
        cx acc{0.0, 0.0};
        for (std::size_t j = 0; j < yg.size(); ++j) {
            cx qv;
            try {
                qv = m.q(xi, yg.points[j]);
            } catch (const std::domain_error&) {
                continue;
            }
            if (qv == cx{0.0, 0.0}) continue;
            cx inner{0.0, 0.0};
            for (std::size_t i = 0; i < ng; ++i) {
                if (grids.g.weights[i] < 1e-12) continue;
                inner += grids.g.weights[i] *
                         std::conj(pairing(m.group(), grids.g.points[i], xi)) *
                         psi(grids.g.points[i], yg.points[j], y0);
            }
            acc += yg.weights[j] * std::conj(qv) * inner;
        }
        return acc;
    };

    std::vector<cx> values(nw);
    for (std::size_t k = 0; k < nw; ++k) {
        const Pt& xi = omega.points[k];
        long pick = -1;
        for (double threshold : {policy.preferred_abs_q, policy.min_abs_q}) {
            for (std::size_t c = 0; c < candidates.size() && pick < 0; ++c) {
                cx qy0;
                try {
                    qy0 = m.q(xi, candidates[c]);
                } catch (const std::domain_error&) {
                    continue;
                }
                if (std::abs(qy0) >= threshold) pick = static_cast<long>(c);
            }
            if (pick >= 0) break;
        }
        if (pick < 0)
            throw std::runtime_error(
                "symbol_from_kernel: degenerate fiber, every y0 candidate has |q| below threshold");
        const cx qy0 = m.q(xi, candidates[pick]);
        if (grids.y_for_xi) {
            values[k] = r_psi_at(xi, candidates[pick]) / std::conj(qy0);
        } else {
            ensure(static_cast<std::size_t>(pick));
            values[k] = r_psi[pick][k] / std::conj(qy0);
        }
    }
    return SpectralSymbol::sampled(omega, std::move(values));
}

// The v-sum above is the hot path; swapping loops would help, but recovery is
// called a handful of times per suite so clarity wins.

// --------------------------------------------------------------------------
// Special symbols
// --------------------------------------------------------------------------

SpectralSymbol toeplitz_symbol(const std::shared_ptr<const ModelSpace>& m,
                               std::function<double(const Pt&)> g, const Window& y_window,
                               int ny, const std::vector<double>& y_breaks) {
    auto grid = std::make_shared<YGrid>(m->y_grid(y_window, ny, y_breaks));
    auto gp = std::make_shared<std::function<double(const Pt&)>>(std::move(g));
    double sup_g = 0.0;
    for (const Pt& p : grid->points) sup_g = std::max(sup_g, std::abs((*gp)(p)));
    auto mod = m;
    return SpectralSymbol::closed_form(
        [mod, grid, gp](const Pt& xi) {
            double acc = 0.0;
            for (std::size_t j = 0; j < grid->size(); ++j) {
                cx qv;
                try {
                    qv = mod->q(xi, grid->points[j]);
                } catch (const std::domain_error&) {
                    return cx{0.0, 0.0};
                }
                acc += grid->weights[j] * (*gp)(grid->points[j]) * std::norm(qv);
            }
            return cx{acc, 0.0};
        },
        sup_g);
}

WienerPair wiener_symbol(const std::shared_ptr<const ModelSpace>& m,
                         std::function<cx(const Pt&)> h, const Window& support, int n) {
    if (m->group().dim() != 1)
        throw std::invalid_argument("wiener_symbol: one-dimensional groups only");
    std::vector<double> pts, wts;
    quad::composite_gl(support.lo[0], support.hi[0], {}, n, pts, wts);
    auto hs = std::make_shared<std::vector<cx>>(pts.size());
    auto xs = std::make_shared<std::vector<double>>(pts);
    auto ws = std::make_shared<std::vector<double>>(wts);
    double l1 = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        (*hs)[i] = h(Pt::of(pts[i]));
        l1 += wts[i] * std::abs((*hs)[i]);
    }
    auto mod = m;
    SpectralSymbol b = SpectralSymbol::closed_form(
        [mod, hs, xs, ws](const Pt& xi) {
            cx acc{0.0, 0.0};
            for (std::size_t i = 0; i < xs->size(); ++i)
                acc += (*ws)[i] * (*hs)[i] * std::conj(pairing(mod->group(), Pt::of((*xs)[i]), xi));
            return acc;
        },
        l1);  // |Fh| <= ||h||_1
    InvariantKernel k = InvariantKernel::closed_form(
        m->id(), [mod, hs, xs, ws](const Pt& x, const Pt& y, const Pt& v) {
            cx acc{0.0, 0.0};
            for (std::size_t i = 0; i < xs->size(); ++i)
                acc += (*ws)[i] * (*hs)[i] *
                       mod->kernel0(mod->group_sub(x, Pt::of((*xs)[i])), v, y);
            return acc;
        });
    return WienerPair{std::move(b), std::move(k)};
}

InvariantKernel projection_kernel(const std::shared_ptr<const ModelSpace>& m,
                                  const std::vector<Window>& intervals, const OmegaQuad& oq) {
    double measure = 0.0;
    std::vector<double> edges;
    for (const Window& w : intervals) {
        measure += std::max(0.0, w.hi[0] - w.lo[0]);
        edges.push_back(w.lo[0]);
        edges.push_back(w.hi[0]);
    }
    if (intervals.empty() || measure == 0.0) return InvariantKernel::zero(m->id());
    auto iv = intervals;
    SpectralSymbol b = SpectralSymbol::closed_form(
        [iv](const Pt& xi) {
            for (const Window& w : iv)
                if (xi.x() >= w.lo[0] && xi.x() <= w.hi[0]) return cx{1.0, 0.0};
            return cx{0.0, 0.0};
        },
        1.0, edges);
    return phi_kernel(m, b, oq);
}

InvariantKernel projection_kernel(const std::shared_ptr<const ModelSpace>& m,
                                  const std::vector<long>& modes) {
    if (modes.empty()) return InvariantKernel::zero(m->id());
    auto ms = std::make_shared<std::vector<long>>(modes);
    auto mod = m;
    return InvariantKernel::closed_form(m->id(), [mod, ms](const Pt& x, const Pt& y, const Pt& v) {
        cx acc{0.0, 0.0};
        for (long k : *ms) {
            const Pt xi = Pt::of(static_cast<double>(k));
            acc += pairing(mod->group(), x, xi) * mod->L(xi, v, y);
        }
        return acc;
    });
}

} // namespace invker
