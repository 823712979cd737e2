#include "doctest.h"

#include <cmath>
#include <random>

#include "invker/operators.hpp"
#include "test_util.hpp"

using namespace invker;

namespace {

constexpr double kInvPi = 0.318309886183790671537767526745;

double rel_err(cx a, cx b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

SpectralSymbol smooth_bump(double lo, double hi, double amp = 1.0) {
    // C^3 polynomial bump supported on [lo, hi]: its kernels decay like 1/x^5,
    // so modest windows hold the box-product and composition tails
    return SpectralSymbol::closed_form(
        [lo, hi, amp](const Pt& xi) {
            const double x = xi.x();
            if (x <= lo || x >= hi) return cx{0.0, 0.0};
            const double t = (x - lo) / (hi - lo);
            const double u = t * (1.0 - t);
            const double b = 256.0 * u * u * u * u;
            return cx{amp * b, 0.0};
        },
        amp, {lo, hi});
}

} // namespace

TEST_CASE("analysis of a sampled kernel matches conj(E(x, xi) q_xi(y))") {
    auto vert = make_model("bergman-uhp-vertical");
    FieldGrids tg = transform_grids(*vert, 80.0);
    // fibers at frequency xi have scale 1/(4 pi xi) in v; the closed-form
    // norm identity integrates them all, so the Y rule reaches far out
    tg.y = vert->y_grid(Window::interval(0.0, 512.0), 96,
                        {4.0, 10.0, 24.0, 60.0, 150.0, 320.0});
    SampledField f = sample_kernel_field(vert, tg, Pt::of(0.3), Pt::of(0.5));
    DualGrid omega = vert->omega_grid(10.0, 360);
    std::vector<cx> rf = analysis_R(f, omega);
    double worst = 0.0;
    for (std::size_t k = 0; k < omega.size(); ++k) {
        const Pt& xi = omega.points[k];
        if (xi.x() < 0.2 || xi.x() > 4.0) continue;  // keep |q| well above noise
        const cx expect = std::conj(pairing(vert->group(), Pt::of(0.3), xi) * vert->q(xi, Pt::of(0.5)));
        worst = std::max(worst, rel_err(rf[k], expect));
    }
    CHECK(worst < 1e-6);

    // norm identity on the spectral side
    double e = 0.0;
    SampledField f0 = sample_kernel_field(vert, tg, Pt::of(0.0), Pt::of(0.5));
    std::vector<cx> rf0 = analysis_R(f0, omega);
    for (std::size_t k = 0; k < omega.size(); ++k) e += omega.weights[k] * std::norm(rf0[k]);
    CHECK(std::abs(e - kInvPi) / kInvPi < 1e-6);
}

TEST_CASE("analysis is linear") {
    auto vert = make_model("bergman-uhp-vertical");
    FieldGrids dg = default_grids(*vert);
    SampledField a = sample_kernel_field(vert, dg, Pt::of(0.2), Pt::of(0.6));
    SampledField b = sample_kernel_field(vert, dg, Pt::of(-0.4), Pt::of(0.9));
    SampledField c = a;
    const cx alpha{0.7, -0.3};
    for (std::size_t i = 0; i < c.values.size(); ++i)
        c.values[i] = alpha * a.values[i] + b.values[i];
    DualGrid omega = vert->omega_grid(6.0, 120);
    auto ra = analysis_R(a, omega), rb = analysis_R(b, omega), rc = analysis_R(c, omega);
    for (std::size_t k = 0; k < omega.size(); ++k)
        CHECK(std::abs(rc[k] - (alpha * ra[k] + rb[k])) < 1e-12);
}

TEST_CASE("synthesis inverts analysis on kernel coefficients and is adjoint to R") {
    auto vert = make_model("bergman-uhp-vertical");
    FieldGrids tg = transform_grids(*vert, 320.0);
    DualGrid omega = vert->omega_grid(10.0, 360);

    // the analysis of K_{0, 0.5} synthesizes back to it
    SampledField src = sample_kernel_field(vert, tg, Pt::of(0.0), Pt::of(0.5));
    std::vector<cx> g = analysis_R(src, omega);
    SampledField back = synthesis_Rstar(vert, g, omega, tg);
    for (double x : {-2.0, -0.5, 0.0, 1.0, 2.5})
        for (double y : {0.3, 0.6, 1.2}) {
            const cx expect = vert->kernel(Pt::of(x), Pt::of(y), Pt::of(0.0), Pt::of(0.5));
            CHECK(rel_err(back.generator(Pt::of(x), Pt::of(y)), expect) < 1e-6);
        }

    std::vector<cx> zero(omega.size(), cx{0.0, 0.0});
    SampledField zf = synthesis_Rstar(vert, zero, omega, tg);
    CHECK(field_norm(zf) == 0.0);

    // adjointness is an identity of finite sums
    std::mt19937 gen(61u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FieldGrids small = default_grids(*vert);
    DualGrid om2 = vert->omega_grid(6.0, 80);
    std::vector<cx> gg(om2.size());
    for (auto& z : gg) z = cx{u(gen), u(gen)};
    SampledField ff = sample_kernel_field(vert, small, Pt::of(0.1), Pt::of(0.7));
    SampledField rg = synthesis_Rstar(vert, gg, om2, small);
    std::vector<cx> rf = analysis_R(ff, om2);
    cx lhs = field_inner(rg, ff);
    cx rhs{0.0, 0.0};
    for (std::size_t k = 0; k < om2.size(); ++k)
        rhs += om2.weights[k] * gg[k] * std::conj(rf[k]);
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
}

TEST_CASE("V with the unit symbol is the identity on kernel fields") {
    // full-spectrum symbols see the small-xi window junk, which falls like
    // 1/X^3; the 320-half-width grid brings it under 1e-6
    auto vert = make_model("bergman-uhp-vertical");
    FieldGrids tg = transform_grids(*vert, 320.0);
    DualGrid omega = vert->omega_grid(10.0, 360);
    SampledField f = sample_kernel_field(vert, tg, Pt::of(0.0), Pt::of(0.5));
    SampledField vf = apply_V(f, SpectralSymbol::one(), omega);
    double worst = 0.0;
    for (double x : {-3.0, -1.0, 0.0, 0.4, 1.7, 3.0})
        for (double y : {0.25, 0.5, 1.0, 2.0}) {
            const cx expect = f.generator(Pt::of(x), Pt::of(y));
            worst = std::max(worst, rel_err(vf.generator(Pt::of(x), Pt::of(y)), expect));
        }
    CHECK(worst < 1e-6);
}

TEST_CASE("V_b on a kernel is a translate of phi_b") {
    // (V_b K_{x,y})(u,v) = phi_b(u-x, v, y)
    auto vert = make_model("bergman-uhp-vertical");
    FieldGrids tg = transform_grids(*vert, 80.0);
    DualGrid omega = vert->omega_grid(10.0, 360);
    const Pt x0 = Pt::of(0.4), y0 = Pt::of(0.5);
    SampledField f = sample_kernel_field(vert, tg, x0, y0);
    SpectralSymbol b = smooth_bump(0.3, 3.0);
    SampledField vf = apply_V(f, b, omega);
    std::mt19937 gen(67u);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        const Pt uu = Pt::of(-2.0 + 4.0 * u(gen));
        const Pt vv = Pt::of(0.3 + 1.2 * u(gen));
        const cx lhs = vf.generator(uu, vv);
        const cx rhs = phi_from_symbol(*vert, b, vert->group_sub(uu, x0), vv, y0);
        CHECK(rel_err(lhs, rhs) < 1e-6);
    }
}

TEST_CASE("diagonalization: R(V_b f) = b . Rf pointwise on the spectral grid") {
    // the R R* composition must resolve the analysis window's spectral spike,
    // so this test keeps the uniform recovery-grade grid
    auto vert = make_model("bergman-uhp-vertical");
    FieldGrids tg = transform_grids(*vert, 44.0);
    DualGrid omega = testutil::uniform_omega(*vert, 1e-6, 8.0, 0.008, false);
    SampledField f = sample_kernel_field(vert, tg, Pt::of(0.0), Pt::of(0.5));
    SpectralSymbol b = smooth_bump(0.3, 3.0);
    SampledField vf = apply_V(f, b, omega);
    std::vector<cx> lhs = analysis_R(vf, omega);
    std::vector<cx> rf = analysis_R(f, omega);
    const std::vector<cx> bv = b.on_grid(omega);
    double worst = 0.0;
    for (std::size_t k = 0; k < omega.size(); ++k) {
        const double xi = omega.points[k].x();
        if (xi < 0.4 || xi > 2.8) continue;  // inside the bump's support
        worst = std::max(worst, std::abs(lhs[k] - bv[k] * rf[k]) /
                                    std::max(1e-12, std::abs(bv[k] * rf[k])));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("apply_S with the unit kernel reproduces kernels; S and V agree") {
    auto vert = make_model("bergman-uhp-vertical");
    FieldGrids small;
    small = transform_grids(*vert, 320.0);
    small.y = vert->y_grid(Window::interval(0.0, 800.0), 104, {4.0, 10.0, 30.0, 65.0, 150.0, 400.0});
    SampledField f = sample_kernel_field(vert, small, Pt::of(0.0), Pt::of(0.5));

    InvariantKernel phi1 = phi_kernel(vert, SpectralSymbol::one(), OmegaQuad{12.0, 500});
    SampledField s1 = apply_S(f, phi1);
    for (double x : {-1.0, 0.0, 0.8})
        for (double y : {0.4, 0.8}) {
            const cx expect = f.generator(Pt::of(x), Pt::of(y));
            // locate the nearest grid point to read the filled value
            std::size_t bi = 0, bj = 0;
            for (std::size_t i = 0; i < small.g.size(); ++i)
                if (std::abs(small.g.points[i].x() - x) <
                    std::abs(small.g.points[bi].x() - x))
                    bi = i;
            for (std::size_t j = 0; j < small.y.size(); ++j)
                if (std::abs(small.y.points[j].x() - y) <
                    std::abs(small.y.points[bj].x() - y))
                    bj = j;
            const cx got = s1.values[bi * small.y.size() + bj];
            const cx want = f.generator(small.g.points[bi], small.y.points[bj]);
            (void)expect;
            CHECK(rel_err(got, want) < 1e-5);
        }

    // (S_psi K_{p,q})(x,y) = psi(x-p, y, q), checked through the generator
    FieldGrids med = transform_grids(*vert, 60.0);
    med.y = vert->y_grid(Window::interval(0.0, 8.0), 28, {4.0});
    SpectralSymbol b = smooth_bump(0.3, 2.5);
    InvariantKernel phib = phi_kernel(vert, b, OmegaQuad{12.0, 500});
    SampledField kpq = sample_kernel_field(vert, med, Pt::of(0.6), Pt::of(0.8));
    SampledField skpq = apply_S(kpq, phib);
    for (double x : {-0.7, 0.1, 1.4})
        for (double y : {0.35, 1.1}) {
            const cx expect = phib(vert->group_sub(Pt::of(x), Pt::of(0.6)), Pt::of(y), Pt::of(0.8));
            CHECK(rel_err(skpq.generator(Pt::of(x), Pt::of(y)), expect) < 1e-5);
        }

    // two routes to the same operator agree at sample points
    SampledField fm = sample_kernel_field(vert, med, Pt::of(0.0), Pt::of(0.5));
    DualGrid omega = vert->omega_grid(12.0, 500);
    SampledField vf = apply_V(fm, b, omega);
    SampledField sf2 = apply_S(fm, phib);
    for (double x : {-1.2, 0.0, 0.5, 2.0})
        for (double y : {0.4, 1.0}) {
            const cx s2 = sf2.generator(Pt::of(x), Pt::of(y));
            const cx v2 = vf.generator(Pt::of(x), Pt::of(y));
            CHECK(std::abs(s2 - v2) <= 1e-6 * (1.0 + std::abs(v2)));
        }
}

TEST_CASE("translations") {
    auto vert = make_model("bergman-uhp-vertical");
    FieldGrids tg = transform_grids(*vert, 320.0);
    SampledField f = sample_kernel_field(vert, tg, Pt::of(0.0), Pt::of(0.5));

    // a = 0 is the identity
    SampledField f0 = rho_translate(f, Pt::of(0.0));
    CHECK(field_max_abs_diff(f, f0) == 0.0);

    // rho(a) K_{0,v} = K_{a,v} through the generator route
    SampledField fa = rho_translate(f, Pt::of(0.3));
    for (double x : {-1.0, 0.2, 1.5})
        for (double y : {0.3, 0.9}) {
            const cx expect = vert->kernel(Pt::of(x), Pt::of(y), Pt::of(0.3), Pt::of(0.5));
            CHECK(rel_err(fa.generator(Pt::of(x), Pt::of(y)), expect) < 1e-13);
        }

    // Fourier route: V with b = E_{-a} equals the shift on kernel fields
    DualGrid omega = vert->omega_grid(10.0, 360);
    const double a = 0.3;
    SpectralSymbol shift = SpectralSymbol::closed_form(
        [a, vert](const Pt& xi) {
            return std::conj(pairing(vert->group(), Pt::of(a), xi));
        },
        1.0);
    SampledField via_v = apply_V(f, shift, omega);
    double worst = 0.0;
    for (double x : {-1.5, 0.0, 0.7, 2.0})
        for (double y : {0.3, 0.7, 1.4})
            worst = std::max(worst, rel_err(via_v.generator(Pt::of(x), Pt::of(y)),
                                            fa.generator(Pt::of(x), Pt::of(y))));
    CHECK(worst < 1e-6);

    // interpolation route for generator-free real-line fields
    SampledField raw = f;
    raw.generator = nullptr;
    raw.padding = 1.0;
    SampledField ra = rho_translate(raw, Pt::of(0.25));
    double werr = 0.0;
    for (std::size_t i = 0; i < raw.ng(); ++i) {
        const double x = raw.g.points[i].x();
        if (std::abs(x) > 100.0) continue;  // stay where the taper leaves mass
        for (std::size_t j = 0; j < raw.ny(); ++j) {
            const cx expect = f.generator(Pt::of(x - 0.25), raw.y.points[j]);
            werr = std::max(werr, std::abs(ra.values[i * raw.ny() + j] - expect));
        }
    }
    CHECK(werr < 1e-6);
    CHECK_THROWS_AS(rho_translate(raw, Pt::of(2.0)), std::invalid_argument);

    // circle translation is exact through trigonometric interpolation
    auto disk = make_model("bergman-disk-radial");
    FieldGrids dg = default_grids(*disk);
    SampledField df = sample_kernel_field(disk, dg, Pt::of(0.4), Pt::of(0.5));
    SampledField draw = df;
    draw.generator = nullptr;
    SampledField drot = rho_translate(draw, Pt::of(0.7));
    double derr = 0.0;
    for (std::size_t i = 0; i < draw.ng(); ++i)
        for (std::size_t j = 0; j < draw.ny(); ++j) {
            const cx expect = df.generator(disk->group_sub(draw.g.points[i], Pt::of(0.7)),
                                           draw.y.points[j]);
            derr = std::max(derr, std::abs(drot.values[i * draw.ny() + j] - expect));
        }
    CHECK(derr < 1e-7);  // limited by the kernel series tail beyond the mode count
}

TEST_CASE("intertwining: V_b commutes with translations on kernel fields") {
    auto vert = make_model("bergman-uhp-vertical");
    FieldGrids tg = transform_grids(*vert, 80.0);
    DualGrid omega = vert->omega_grid(10.0, 360);
    SpectralSymbol b = smooth_bump(0.3, 3.0);
    SampledField f = sample_kernel_field(vert, tg, Pt::of(0.0), Pt::of(0.5));
    const double fn = field_norm(f);
    for (double a : {0.1, 0.5}) {
        SampledField lhs = apply_V(rho_translate(f, Pt::of(a)), b, omega);
        SampledField rhs = rho_translate(apply_V(f, b, omega), Pt::of(a));
        SampledField diff = lhs;
        for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= rhs.values[i];
        CHECK(field_norm(diff) <= 1e-6 * fn);
    }
}

TEST_CASE("isometry of R on random kernel combinations") {
    auto vert = make_model("bergman-uhp-vertical");
    FieldGrids tg = transform_grids(*vert, 160.0);
    DualGrid omega = vert->omega_grid(12.0, 700);
    std::mt19937 gen(71u);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 5; ++t) {
        std::vector<cx> coef;
        std::vector<SampledField> parts;
        SampledField acc;
        for (int p = 0; p < 3; ++p) {
            const Pt x0 = Pt::of(-1.5 + 3.0 * u(gen));
            const Pt y0 = Pt::of(0.3 + 1.2 * u(gen));
            SampledField kf = sample_kernel_field(vert, tg, x0, y0);
            const cx c{-1.0 + 2.0 * u(gen), -1.0 + 2.0 * u(gen)};
            if (p == 0) {
                acc = kf;
                for (auto& z : acc.values) z *= c;
            } else {
                for (std::size_t i = 0; i < acc.values.size(); ++i)
                    acc.values[i] += c * kf.values[i];
            }
        }
        acc.generator = nullptr;
        const double grid_norm = field_norm(acc);
        std::vector<cx> rf = analysis_R(acc, omega);
        double spec = 0.0;
        for (std::size_t k = 0; k < omega.size(); ++k) spec += omega.weights[k] * std::norm(rf[k]);
        const double ratio = spec / (grid_norm * grid_norm);
        CHECK(std::abs(ratio - 1.0) < 1e-6);
    }
}

TEST_CASE("Toeplitz operators") {
    auto vert = make_model("bergman-uhp-vertical");
    FieldGrids tg = testutil::wide_reproducing_grids(*vert);
    SampledField f = sample_kernel_field(vert, tg, Pt::of(0.0), Pt::of(0.5));

    // T_1 = I on H
    SampledField t1 = toeplitz_apply(f, [](const Pt&) { return 1.0; });
    double worst = 0.0;
    for (double x : {-1.0, 0.0, 0.9})
        for (double y : {0.35, 0.8}) {
            worst = std::max(worst, rel_err(t1.generator(Pt::of(x), Pt::of(y)),
                                            f.generator(Pt::of(x), Pt::of(y))));
        }
    CHECK(worst < 1e-6);

    // T_g = V_{gamma_g} through two independent quadrature routes
    SpectralSymbol gamma = toeplitz_symbol(
        vert, [](const Pt& t) { return std::exp(-t.x()); }, Window::interval(0.0, 14.0), 320);
    DualGrid omega = vert->omega_grid(10.0, 360);
    SampledField via_v = apply_V(f, gamma, omega);
    SampledField via_t = toeplitz_apply(f, [](const Pt& t) { return std::exp(-t.x()); });
    worst = 0.0;
    for (double x : {-1.2, 0.0, 0.6, 1.8})
        for (double y : {0.3, 0.7, 1.3})
            worst = std::max(worst, rel_err(via_t.generator(Pt::of(x), Pt::of(y)),
                                            via_v.generator(Pt::of(x), Pt::of(y))));
    CHECK(worst < 1e-6);

    // contraction for 0 <= g <= 1 on evaluation grids with y >= 0.05 (the
    // direct quadrature cannot resolve the kernel blow-up below that)
    FieldGrids small = default_grids(*vert);
    small.y = vert->y_grid(Window::interval(0.05, 4.0), 32);
    SampledField fs = sample_kernel_field(vert, small, Pt::of(0.0), Pt::of(0.5));
    SampledField tg1 = toeplitz_apply(fs, [](const Pt& t) { return t.x() < 1.0 ? 1.0 : 0.0; });
    CHECK(field_norm(tg1) <= field_norm(fs) * (1.0 + 1e-8));
}

TEST_CASE("dense matrices: apply_S consistency, adjoint, composition") {
    auto vert = make_model("bergman-uhp-vertical");
    FieldGrids grids;
    grids.g = build_grid(vert->group(), Window::interval(-6.0, 6.0), 40, QuadRule::GaussLegendre);
    // the composition's internal t-integral carries e^{-2 pi (xi+xi') t}
    // factors; the window must cover them at the symbols' lower support edge
    grids.y = vert->y_grid(Window::interval(0.0, 6.0), 40);

    SpectralSymbol b = smooth_bump(0.35, 0.9);
    SpectralSymbol c = smooth_bump(0.4, 0.85, 0.7);
    InvariantKernel phib = phi_kernel(vert, b, OmegaQuad{2.0, 300});
    InvariantKernel phic = phi_kernel(vert, c, OmegaQuad{2.0, 300});

    DiscretizedOperator mb = assemble_matrix(vert, phib, grids);

    // matrix-vector equals apply_S on the same quadrature
    SampledField f = sample_kernel_field(vert, grids, Pt::of(0.0), Pt::of(0.5));
    std::vector<cx> mv = apply_matrix(mb, f.values);
    SampledField sf = apply_S(f, phib);
    double worst = 0.0;
    for (std::size_t i = 0; i < mv.size(); ++i) worst = std::max(worst, std::abs(mv[i] - sf.values[i]));
    CHECK(worst < 1e-12);

    // adjoint: assemble(psi-dagger) equals the weight-corrected conj transpose
    auto phib_shared = std::make_shared<InvariantKernel>(phib);
    auto mod = vert;
    InvariantKernel dag = InvariantKernel::closed_form(
        vert->id(), [phib_shared, mod](const Pt& x, const Pt& y, const Pt& v) {
            return std::conj((*phib_shared)(mod->group_sub(Pt::of(0.0), x), v, y));
        });
    DiscretizedOperator mdag = assemble_matrix(vert, dag, grids);
    CHECK(matrix_norm_distance(mdag, matrix_adjoint(mb)) < 1e-10);

    // composition against the product symbol
    SpectralSymbol bc = SpectralSymbol::closed_form(
        [b, c](const Pt& xi) { return b(xi) * c(xi); }, 1.0);
    DiscretizedOperator mc = assemble_matrix(vert, phic, grids);
    DiscretizedOperator mbc = assemble_matrix(vert, phi_kernel(vert, bc, OmegaQuad{2.0, 300}), grids);

    // power iteration on the interior restriction of D v = Mb(Mc v) - Mbc v:
    // a windowed composition needs padding, so rows and columns within the
    // kernels' reach of the window edge are masked out
    std::vector<double> mask(mb.rows, 0.0);
    const std::size_t nyy = grids.y.size();
    for (std::size_t r = 0; r < mb.rows; ++r)
        mask[r] = std::abs(grids.g.points[r / nyy].x()) <= 3.0 ? 1.0 : 0.0;
    std::vector<cx> v(mb.rows);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = cx{mask[i], 0.0};
    double sigma = 0.0;
    for (int it = 0; it < 60; ++it) {
        std::vector<cx> vm = v;
        for (std::size_t i = 0; i < vm.size(); ++i) vm[i] *= mask[i];
        std::vector<cx> av = apply_matrix(mb, apply_matrix(mc, vm));
        std::vector<cx> bv2 = apply_matrix(mbc, vm);
        for (std::size_t i = 0; i < av.size(); ++i) av[i] = (av[i] - bv2[i]) * mask[i];
        std::vector<cx> bk = apply_matrix_adjoint(mc, apply_matrix_adjoint(mb, av));
        std::vector<cx> bk2 = apply_matrix_adjoint(mbc, av);
        for (std::size_t i = 0; i < bk.size(); ++i) bk[i] = (bk[i] - bk2[i]) * mask[i];
        double nn = 0.0, na = 0.0;
        for (std::size_t i = 0; i < bk.size(); ++i) {
            nn += mb.w[i] * std::norm(bk[i]);
            na += mb.w[i] * std::norm(av[i]);
        }
        sigma = std::sqrt(na);
        if (nn == 0.0) break;
        const double s = std::sqrt(nn);
        for (auto& z : bk) z /= s;
        v = std::move(bk);
    }
    CHECK(sigma < 1e-5);

    // the guard refuses oversized grids
    FieldGrids big;
    big.g = build_grid(vert->group(), Window::interval(-6.0, 6.0), 800, QuadRule::GaussLegendre);
    big.y = vert->y_grid(Window::interval(0.0, 4.0), 32);
    CHECK_THROWS_AS(assemble_matrix(vert, phib, big), std::invalid_argument);
}

TEST_CASE("operator norms") {
    auto vert = make_model("bergman-uhp-vertical");
    FieldGrids grids;
    grids.g = build_grid(vert->group(), Window::interval(-6.0, 6.0), 96, QuadRule::GaussLegendre);
    grids.y = vert->y_grid(Window::interval(0.0, 4.0), 24);
    DualGrid omega = vert->omega_grid(4.0, 280);

    NormResult n1 = operator_norm(vert, SpectralSymbol::one(), omega, grids);
    CHECK(n1.grid_sup_b == doctest::Approx(1.0));
    CHECK(std::abs(n1.value - 1.0) < 0.02);

    NormResult ni = operator_norm(vert, SpectralSymbol::indicator(1.0, 2.0), omega, grids);
    CHECK(std::abs(ni.value - 1.0) < 0.02);

    auto disk = make_model("bergman-disk-radial");
    FieldGrids dgr = default_grids(*disk);
    DualGrid dom = disk->omega_grid(0.0, 0);
    SpectralSymbol bk = SpectralSymbol::closed_form(
        [](const Pt& xi) { return cx{1.0 / (xi.x() + 1.0), 0.0}; }, 1.0);
    NormResult nd = operator_norm(disk, bk, dom, dgr);
    CHECK(std::abs(nd.value - 1.0) < 1e-8);
    CHECK(nd.grid_sup_b == doctest::Approx(1.0));
}

TEST_CASE("radial eigenvalue law through the native conjugation") {
    auto disk = make_model("bergman-disk-radial");
    FieldGrids dg = default_grids(*disk);
    DualGrid omega = disk->omega_grid(0.0, 0);

    // b = (0,1,0,...) annihilates 1 and z^2 and fixes z
    std::vector<cx> sel(omega.size(), cx{0.0, 0.0});
    for (std::size_t k = 0; k < omega.size(); ++k)
        if (std::lround(omega.points[k].x()) == 1) sel[k] = cx{1.0, 0.0};
    SpectralSymbol b1 = SpectralSymbol::sampled(omega, sel);

    auto Ab = [&](std::function<cx(cx)> f, cx z) {
        SampledField uf = native_pull(disk, dg, std::move(f));
        SampledField v = apply_V(uf, b1, omega);
        return native_push_eval(*disk, v, z);
    };
    for (cx z : {cx{0.3, 0.2}, cx{-0.5, 0.1}, cx{0.0, 0.6}}) {
        CHECK(std::abs(Ab([](cx w) { return w; }, z) - z) < 1e-10);
        CHECK(std::abs(Ab([](cx w) { return w * w; }, z)) < 1e-10);
        CHECK(std::abs(Ab([](cx) { return cx{1.0, 0.0}; }, z)) < 1e-10);
    }

    // general monomials: A_b z^k = b_k z^k for k <= 8
    std::vector<cx> seq(omega.size());
    for (std::size_t k = 0; k < omega.size(); ++k)
        seq[k] = cx{1.0 / (1.0 + omega.points[k].x()), 0.0};
    SpectralSymbol bs = SpectralSymbol::sampled(omega, seq);
    for (int k = 0; k <= 8; ++k) {
        const cx z{0.4, 0.3};
        SampledField uf = native_pull(disk, dg, [k](cx w) {
            cx r{1.0, 0.0};
            for (int p = 0; p < k; ++p) r *= w;
            return r;
        });
        SampledField v = apply_V(uf, bs, omega);
        cx zk{1.0, 0.0};
        for (int p = 0; p < k; ++p) zk *= z;
        CHECK(std::abs(native_push_eval(*disk, v, z) - zk / (k + 1.0)) < 1e-10);
    }
}

TEST_CASE("angular and Fock conjugations") {
    auto ang = make_model("bergman-uhp-angular");
    FieldGrids ag = default_grids(*ang);
    // U*U = identity on a native function
    auto f = [](cx z) { return 1.0 / ((z + cx{0.0, 1.0}) * (z + cx{0.0, 1.0})); };
    SampledField uf = native_pull(ang, ag, f);
    for (cx z : {cx{0.3, 0.8}, cx{-1.0, 2.0}, cx{2.0, 0.4}})
        CHECK(std::abs(native_push_eval(*ang, uf, z) - f(z)) < 1e-10);

    // Fock: A_1 fixes coherent states within quadrature tolerance
    auto shs = make_model("shs-gaussian", ModelParams{std::sqrt(0.5), 1});
    FieldGrids sg;
    sg.g = build_grid(shs->group(), Window::interval(-6.0, 6.0), 128, QuadRule::GaussLegendre);
    sg.y = shs->y_grid(Window::interval(-4.0, 4.0), 48);
    DualGrid som = shs->omega_grid(3.0, 400);
    const cx cc{0.4, -0.3};
    auto coherent = [cc](cx z) { return std::exp(z * std::conj(cc) - std::norm(cc) / 2.0); };
    SampledField su = native_pull(shs, sg, coherent);
    SampledField sv = apply_V(su, SpectralSymbol::one(), som);
    for (cx z : {cx{0.2, 0.1}, cx{-0.5, 0.4}, cx{0.8, -0.2}})
        CHECK(std::abs(native_push_eval(*shs, sv, z) - coherent(z)) < 1e-5);

    auto wav = make_model("wavelet-shannon");
    CHECK_FALSE(has_native_map(*wav));
    FieldGrids wg = default_grids(*wav);
    CHECK_THROWS_AS(native_pull(wav, wg, [](cx) { return cx{1.0, 0.0}; }), std::invalid_argument);
}

TEST_CASE("SHS 2D transforms at desk scale") {
    auto shs2 = make_model("shs-gaussian", ModelParams{1.0, 2});
    FieldGrids g2;
    g2.g = build_grid(shs2->group(), Window::box(-4.0, 4.0, -4.0, 4.0), 20, QuadRule::GaussLegendre);
    g2.y = shs2->y_grid(Window::box(-2.5, 2.5, -2.5, 2.5), 14);
    DualGrid om2 = shs2->omega_grid(2.5, 36);
    SampledField f = sample_kernel_field(shs2, g2, Pt::of(0.1, -0.2), Pt::of(0.3, 0.2));
    SampledField vf = apply_V(f, SpectralSymbol::one(), om2);
    double worst = 0.0;
    for (double x : {-0.6, 0.3})
        for (double y : {-0.4, 0.5}) {
            const Pt p = Pt::of(x, y), q = Pt::of(0.2 * x, -0.3 * y);
            worst = std::max(worst, rel_err(vf.generator(p, q), f.generator(p, q)));
        }
    CHECK(worst < 1e-4);
}
