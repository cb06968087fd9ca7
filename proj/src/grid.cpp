#include "fibrelay/grid.hpp"
#include "fibrelay/errors.hpp"

#include <cmath>

namespace fibrelay {

Grid::Grid(const PotentialSpec& p, const GridSpec& spec) : pot(p) {
    if (spec.nx < 8 || spec.ny < 8) throw ConfigError("grid.nx and grid.ny must be >= 8");
    if (spec.nalpha < 8 || spec.nalpha % 2 != 0) throw ConfigError("grid.nalpha must be even and >= 8");
    nx = spec.nx;
    ny = spec.ny;
    nalpha = spec.nalpha;
    L = spec.L > 0.0 ? spec.L : truncation_radius(p, 1e-14);
    hx = 2.0 * L / nx;
    hy = 2.0 * L / ny;
    halpha = 2.0 * M_PI / nalpha;
    n2 = static_cast<std::size_t>(nx) * ny;
    n3 = n2 * nalpha;
    cell_quad = hx * hy / nalpha;

    xs.resize(nx);
    ys.resize(ny);
    for (int i = 0; i < nx; ++i) xs[i] = -L + (i + 0.5) * hx;
    for (int j = 0; j < ny; ++j) ys[j] = -L + (j + 0.5) * hy;
    alphas.resize(nalpha);
    cos_a.resize(nalpha);
    sin_a.resize(nalpha);
    cos_ah.resize(nalpha);
    sin_ah.resize(nalpha);
    for (int k = 0; k < nalpha; ++k) {
        alphas[k] = k * halpha;
        cos_a[k] = std::cos(alphas[k]);
        sin_a[k] = std::sin(alphas[k]);
        cos_ah[k] = std::cos(alphas[k] + 0.5 * halpha);
        sin_ah[k] = std::sin(alphas[k] + 0.5 * halpha);
    }

    V.resize(n2);
    expV.resize(n2);
    expmV.resize(n2);
    gradVx.resize(n2);
    gradVy.resize(n2);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const PotentialValue pv = eval_potential(p, {xs[i], ys[j]});
            const std::size_t q = idx2(i, j);
            V[q] = pv.V;
            expV[q] = std::exp(pv.V);
            expmV[q] = std::exp(-pv.V);
            gradVx[q] = pv.grad[0];
            gradVy[q] = pv.grad[1];
        }

    // gv = -e^V D_c e^{-V} with zero ghost cells, matching the transport
    // stencils; this makes the discrete equilibrium flux divergence-free.
    gvx.assign(n2, 0.0);
    gvy.assign(n2, 0.0);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const std::size_t q = idx2(i, j);
            const double e = expmV[q];
            const double exm = (i > 0) ? expmV[idx2(i - 1, j)] : 0.0;
            const double exp_ = (i < nx - 1) ? expmV[idx2(i + 1, j)] : 0.0;
            const double eym = (j > 0) ? expmV[idx2(i, j - 1)] : 0.0;
            const double eyp = (j < ny - 1) ? expmV[idx2(i, j + 1)] : 0.0;
            gvx[q] = -(exp_ - exm) / (2.0 * hx) / e;
            gvy[q] = -(eyp - eym) / (2.0 * hy) / e;
        }
}

void Grid::attach_weight(const WeightParams& w, double zeta) {
    if (!(zeta > 0.0)) throw ConfigError("zeta must be positive to attach the coercivity weight");
    w.validate();
    g.assign(n3, 0.0);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const std::size_t q = idx2(i, j);
            const double gn = std::hypot(gradVx[q], gradVy[q]);
            for (int k = 0; k < nalpha; ++k) {
                double logg;
                if (gn < 1e-300) {
                    // limit of log g along grad V -> 0 (the Y-term vanishes)
                    logg = w.beta * V[q];
                } else {
                    const double Y = (cos_a[k] * gradVx[q] + sin_a[k] * gradVy[q]) / gn;
                    logg = w.beta * V[q] + gn * gamma_profile(w, std::clamp(Y, -1.0, 1.0)).Gamma;
                }
                g[idx(i, j, k)] = std::exp(logg);
            }
        }
    zeta_kappa = zeta * w.kappa;
}

NormsAndMass norms_and_mass(const PhaseField& f) {
    const Grid& gr = *f.grid;
    NormsAndMass out{0.0, 0.0, 0.0};
    double mass = 0.0, n0 = 0.0, gpart = 0.0;
    // row-partial sums in fixed order keep the reduction deterministic
    for (std::size_t q = 0; q < gr.n2; ++q) {
        double srow = 0.0, s2row = 0.0, sgrow = 0.0;
        const double* fv = f.v.data() + q * gr.nalpha;
        if (gr.has_weight()) {
            const double* gv = gr.g.data() + q * gr.nalpha;
            for (int k = 0; k < gr.nalpha; ++k) {
                srow += fv[k];
                s2row += fv[k] * fv[k];
                sgrow += fv[k] * fv[k] * gv[k];
            }
        } else {
            for (int k = 0; k < gr.nalpha; ++k) {
                srow += fv[k];
                s2row += fv[k] * fv[k];
            }
        }
        mass += srow;
        n0 += s2row * gr.expV[q];
        gpart += sgrow;
    }
    out.mass = mass * gr.cell_quad;
    out.norm0 = std::sqrt(n0 * gr.cell_quad);
    out.normk = std::sqrt((n0 + gr.zeta_kappa * gpart) * gr.cell_quad);
    return out;
}

double mass_of(const PhaseField& f) { return norms_and_mass(f).mass; }

double inner0(const PhaseField& a, const PhaseField& b) {
    const Grid& gr = *a.grid;
    double acc = 0.0;
    for (std::size_t q = 0; q < gr.n2; ++q) {
        double row = 0.0;
        const double* av = a.v.data() + q * gr.nalpha;
        const double* bv = b.v.data() + q * gr.nalpha;
        for (int k = 0; k < gr.nalpha; ++k) row += av[k] * bv[k];
        acc += row * gr.expV[q];
    }
    return acc * gr.cell_quad;
}

double inner0_x(const Grid& gr, const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t q = 0; q < gr.n2; ++q) acc += a[q] * b[q] * gr.expV[q];
    return acc * gr.hx * gr.hy;
}

PhaseField equilibrium_field(const Grid& gr) {
    PhaseField f(gr);
    for (std::size_t q = 0; q < gr.n2; ++q)
        for (int k = 0; k < gr.nalpha; ++k) f.v[q * gr.nalpha + k] = gr.expmV[q];
    return f;
}

} // namespace fibrelay
