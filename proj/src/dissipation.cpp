#include "fibrelay/kinetic.hpp"

#include <cmath>

namespace fibrelay {

namespace {

// int a b dx on the x-grid (plain Lebesgue quadrature)
double inner_plain_x(const Grid& gr, const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t q = 0; q < gr.n2; ++q) acc += a[q] * b[q];
    return acc * gr.hx * gr.hy;
}

// kappa * int D_c(u) pif dx with reflected ghosts; equals <P* A f, Pi f>_0
double pstar_inner(const Grid& gr, const std::vector<double>& u, const std::vector<double>& pif,
                   double kappa) {
    const int nx = gr.nx, ny = gr.ny;
    double acc = 0.0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const std::size_t q = gr.idx2(i, j);
            const double up = (i < nx - 1) ? u[gr.idx2(i + 1, j)] : u[q];
            const double um = (i > 0) ? u[gr.idx2(i - 1, j)] : u[q];
            acc += (up - um) * pif[q];
        }
    return kappa * acc / (2.0 * gr.hx) * gr.hx * gr.hy;
}

} // namespace

DissipationReport dissipation_terms(KineticOps& ops, const PhaseField& f, double kappa,
                                    double eps1, double gamma1, double gamma2_gronwall) {
    const Grid& gr = ops.grid();
    DissipationReport rep{};

    std::vector<double> pif;
    ops.project(f, pif);
    const PhaseField f1 = ops.fluct(f);

    const PhaseField qf = ops.apply_Q(f);
    const PhaseField tf = ops.apply_T(f);
    const PhaseField pf = ops.apply_P(f, kappa);

    // <Q f, f>_0
    const double term_qff = inner0(qf, f);

    // <A T Pi f, Pi f>_0 = ||Pi f||_0^2 - int u_h Pi f dx, u_h from the
    // resolvent identity (1+X)^{-1} X = 1 - (1+X)^{-1}
    const std::vector<double> u_h = ops.solve_helmholtz(pif);
    const double pif_norm2 = inner0_x(gr, pif, pif);
    const double term_atp = pif_norm2 - inner_plain_x(gr, u_h, pif);

    // <A T (1-Pi) f, Pi f>_0
    const PhaseField ttf1 = ops.apply_T(ops.apply_T(f1));
    std::vector<double> r1;
    ops.project(ttf1, r1);
    for (double& x : r1) x = -x;
    const std::vector<double> u1 = ops.solve_helmholtz(r1);
    const double term_at1 = inner_plain_x(gr, u1, pif);

    // A f = e^{-V} u_A with u_A solving rhs = -Pi T f
    std::vector<double> rA;
    ops.project(tf, rA);
    for (double& x : rA) x = -x;
    const std::vector<double> u_A = ops.solve_helmholtz(rA);

    // <T A f, (1-Pi) f>_0
    std::vector<double> af_x(gr.n2);
    for (std::size_t q = 0; q < gr.n2; ++q) af_x[q] = gr.expmV[q] * u_A[q];
    const PhaseField taf = ops.apply_T_xfield(af_x);
    const double term_taf = inner0(taf, f1);

    // <A Q f, Pi f>_0
    const PhaseField tqf = ops.apply_T(qf);
    std::vector<double> rq;
    ops.project(tqf, rq);
    for (double& x : rq) x = -x;
    const std::vector<double> u_q = ops.solve_helmholtz(rq);
    const double term_aqf = inner_plain_x(gr, u_q, pif);

    rep.D0 = term_qff - eps1 * term_atp - eps1 * term_at1 + eps1 * term_taf + eps1 * term_aqf;

    if (kappa != 0.0) {
        const PhaseField tpf = ops.apply_T(pf);
        std::vector<double> rp;
        ops.project(tpf, rp);
        for (double& x : rp) x = -x;
        const std::vector<double> u_p = ops.solve_helmholtz(rp);
        const double term_ap = inner_plain_x(gr, u_p, pif);
        const double term_pa = pstar_inner(gr, u_A, pif, kappa);
        rep.D1 = eps1 * (term_ap + term_pa);
        rep.D2 = inner0(pf, f);
    }

    if (kappa != 0.0 && gr.has_weight()) {
        // kappa zeta int L(f) f g dx dalpha / 2pi ; gr.zeta_kappa = zeta kappa
        PhaseField gen = qf;
        for (std::size_t t = 0; t < gr.n3; ++t) gen.v[t] += -tf.v[t] + pf.v[t];
        double acc = 0.0;
        for (std::size_t q = 0; q < gr.n2; ++q) {
            double row = 0.0;
            const double* gv = gen.v.data() + q * gr.nalpha;
            const double* fv = f.v.data() + q * gr.nalpha;
            const double* wv = gr.g.data() + q * gr.nalpha;
            for (int k = 0; k < gr.nalpha; ++k) row += gv[k] * fv[k] * wv[k];
            acc += row;
        }
        rep.D3 = gr.zeta_kappa * acc * gr.cell_quad;
    }

    rep.dGdt = rep.D0 + rep.D1 + rep.D2 + rep.D3;

    const NormsAndMass nm = norms_and_mass(f);
    rep.mass = nm.mass;
    rep.norm0 = nm.norm0;
    rep.normk = nm.normk;
    // G from the same u_h solve as the entropy definition
    {
        const int nx = gr.nx, ny = gr.ny, na = gr.nalpha;
        double acc = 0.0;
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j) {
                const std::size_t q = gr.idx2(i, j);
                const double up = (i < nx - 1) ? u_h[gr.idx2(i + 1, j)] : u_h[q];
                const double um = (i > 0) ? u_h[gr.idx2(i - 1, j)] : u_h[q];
                const double vp = (j < ny - 1) ? u_h[gr.idx2(i, j + 1)] : u_h[q];
                const double vm = (j > 0) ? u_h[gr.idx2(i, j - 1)] : u_h[q];
                const double gx = (up - um) / ((i > 0 && i < nx - 1) ? 2.0 * gr.hx : gr.hx);
                const double gy = (vp - vm) / ((j > 0 && j < ny - 1) ? 2.0 * gr.hy : gr.hy);
                const double* fv = f.v.data() + q * na;
                double row = 0.0;
                for (int k = 0; k < na; ++k) row += fv[k] * (gr.cos_a[k] * gx + gr.sin_a[k] * gy);
                acc += row;
            }
        const double inner_Af_f = acc * gr.cell_quad;
        rep.G = 0.5 * nm.normk * nm.normk + eps1 * inner_Af_f;
    }
    rep.gronwall_rhs = -gamma1 * rep.G + gamma2_gronwall * rep.mass * rep.mass;
    return rep;
}

} // namespace fibrelay
