#include "fibrelay/kinetic.hpp"
#include "fibrelay/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>

namespace fibrelay {

struct KineticOps::Fft {
    int n = 0;
    std::size_t howmany = 0;
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    Fft(int nalpha, std::size_t fibers) : n(nalpha), howmany(fibers) {
        real = fftw_alloc_real(howmany * n);
        cplx = fftw_alloc_complex(howmany * (n / 2 + 1));
        int nn[1] = {n};
        fwd = fftw_plan_many_dft_r2c(1, nn, static_cast<int>(howmany), real, nullptr, 1, n, cplx,
                                     nullptr, 1, n / 2 + 1, FFTW_ESTIMATE);
        bwd = fftw_plan_many_dft_c2r(1, nn, static_cast<int>(howmany), cplx, nullptr, 1, n / 2 + 1,
                                     real, nullptr, 1, n, FFTW_ESTIMATE);
        if (!fwd || !bwd) throw NumericalError("fftw plan creation failed");
    }
    ~Fft() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        fftw_free(real);
        fftw_free(cplx);
    }
};

KineticOps::KineticOps(const Grid& gr, double D)
    : gr_(&gr), D_(D), ell_(gr), fft_(std::make_unique<Fft>(gr.nalpha, gr.n2)) {
    if (!(D > 0.0)) throw ConfigError("D must satisfy D > 0");
    s1_.resize(gr.n3);
    s2_.resize(gr.n3);
    s3_.resize(gr.n3);
    s4_.resize(gr.n3);
}

KineticOps::~KineticOps() = default;

void KineticOps::project(const PhaseField& f, std::vector<double>& xout) const {
    const Grid& gr = *gr_;
    xout.resize(gr.n2);
    const double inv = 1.0 / gr.nalpha;
    for (std::size_t q = 0; q < gr.n2; ++q) {
        double s = 0.0;
        const double* fv = f.v.data() + q * gr.nalpha;
        for (int k = 0; k < gr.nalpha; ++k) s += fv[k];
        xout[q] = s * inv;
    }
}

PhaseField KineticOps::extend(const std::vector<double>& xin) const {
    const Grid& gr = *gr_;
    PhaseField out(gr);
    for (std::size_t q = 0; q < gr.n2; ++q)
        for (int k = 0; k < gr.nalpha; ++k) out.v[q * gr.nalpha + k] = xin[q];
    return out;
}

PhaseField KineticOps::fluct(const PhaseField& f) const {
    const Grid& gr = *gr_;
    PhaseField out(gr);
    const double inv = 1.0 / gr.nalpha;
    for (std::size_t q = 0; q < gr.n2; ++q) {
        const double* fv = f.v.data() + q * gr.nalpha;
        double s = 0.0;
        for (int k = 0; k < gr.nalpha; ++k) s += fv[k];
        s *= inv;
        for (int k = 0; k < gr.nalpha; ++k) out.v[q * gr.nalpha + k] = fv[k] - s;
    }
    return out;
}

void KineticOps::dalpha(const double* in, double* out) {
    const Grid& gr = *gr_;
    const int n = gr.nalpha;
    std::memcpy(fft_->real, in, sizeof(double) * gr.n3);
    fftw_execute(fft_->fwd);
    const int nc = n / 2 + 1;
    for (std::size_t q = 0; q < gr.n2; ++q) {
        fftw_complex* c = fft_->cplx + q * nc;
        for (int m = 0; m < nc; ++m) {
            // Nyquist derivative set to zero keeps the operator real and
            // antisymmetric
            const double mm = (m == n / 2) ? 0.0 : static_cast<double>(m);
            const double re = c[m][0], im = c[m][1];
            c[m][0] = -mm * im;
            c[m][1] = mm * re;
        }
    }
    fftw_execute(fft_->bwd);
    const double scale = 1.0 / n;
    for (std::size_t t = 0; t < gr.n3; ++t) out[t] = fft_->real[t] * scale;
}

void KineticOps::dalpha2(const double* in, double* out) {
    const Grid& gr = *gr_;
    const int n = gr.nalpha;
    std::memcpy(fft_->real, in, sizeof(double) * gr.n3);
    fftw_execute(fft_->fwd);
    const int nc = n / 2 + 1;
    for (std::size_t q = 0; q < gr.n2; ++q) {
        fftw_complex* c = fft_->cplx + q * nc;
        for (int m = 0; m < nc; ++m) {
            const double m2 = static_cast<double>(m) * m;
            c[m][0] *= -m2;
            c[m][1] *= -m2;
        }
    }
    fftw_execute(fft_->bwd);
    const double scale = 1.0 / n;
    for (std::size_t t = 0; t < gr.n3; ++t) out[t] = fft_->real[t] * scale;
}

void KineticOps::dxc(const double* in, double* out) const {
    const Grid& gr = *gr_;
    const int nx = gr.nx, ny = gr.ny, na = gr.nalpha;
    const double c = 0.5 / gr.hx;
    const std::size_t stride = static_cast<std::size_t>(ny) * na;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const std::size_t row = gr.idx(i, j, 0);
            const double* fp = (i < nx - 1) ? in + row + stride : nullptr;
            const double* fm = (i > 0) ? in + row - stride : nullptr;
            double* o = out + row;
            for (int k = 0; k < na; ++k)
                o[k] = c * ((fp ? fp[k] : 0.0) - (fm ? fm[k] : 0.0));
        }
}

void KineticOps::dyc(const double* in, double* out) const {
    const Grid& gr = *gr_;
    const int nx = gr.nx, ny = gr.ny, na = gr.nalpha;
    const double c = 0.5 / gr.hy;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const std::size_t row = gr.idx(i, j, 0);
            const double* fp = (j < ny - 1) ? in + row + na : nullptr;
            const double* fm = (j > 0) ? in + row - na : nullptr;
            double* o = out + row;
            for (int k = 0; k < na; ++k)
                o[k] = c * ((fp ? fp[k] : 0.0) - (fm ? fm[k] : 0.0));
        }
}

PhaseField KineticOps::apply_Q(const PhaseField& f) {
    const Grid& gr = *gr_;
    PhaseField out(gr);
    dalpha2(f.v.data(), out.v.data());
    for (std::size_t t = 0; t < gr.n3; ++t) out.v[t] *= D_;
    return out;
}

PhaseField KineticOps::apply_T(const PhaseField& f) {
    const Grid& gr = *gr_;
    const int na = gr.nalpha;
    PhaseField out(gr);

    // psi = e^V f
    for (std::size_t q = 0; q < gr.n2; ++q) {
        const double ev = gr.expV[q];
        const double* fv = f.v.data() + q * na;
        double* pv = s1_.data() + q * na;
        for (int k = 0; k < na; ++k) pv[k] = ev * fv[k];
    }

    // advective half: cos Dx psi + sin Dy psi + B_a Dalpha psi,
    // B_a = sin gvx - cos gvy
    dxc(s1_.data(), s2_.data());
    dyc(s1_.data(), s3_.data());
    dalpha(s1_.data(), s4_.data());
    for (std::size_t q = 0; q < gr.n2; ++q) {
        const double gx = gr.gvx[q], gy = gr.gvy[q];
        const double em = gr.expmV[q];
        double* o = out.v.data() + q * na;
        const double* d1 = s2_.data() + q * na;
        const double* d2 = s3_.data() + q * na;
        const double* d3 = s4_.data() + q * na;
        for (int k = 0; k < na; ++k) {
            const double ba = gr.sin_a[k] * gx - gr.cos_a[k] * gy;
            o[k] = 0.5 * em * (gr.cos_a[k] * d1[k] + gr.sin_a[k] * d2[k] + ba * d3[k]);
        }
    }

    // conservative half: e^{-V} tau psi = tau f and e^{-V} B_a psi = B_a f
    for (std::size_t q = 0; q < gr.n2; ++q) {
        const double* fv = f.v.data() + q * na;
        double* c1 = s1_.data() + q * na;
        for (int k = 0; k < na; ++k) c1[k] = gr.cos_a[k] * fv[k];
    }
    dxc(s1_.data(), s2_.data());
    for (std::size_t q = 0; q < gr.n2; ++q) {
        const double* fv = f.v.data() + q * na;
        double* c2 = s1_.data() + q * na;
        for (int k = 0; k < na; ++k) c2[k] = gr.sin_a[k] * fv[k];
    }
    dyc(s1_.data(), s3_.data());
    for (std::size_t q = 0; q < gr.n2; ++q) {
        const double gx = gr.gvx[q], gy = gr.gvy[q];
        const double* fv = f.v.data() + q * na;
        double* c3 = s1_.data() + q * na;
        for (int k = 0; k < na; ++k) c3[k] = (gr.sin_a[k] * gx - gr.cos_a[k] * gy) * fv[k];
    }
    dalpha(s1_.data(), s4_.data());
    for (std::size_t t = 0; t < gr.n3; ++t)
        out.v[t] += 0.5 * (s2_[t] + s3_[t] + s4_[t]);
    return out;
}

PhaseField KineticOps::apply_P(const PhaseField& f, double kappa) {
    const Grid& gr = *gr_;
    const int nx = gr.nx, ny = gr.ny, na = gr.nalpha;
    PhaseField out(gr);
    if (kappa == 0.0) return out;
    const double c = kappa * 0.5 / gr.hx;
    const std::size_t stride = static_cast<std::size_t>(ny) * na;
    // flux form of -kappa d_x with zero-flux walls: interior rows are the
    // centred difference, wall rows use the one-sided face flux
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const std::size_t row = gr.idx(i, j, 0);
            const double* fc = f.v.data() + row;
            const double* fp = (i < nx - 1) ? f.v.data() + row + stride : nullptr;
            const double* fm = (i > 0) ? f.v.data() + row - stride : nullptr;
            double* o = out.v.data() + row;
            for (int k = 0; k < na; ++k) {
                const double up = fp ? (fc[k] + fp[k]) : 0.0; // 2 F_{i+1/2}/1
                const double dn = fm ? (fm[k] + fc[k]) : 0.0;
                o[k] = -c * (up - dn);
            }
        }
    return out;
}

PhaseField KineticOps::apply_P_star(const PhaseField& f, double kappa) {
    const Grid& gr = *gr_;
    const int nx = gr.nx, ny = gr.ny, na = gr.nalpha;
    PhaseField out(gr);
    if (kappa == 0.0) return out;
    // exact adjoint of apply_P in <.,.>_0: kappa e^{-V} D_c(e^V f) with
    // reflected ghosts at the walls
    const double c = kappa * 0.5 / gr.hx;
    const std::size_t stride = static_cast<std::size_t>(ny) * na;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const std::size_t row = gr.idx(i, j, 0);
            const double em = gr.expmV[gr.idx2(i, j)];
            const double evc = gr.expV[gr.idx2(i, j)];
            const double evp = (i < nx - 1) ? gr.expV[gr.idx2(i + 1, j)] : evc;
            const double evm = (i > 0) ? gr.expV[gr.idx2(i - 1, j)] : evc;
            const double* fc = f.v.data() + row;
            const double* fp = (i < nx - 1) ? f.v.data() + row + stride : fc;
            const double* fm = (i > 0) ? f.v.data() + row - stride : fc;
            double* o = out.v.data() + row;
            for (int k = 0; k < na; ++k)
                o[k] = c * em * (evp * fp[k] - evm * fm[k]);
        }
    return out;
}

PhaseField KineticOps::apply_generator(const PhaseField& f, double kappa) {
    const Grid& gr = *gr_;
    PhaseField out = apply_Q(f);
    const PhaseField tf = apply_T(f);
    for (std::size_t t = 0; t < gr.n3; ++t) out.v[t] -= tf.v[t];
    if (kappa != 0.0) {
        const PhaseField pf = apply_P(f, kappa);
        for (std::size_t t = 0; t < gr.n3; ++t) out.v[t] += pf.v[t];
    }
    return out;
}

std::vector<double> KineticOps::solve_helmholtz(const std::vector<double>& rhs, double tol) const {
    return ell_.solve(rhs, tol);
}

std::vector<double> KineticOps::auxiliary_potential(const PhaseField& f) {
    const PhaseField tf = apply_T(f);
    std::vector<double> r;
    project(tf, r);
    for (double& x : r) x = -x;
    return ell_.solve(r, 1e-10);
}

PhaseField KineticOps::apply_T_xfield(const std::vector<double>& phi_x) {
    return apply_T(extend(phi_x));
}

KineticOps::Auxiliary KineticOps::apply_auxiliary(const PhaseField& f, double eps1) {
    const Grid& gr = *gr_;
    Auxiliary out;
    std::vector<double> pif;
    project(f, pif);
    out.u_h = ell_.solve(pif, 1e-10);

    // <A f, f>_0 = <f, e^{-V} tau . grad u_h>_0 ; the e^{+-V} factors cancel
    // against the measure, leaving a plain tau . grad u_h quadrature.
    const int nx = gr.nx, ny = gr.ny, na = gr.nalpha;
    double acc = 0.0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const std::size_t q = gr.idx2(i, j);
            const double up = (i < nx - 1) ? out.u_h[gr.idx2(i + 1, j)] : out.u_h[q];
            const double um = (i > 0) ? out.u_h[gr.idx2(i - 1, j)] : out.u_h[q];
            const double vp = (j < ny - 1) ? out.u_h[gr.idx2(i, j + 1)] : out.u_h[q];
            const double vm = (j > 0) ? out.u_h[gr.idx2(i, j - 1)] : out.u_h[q];
            const double gx = (up - um) / ((i > 0 && i < nx - 1) ? 2.0 * gr.hx : gr.hx);
            const double gy = (vp - vm) / ((j > 0 && j < ny - 1) ? 2.0 * gr.hy : gr.hy);
            const double* fv = f.v.data() + q * na;
            double row = 0.0;
            for (int k = 0; k < na; ++k) row += fv[k] * (gr.cos_a[k] * gx + gr.sin_a[k] * gy);
            acc += row;
        }
    out.inner_Af_f = acc * gr.cell_quad;

    const NormsAndMass nm = norms_and_mass(f);
    out.G = 0.5 * nm.normk * nm.normk + eps1 * out.inner_Af_f;
    return out;
}

} // namespace fibrelay
