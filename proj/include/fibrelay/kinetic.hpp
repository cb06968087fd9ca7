#ifndef FIBRELAY_KINETIC_HPP
#define FIBRELAY_KINETIC_HPP

#include "fibrelay/elliptic.hpp"
#include "fibrelay/grid.hpp"

#include <memory>
#include <vector>

namespace fibrelay {

// Discrete operators of the kinetic equation
//   d_t f = L_kappa f = Q f - T f + P_kappa f
// on a Grid:
//   Q         : D d_aa, spectral in alpha
//   T         : skew-symmetrised transport; exactly antisymmetric in the
//               e^V-weighted inner product, annihilates e^{-V} and conserves
//               mass to round-off (it uses the compatible gradient tables gv)
//   P_kappa   : -kappa e1 . grad_x in flux form with zero-flux walls; its
//               exact discrete adjoint is available as apply_P_star
// plus the auxiliary-operator machinery: A h = e^{-V} u with
//   (e^{-V} - (1/2) div e^{-V} grad) u = -Pi T h .
//
// Methods share internal scratch buffers; an instance must not be used from
// two threads at once.
class KineticOps {
public:
    KineticOps(const Grid& gr, double D);
    ~KineticOps();
    KineticOps(const KineticOps&) = delete;
    KineticOps& operator=(const KineticOps&) = delete;

    const Grid& grid() const { return *gr_; }
    double diffusivity() const { return D_; }
    const EquilibriumElliptic& elliptic() const { return ell_; }

    // Pi f = alpha-average; output lives on the x-grid.
    void project(const PhaseField& f, std::vector<double>& xout) const;
    PhaseField extend(const std::vector<double>& xin) const;
    // f - Pi f
    PhaseField fluct(const PhaseField& f) const;

    PhaseField apply_Q(const PhaseField& f);
    PhaseField apply_T(const PhaseField& f);
    PhaseField apply_P(const PhaseField& f, double kappa);
    PhaseField apply_P_star(const PhaseField& f, double kappa);
    PhaseField apply_generator(const PhaseField& f, double kappa);

    // spectral d/dalpha and d2/dalpha2 (used by tests and Q)
    void dalpha(const double* in, double* out);
    void dalpha2(const double* in, double* out);

    // x-field u solving (e^{-V} - 1/2 div e^{-V} grad) u = rhs
    std::vector<double> solve_helmholtz(const std::vector<double>& rhs, double tol = 1e-10) const;

    // u_A with A f = e^{-V} u_A ; one transport application + one solve
    std::vector<double> auxiliary_potential(const PhaseField& f);

    // T applied to the alpha-independent extension of e^{-V} u (i.e. T A f
    // when u = auxiliary_potential(f)).
    PhaseField apply_T_xfield(const std::vector<double>& u_times_expmV);

    struct Auxiliary {
        std::vector<double> u_h;  // e^V Pi h from the elliptic solve with rhs Pi f
        double inner_Af_f;        // <A f, f>_0 evaluated as <f, e^{-V} tau . grad u_h>_0
        double G;                 // 1/2 ||f||_kappa^2 + eps1 <A f, f>_0
    };
    Auxiliary apply_auxiliary(const PhaseField& f, double eps1);

private:
    const Grid* gr_;
    double D_;
    EquilibriumElliptic ell_;
    struct Fft;
    std::unique_ptr<Fft> fft_;
    std::vector<double> s1_, s2_, s3_, s4_; // scratch, size n3

    void dxc(const double* in, double* out) const; // centred, zero ghosts
    void dyc(const double* in, double* out) const;
};

struct DissipationReport {
    double D0, D1, D2, D3;
    double dGdt;     // D0 + D1 + D2 + D3
    double G;
    double mass;
    double norm0, normk;
    double gronwall_rhs; // -gamma1 G + gamma2_gronwall M^2 (no slack)
};

// Entropy-dissipation functionals evaluated by their definitions. gamma1 and
// gamma2_gronwall are only used to fill gronwall_rhs.
DissipationReport dissipation_terms(KineticOps& ops, const PhaseField& f, double kappa,
                                    double eps1, double gamma1, double gamma2_gronwall);

} // namespace fibrelay

#endif
