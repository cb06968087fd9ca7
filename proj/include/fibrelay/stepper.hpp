#ifndef FIBRELAY_STEPPER_HPP
#define FIBRELAY_STEPPER_HPP

#include "fibrelay/kinetic.hpp"

#include <functional>
#include <vector>

namespace fibrelay {

// Strang-split IMEX integrator for d_t f = L_kappa f:
//   * alpha direction (advection by -tau_perp . grad V plus diffusion D d_aa)
//     implicit, centred fluxes, cyclic tridiagonal solves; monotone provided
//     the cell Peclet number |grad V| h_alpha / D stays <= 2 (checked at
//     construction),
//   * x/y transport (velocity tau + kappa e1) explicit, dimensionally split,
//     second-order MUSCL with minmod slopes, zero-flux walls.
// Each substep is in flux form, so mass is conserved to round-off, and each
// substep is positivity-preserving under the CFL bound.
class Stepper {
public:
    Stepper(const Grid& gr, double kappa, double D, double cfl = 0.9);

    double dt_max() const { return dt_max_; }
    double kappa() const { return kappa_; }
    // throws ConfigError when dt exceeds the CFL bound
    void step(PhaseField& f, double dt) const;

private:
    const Grid* gr_;
    double kappa_, D_, cfl_, dt_max_;
    std::vector<double> ux_; // cos alpha + kappa per k
    std::vector<double> uy_; // sin alpha per k

    void alpha_half_step(PhaseField& f, double dt2) const;
    void x_sweep(PhaseField& f, double dt) const;
    void y_sweep(PhaseField& f, double dt) const;
};

struct StationaryResult {
    PhaseField F;
    double t_end = 0.0;
    long steps = 0;
    double last_delta = 0.0;    // ||f(t+dt)-f(t)||_0 / dt at the end
    double last_residual = 0.0; // ||L_kappa f||_0 of the analysis generator
    bool stopped_by_delta = false;
    std::vector<std::pair<double, double>> history; // (t, delta)
};

// Integrates until ||f(t+dt)-f(t)||_0/dt <= tol or ||L_kappa f||_0 <= tol.
// f0 must be non-negative with unit mass. Throws NumericalError at tmax.
StationaryResult solve_stationary(KineticOps& ops, const PhaseField& f0, double kappa, double tol,
                                  double tmax, double cfl = 0.9);

struct DecaySample {
    double t;
    double E;
};

struct DecayResult {
    double lambda_meas = 0.0;
    double r_squared = 0.0;
    bool fit_ok = false;
    bool already_stationary = false;
    std::string failure; // non-empty on fit failure
    double window_t0 = 0.0, window_t1 = 0.0;
    double prefactor_meas = 0.0; // max_t E(t) e^{lambda t} / E(0)
    std::vector<DecaySample> series;
};

// Evolves f0 and fits the exponential decay rate of E(t) = ||f - M F_k||_kappa
// on the window where E has dropped by factors 10 to 1000.
DecayResult measure_decay(KineticOps& ops, const PhaseField& f0, const PhaseField& Fk, double kappa,
                          double horizon, double cfl = 0.9);

} // namespace fibrelay

#endif
