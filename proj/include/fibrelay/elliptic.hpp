#ifndef FIBRELAY_ELLIPTIC_HPP
#define FIBRELAY_ELLIPTIC_HPP

#include "fibrelay/grid.hpp"

#include <cstdint>
#include <vector>

namespace fibrelay {

// Finite-volume discretisation of the equilibrium-weighted elliptic operator
//   E u = e^{-V} u - (1/2) div( e^{-V} grad u )
// on the x-grid with no-flux boundaries. E is symmetric positive definite;
// solves run preconditioned CG with a Jacobi diagonal.
class EquilibriumElliptic {
public:
    explicit EquilibriumElliptic(const Grid& gr);

    // out = E u  (pointwise form, both size n2)
    void apply(const std::vector<double>& u, std::vector<double>& out) const;
    // out = K u with K u = -div(e^{-V} grad u)   (no mass term, no 1/2)
    void apply_stiffness(const std::vector<double>& u, std::vector<double>& out) const;

    // Solves E u = rhs. Relative residual tolerance; throws NumericalError on
    // non-convergence.
    std::vector<double> solve(const std::vector<double>& rhs, double tol = 1e-10,
                              int max_iter = 20000) const;

    const Grid& grid() const { return *gr_; }

private:
    const Grid* gr_;
    std::vector<double> wx_; // e^{-V} at x-faces, (nx+1) x ny, boundary faces zero
    std::vector<double> wy_; // e^{-V} at y-faces, nx x (ny+1)
    std::vector<double> jacobi_; // inverse diagonal of E
};

// Smallest nonzero eigenvalue of u -> -e^V div(e^{-V} grad u) restricted to
// zero-e^{-V}-mean functions (the discrete Poincare constant of e^{-V} dx).
// Inverse iteration with deflation of the constant mode.
double estimate_spectral_gap(const Grid& gr, double tol = 1e-9, int max_iter = 400);

// Discrete proxy for the elliptic regularity constant: for random right-hand
// sides f (law e^{-V/2} * white noise plus a few structured worst-case
// candidates), solves E u = f and returns
//   max over trials of || hess u ||_{L^2(e^{-V} dx)} / || f ||_{L^2(e^V dx)} .
// Deterministic given the seed.
double estimate_elliptic_constant(const Grid& gr, int trials, std::uint64_t seed);

// || hess u ||_{L^2(e^{-V} dx)} with centred second differences.
double hessian_seminorm(const Grid& gr, const std::vector<double>& u);

} // namespace fibrelay

#endif
