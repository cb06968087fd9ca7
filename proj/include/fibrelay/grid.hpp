#ifndef FIBRELAY_GRID_HPP
#define FIBRELAY_GRID_HPP

#include "fibrelay/potential.hpp"
#include "fibrelay/weight.hpp"

#include <optional>
#include <vector>

namespace fibrelay {

struct GridSpec {
    double L = 0.0;   // half-width of the x-box; 0 requests the e^{-V} tail rule
    int nx = 128;
    int ny = 128;
    int nalpha = 64;  // must be even
};

// Tensor grid on [-L,L]^2 x S^1, cell-centred in x, uniform in alpha.
// Layout: value(i,j,k) at index (i*ny + j)*nalpha + k  (alpha fastest).
//
// Carries the measure tables: expV = e^V, expmV = e^{-V}, the analytic
// gradient of V, and the equilibrium-compatible discrete gradient
//   gv = -e^V D_c e^{-V}
// used by the transport stencils so that the discrete flux of e^{-V} is
// divergence-free. A coercivity-weight table g and the combined weight
// e^V + zeta kappa g can be attached after the constants are known.
class Grid {
public:
    Grid(const PotentialSpec& p, const GridSpec& spec);

    PotentialSpec pot;
    double L, hx, hy, halpha;
    int nx, ny, nalpha;
    std::size_t n2, n3;
    double cell_quad; // hx hy / nalpha  (the dx dalpha / 2pi convention)

    std::vector<double> xs, ys, alphas, cos_a, sin_a;
    // half-angle tables for face-centred alpha fluxes
    std::vector<double> cos_ah, sin_ah;

    // 2D tables, size n2
    std::vector<double> V, expV, expmV;
    std::vector<double> gradVx, gradVy; // analytic
    std::vector<double> gvx, gvy;       // compatible discrete gradient

    // weight tables (empty until attach_weight)
    std::vector<double> g; // size n3
    double zeta_kappa = 0.0;
    bool has_weight() const { return !g.empty() && zeta_kappa > 0.0; }
    void attach_weight(const WeightParams& w, double zeta);

    inline std::size_t idx(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * ny + j) * nalpha + k;
    }
    inline std::size_t idx2(int i, int j) const { return static_cast<std::size_t>(i) * ny + j; }
};

// Dense phase-space density on a Grid. Plain value type; the grid must
// outlive the field.
struct PhaseField {
    const Grid* grid = nullptr;
    std::vector<double> v;

    PhaseField() = default;
    explicit PhaseField(const Grid& gr) : grid(&gr), v(gr.n3, 0.0) {}
    double& operator()(int i, int j, int k) { return v[grid->idx(i, j, k)]; }
    double operator()(int i, int j, int k) const { return v[grid->idx(i, j, k)]; }
};

struct NormsAndMass {
    double mass;
    double norm0;  // L^2(e^V dx dalpha/2pi)
    double normk;  // L^2((e^V + zeta kappa g) dx dalpha/2pi)
};

NormsAndMass norms_and_mass(const PhaseField& f);

double mass_of(const PhaseField& f);
// <a,b> in L^2(dmu_0); deterministic fixed-order reduction.
double inner0(const PhaseField& a, const PhaseField& b);
// x-field inner product int a b e^V dx (a,b size n2)
double inner0_x(const Grid& gr, const std::vector<double>& a, const std::vector<double>& b);

// samples exp(-V) on the grid (the kappa=0 equilibrium, unit mass up to
// quadrature error once the potential is normalised)
PhaseField equilibrium_field(const Grid& gr);

} // namespace fibrelay

#endif
