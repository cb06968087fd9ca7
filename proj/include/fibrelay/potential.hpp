#ifndef FIBRELAY_POTENTIAL_HPP
#define FIBRELAY_POTENTIAL_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace fibrelay {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

enum class PotentialKind { Family, Quadratic };

// External confinement potential. Two spherically symmetric kinds:
//   Family:    V(x) = K (1 + |x|^2)^{s/2} + shift,   K > 0, s >= 1
//   Quadratic: V(x) = omega |x|^2 / 2 + shift,       omega > 0
// The additive shift is used to normalise \int e^{-V} dx = 1; it leaves all
// derivatives unchanged.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::Family;
    double K = 1.0;
    double s = 2.0;
    double omega = 1.0;
    double shift = 0.0;

    static PotentialSpec family(double K, double s);
    static PotentialSpec quadratic(double omega);

    // True when |grad V| stays bounded on R^2 (only the s = 1 family).
    bool gradient_bounded() const;
    // sup |grad V| when bounded.
    double grad_sup() const;
    std::string describe() const;
};

struct PotentialValue {
    double V;
    Vec2 grad;
    Mat2 hess;
};

struct QuadratureCfg {
    double tol = 1e-9;      // relative tolerance on the normalisation integral
    int n_init = 128;       // initial points per axis (composite Simpson)
    int max_refine = 8;     // doublings allowed before giving up
    double tail_cut = 1e-14; // e^{-V} level defining the truncation box
};

struct HypothesisReport {
    double h2_integral = 0.0;
    double h4_c1_estimate = 0.0;
    std::vector<double> h5_grad_over_V;     // |grad V| / V along increasing radii
    std::vector<double> h5_hess_over_grad;  // |hess V| / |grad V| along increasing radii
    std::vector<double> radii;
    bool gradient_bounded = false;
    std::optional<double> grad_inf_norm;
};

// V, grad V and hess V by closed-form differentiation.
PotentialValue eval_potential(const PotentialSpec& p, const Vec2& x);

// Half-width L such that e^{-V(L,0)} < cut (V including current shift).
double truncation_radius(const PotentialSpec& p, double cut);

// Fixes the shift so that \int e^{-V} = 1 within quad.tol.
PotentialSpec normalize_potential(const PotentialSpec& p, const QuadratureCfg& quad);

// Samples the structural hypotheses on concentric circles. The spectral gap
// is estimated elsewhere (see elliptic.hpp); this report covers the rest.
HypothesisReport check_hypotheses(const PotentialSpec& p, const std::vector<double>& radii);

} // namespace fibrelay

#endif
