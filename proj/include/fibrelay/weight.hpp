#ifndef FIBRELAY_WEIGHT_HPP
#define FIBRELAY_WEIGHT_HPP

#include "fibrelay/potential.hpp"

#include <vector>

namespace fibrelay {

// Parameters of the coercivity weight
//   g(x,alpha) = exp( beta V(x) + |grad V(x)| Gamma(Y) ),
//   Y = tau(alpha) . grad V / |grad V|,
// with a piecewise-linear slope profile Gamma' (delta_minus / ramp / delta_plus).
// All parameters are pinned by weight_params(kappa, D); the invariants below
// are asserted on construction.
struct WeightParams {
    double kappa = 0.0;
    double D = 1.0;
    double delta_plus = 0.0;
    double delta_minus = 0.0;
    double eps0 = 0.0;        // half-width of the ramp in Y
    double beta = 0.0;
    double gamma = 0.0;       // eps0 (1 + D delta_plus - beta)
    double gamma_tilde = 0.0; // eps0 (beta - 1 - D delta_minus)
    double c = 0.0;           // (gamma - kappa beta) / 2
    double gamma0 = 0.0;      // Gamma(-1) > 0, the integration constant

    void validate() const; // throws HypothesisError when an invariant fails
};

// Admissibility: kappa in [0, 1/3). Fixes all parameters by the closed forms
//   delta_plus  = 3(1+kappa)/(4D),  delta_minus = (1-3kappa)/(4D),
//   eps0 = (1+9kappa)/(2(1+3kappa)),
//   beta = 3/4 + (1+9kappa)(7+3kappa)/(8(6kappa^2+11kappa+1)).
WeightParams weight_params(double kappa, double D);

// Gamma(Y) and Gamma'(Y) for |Y| <= 1. Gamma(-1) = gamma0.
struct GammaValue {
    double Gamma;
    double GammaPrime;
};
GammaValue gamma_profile(const WeightParams& w, double Y);
// Second derivative; at the knots |Y| = eps0 the ramp-side value applies.
double gamma_second(const WeightParams& w, double Y);

// g itself. Throws on grad V = 0 (the alignment variable Y is undefined there).
double eval_weight(const WeightParams& w, const PotentialSpec& p, const Vec2& x, double alpha);
// log g, safe against overflow for large |x|.
double eval_log_weight(const WeightParams& w, const PotentialSpec& p, const Vec2& x, double alpha);

// Closed form of L_kappa(g)/g where L_kappa is the pointwise operator
//   L_kappa(h) = D h_aa + (tau + kappa e1) . grad_x h
//                - (tau_perp . grad V) h_a - (tau . grad V) h .
double eval_weight_generator(const WeightParams& w, const PotentialSpec& p, const Vec2& x, double alpha);

// Drift remainder (tau + kappa e1) . grad_x(|grad V| Gamma(Y)) / |grad V|.
double eval_weight_diff_term(const WeightParams& w, const PotentialSpec& p, const Vec2& x, double alpha);

struct SearchCfg {
    double r_min = 0.25;
    double r_max = 64.0;
    int n_r = 192;       // radii, log-spaced
    int n_dir = 48;      // directions of x
    int n_alpha = 64;    // angles
};

struct LyapunovReport {
    double R = 0.0;           // smallest sampled radius after which the drift condition holds
    double c = 0.0;
    double margin_min = 0.0;  // min over samples beyond R of -L(g)/(|grad V| g) - c
    long samples = 0;
    double r1 = 0.0;          // closed-form ramp-branch radius (0 when not computable)
    double r2 = 0.0;          // sampled radius where the drift remainder falls below c
    std::vector<double> sweep_r;
    std::vector<double> sweep_margin; // worst margin over directions/angles per radius
};

// Sweeps radii/directions/angles and locates the smallest sampled R with
//   L_kappa(g) <= -c |grad V| g   for every sample with |x| in (R, r_max].
// Requires an unbounded potential gradient.
LyapunovReport verify_lyapunov(const WeightParams& w, const PotentialSpec& p, const SearchCfg& search);

} // namespace fibrelay

#endif
