#pragma once

#include "revham/linalg.hpp"
#include "revham/poly_vector.hpp"

#include <array>
#include <vector>

namespace revham {

struct flow_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FlowConfig {
    double abs_tol = 1e-13;
    double rel_tol = 1e-13;
    double init_step = 1e-3;
    double max_step = 0.25;
    int max_newton = 40;
    double newton_tol = 1e-11;
    double amplitude_floor = 1e-8;
};

/// Polynomial vector field flattened for fast repeated evaluation, with the
/// analytic Jacobian compiled alongside (variational equations never use
/// finite differences).
class CompiledField {
public:
    struct Term {
        double c;
        std::array<uint8_t, Monomial::max_vars> e;
    };

    explicit CompiledField(const PolyVector<double>& X);

    int dim() const { return n_; }

    void eval(const double* x, double* out) const;
    void jacobian(const double* x, double* J) const; // row-major n x n

    std::vector<double> eval(const std::vector<double>& x) const
    {
        std::vector<double> out(n_);
        eval(x.data(), out.data());
        return out;
    }

private:
    int n_ = 0;
    std::vector<std::vector<Term>> comps_;
    std::vector<std::vector<std::vector<Term>>> jac_;
};

/// Endpoint of the trajectory from x0 over time T (T may be negative).
std::vector<double> flow(const CompiledField& X, const std::vector<double>& x0, double T,
                         const FlowConfig& cfg);

/// Trajectory sampled at the given times (ascending, starting at 0).
std::vector<std::vector<double>> flow_samples(const CompiledField& X, const std::vector<double>& x0,
                                              const std::vector<double>& times, const FlowConfig& cfg);

struct FlowWithVariational {
    std::vector<double> x; // endpoint
    Mat<double> Phi;       // d flow / d x0
};

FlowWithVariational flow_variational(const CompiledField& X, const std::vector<double>& x0, double T,
                                     const FlowConfig& cfg);

/// max over sample points of |X(R x) + R X(x)| — zero for reversible fields —
/// plus the orbit-level consequence |flow_T(R x0) - R flow_{-T}(x0)| at T=1.
struct ReversibilityReport {
    double pointwise = 0;
    double orbit_level = 0;
};

ReversibilityReport reversibility_residual(const PolyVector<double>& Xpoly, const Mat<double>& R,
                                           const std::vector<std::vector<double>>& samples,
                                           const FlowConfig& cfg, double orbit_time = 1.0);

} // namespace revham
