#pragma once

#include "revham/flow.hpp"
#include "revham/reduction.hpp"

#include <optional>
#include <string>
#include <vector>

namespace revham {

/// A numerically certified symmetric periodic orbit: starts on Fix(Rhat),
/// meets it again at T/2, closes at T.
struct OrbitRecord {
    std::vector<double> v; // initial point, in Fix(Rhat) by construction
    double T = 0;          // period in the rescaled (internal) time
    double T_physical = 0; // T / alpha
    double sigma = 0;      // branch parameter label
    double lambda = 0;
    bool lambda_boundary = false;
    double amplitude = 0;
    double closure_residual = 0;  // |flow_T(v) - v|
    double fix_residual = 0;      // |Pi_perp flow_{T/2}(v)|
    double energy_drift = 0;      // max_t |H(x(t)) - H(v)|
    double symmetry_residual = 0; // max_t |R flow_{T-t}(v) - flow_t(v)|
    std::string family_id;
};

enum class ShootStatus { converged, trivial, diverged, singular, maxiter };

inline const char* to_string(ShootStatus s)
{
    switch (s) {
    case ShootStatus::converged: return "converged";
    case ShootStatus::trivial: return "trivial";
    case ShootStatus::diverged: return "diverged";
    case ShootStatus::singular: return "singular";
    case ShootStatus::maxiter: return "maxiter";
    }
    return "?";
}

struct ShootOutcome {
    ShootStatus status = ShootStatus::maxiter;
    OrbitRecord record;
    int iterations = 0;
    double final_residual = 0;
    std::string message;
};

/// Two-point symmetric shooting. Unknowns: the Fix(Rhat) coordinates of v
/// that are neither pinned nor anchored, plus the period T. Residuals: the
/// Fix(-Rhat) components of flow_{T/2}(v). Square for 4:2 and pinned 6:4,
/// overdetermined (Gauss-Newton) for 6:2. The anchor freezes the designated
/// coordinate at its seed value, removing the S^1 phase freedom.
struct ShootProblem {
    Mat<double> Rhat;
    std::vector<double> seed;      // full-space point, must lie in Fix(Rhat)
    double period_seed = 0;
    std::vector<int> pinned;       // coordinate indices frozen at their seed values
    int anchor = -1;               // anchored coordinate; -1 picks the largest rotation-plane one
    std::vector<int> rotation_coords; // candidates for auto-anchoring
};

ShootOutcome symmetric_shoot(const CompiledField& X, const ShootProblem& prob, const FlowConfig& cfg);

/// Fill the verification fields of a record (closure, energy, symmetry) for
/// an already-converged orbit.
void certify_record(const CompiledField& X, const Mat<double>& Rhat, const Poly<double>* H,
                    const FlowConfig& cfg, OrbitRecord& rec);

struct ContinuationResult {
    std::vector<OrbitRecord> records;
    std::vector<std::string> failures; // per-grid-point diagnostics
    double amplitude_slope = 0;        // log-log fit of amplitude vs sigma
    bool amplitude_monotone = false;
    double max_period_deviation = 0;   // max |T - 2 pi/(1+sigma)| over records
};

/// Warm-started shooting along a sigma grid (descending magnitudes) for one
/// branch family; 6:4 families carry the (lambda, sigma) chart for (x1, y1).
ContinuationResult continue_family(const CompiledField& X, const Mat<double>& Rhat,
                                   const BranchFamily& family, double alpha,
                                   const std::vector<double>& sigma_grid, const FlowConfig& cfg,
                                   const Poly<double>* H = nullptr,
                                   double lambda = 0.0, bool lambda_boundary = false);

struct ScanOutcomeCount {
    int converged = 0;
    int trivial = 0;
    int diverged = 0;
    int singular = 0;
    int maxiter = 0;
};

struct ScanReport {
    int seeds = 0;
    double radius = 0;
    double period_lo = 0, period_hi = 0;
    ScanOutcomeCount counts;
    int nontrivial_in_ball = 0;
    std::vector<OrbitRecord> found; // up to 32 certified examples
    std::string verdict;            // explicitly numerical evidence, not proof
};

/// Quasi-random (Halton) seeds in Fix(Rhat) within radius, period seeds
/// across the window; every Newton outcome is reported.
ScanReport absence_scan(const CompiledField& X, const Mat<double>& Rhat, CaseTag tag, double radius,
                        int seeds, double period_lo, double period_hi, const FlowConfig& cfg);

} // namespace revham
