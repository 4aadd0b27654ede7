#include "revham/shooting.hpp"

#include <algorithm>
#include <cmath>

namespace revham {

namespace {

std::vector<int> fix_indices(const Mat<double>& Rhat)
{
    std::vector<int> out;
    for (int i = 0; i < Rhat.rows(); ++i)
        if (Rhat(i, i) > 0)
            out.push_back(i);
    return out;
}

std::vector<int> perp_indices(const Mat<double>& Rhat)
{
    std::vector<int> out;
    for (int i = 0; i < Rhat.rows(); ++i)
        if (Rhat(i, i) < 0)
            out.push_back(i);
    return out;
}

double norm2(const std::vector<double>& v)
{
    double s = 0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

} // namespace

ShootOutcome symmetric_shoot(const CompiledField& X, const ShootProblem& prob, const FlowConfig& cfg)
{
    const int n = X.dim();
    ShootOutcome out;
    auto fixc = fix_indices(prob.Rhat);
    auto perp = perp_indices(prob.Rhat);

    // sanity: the seed lies in Fix(Rhat) (diagonal template coordinates)
    for (int i : perp)
        if (prob.seed[i] != 0.0) {
            out.status = ShootStatus::singular;
            out.message = "seed is not in Fix(Rhat)";
            return out;
        }

    int anchor = prob.anchor;
    if (anchor < 0) {
        double best = -1;
        for (int i : prob.rotation_coords) {
            if (std::find(fixc.begin(), fixc.end(), i) == fixc.end())
                continue;
            if (std::fabs(prob.seed[i]) > best) {
                best = std::fabs(prob.seed[i]);
                anchor = i;
            }
        }
    }

    std::vector<int> free_coords;
    for (int i : fixc) {
        bool held = i == anchor
                    || std::find(prob.pinned.begin(), prob.pinned.end(), i) != prob.pinned.end();
        if (!held)
            free_coords.push_back(i);
    }
    const int nu = static_cast<int>(free_coords.size()) + 1; // + period
    const int nr = static_cast<int>(perp.size());

    std::vector<double> v = prob.seed;
    double T = prob.period_seed;
    double prev_res = std::numeric_limits<double>::infinity();

    for (int it = 0; it < cfg.max_newton; ++it) {
        out.iterations = it + 1;
        FlowWithVariational fv;
        try {
            fv = flow_variational(X, v, T / 2, cfg);
        } catch (const flow_error& e) {
            out.status = ShootStatus::diverged;
            out.message = e.what();
            return out;
        }
        std::vector<double> r(nr);
        double rinf = 0;
        for (int k = 0; k < nr; ++k) {
            r[k] = fv.x[perp[k]];
            rinf = std::max(rinf, std::fabs(r[k]));
        }
        out.final_residual = rinf;
        if (rinf <= cfg.newton_tol) {
            OrbitRecord rec;
            rec.v = v;
            rec.T = T;
            rec.amplitude = norm2(v);
            rec.fix_residual = rinf;
            out.record = rec;
            out.status = rec.amplitude < cfg.amplitude_floor ? ShootStatus::trivial : ShootStatus::converged;
            if (out.status == ShootStatus::trivial)
                out.message = "converged to the equilibrium (amplitude below floor)";
            return out;
        }
        if (rinf > 1e6 || !(rinf < prev_res * 1e3)) {
            out.status = ShootStatus::diverged;
            out.message = "residual diverging";
            return out;
        }
        prev_res = std::min(prev_res, rinf);

        // Jacobian: columns = free coordinates of v, then T
        Mat<double> Jm(nr, nu);
        for (int c = 0; c < nu - 1; ++c)
            for (int k = 0; k < nr; ++k)
                Jm(k, c) = fv.Phi(perp[k], free_coords[c]);
        std::vector<double> fx(n);
        X.eval(fv.x.data(), fx.data());
        for (int k = 0; k < nr; ++k)
            Jm(k, nu - 1) = 0.5 * fx[perp[k]];

        // Gauss-Newton step: solve (J^T J) d = -J^T r
        Mat<double> JtJ = Jm.transposed() * Jm;
        std::vector<double> Jtr = Jm.transposed() * r;
        for (auto& x : Jtr)
            x = -x;
        auto d = solve(JtJ, Jtr);
        if (!d) {
            out.status = ShootStatus::singular;
            out.message = "singular shooting Jacobian (|J^T J| ~ " + std::to_string(JtJ.max_abs()) + ")";
            return out;
        }
        double step_norm = 0;
        for (int c = 0; c < nu - 1; ++c) {
            v[free_coords[c]] += (*d)[c];
            step_norm = std::max(step_norm, std::fabs((*d)[c]));
        }
        T += (*d)[nu - 1];
        step_norm = std::max(step_norm, std::fabs((*d)[nu - 1]));
        if (!std::isfinite(T) || T <= 0 || T > 1e3) {
            out.status = ShootStatus::diverged;
            out.message = "period iterate left the admissible range";
            return out;
        }
        if (step_norm < 1e-15)
            break; // stagnated at the achievable precision
    }
    // final residual evaluation decides between maxiter and converged-at-limit
    auto xh = flow(X, v, T / 2, cfg);
    double rinf = 0;
    for (int k : perp)
        rinf = std::max(rinf, std::fabs(xh[k]));
    out.final_residual = rinf;
    if (rinf <= cfg.newton_tol) {
        OrbitRecord rec;
        rec.v = v;
        rec.T = T;
        rec.amplitude = norm2(v);
        rec.fix_residual = rinf;
        out.record = rec;
        out.status = rec.amplitude < cfg.amplitude_floor ? ShootStatus::trivial : ShootStatus::converged;
        return out;
    }
    out.status = ShootStatus::maxiter;
    out.message = "no convergence within the iteration budget";
    return out;
}

void certify_record(const CompiledField& X, const Mat<double>& Rhat, const Poly<double>* H,
                    const FlowConfig& cfg, OrbitRecord& rec)
{
    auto xT = flow(X, rec.v, rec.T, cfg);
    double cl = 0;
    for (size_t i = 0; i < xT.size(); ++i)
        cl = std::max(cl, std::fabs(xT[i] - rec.v[i]));
    rec.closure_residual = cl;

    const int samples = 16;
    std::vector<double> times;
    for (int k = 0; k <= samples; ++k)
        times.push_back(rec.T * k / samples);
    auto traj = flow_samples(X, rec.v, times, cfg);

    if (H) {
        double H0 = eval(*H, rec.v);
        for (const auto& p : traj)
            rec.energy_drift = std::max(rec.energy_drift, std::fabs(eval(*H, p) - H0));
    }
    // orbit symmetry: R flow_{T-t}(v) = flow_t(v)
    double sym = 0;
    for (int k = 0; k <= samples; ++k) {
        auto rhs = Rhat * traj[samples - k];
        for (size_t i = 0; i < rhs.size(); ++i)
            sym = std::max(sym, std::fabs(rhs[i] - traj[k][i]));
    }
    rec.symmetry_residual = sym;
}

ContinuationResult continue_family(const CompiledField& X, const Mat<double>& Rhat,
                                   const BranchFamily& family, double alpha,
                                   const std::vector<double>& sigma_grid, const FlowConfig& cfg,
                                   const Poly<double>* H, double lambda, bool lambda_boundary)
{
    const int n = X.dim();
    ContinuationResult out;
    std::optional<OrbitRecord> prev;
    int consecutive_failures = 0;

    for (double smag : sigma_grid) {
        double sigma = family.sigma_side * std::fabs(smag);
        if (smag == 0.0) {
            out.failures.push_back("sigma=0: equilibrium endpoint, family terminates");
            continue;
        }
        std::vector<double> seed(n, 0.0);
        double x1 = 0, y1 = 0;
        std::vector<int> pinned;
        if (family.tag == CaseTag::c64) {
            if (lambda_boundary) {
                x1 = sigma;
                y1 = 0;
            } else {
                x1 = lambda * sigma;
                y1 = sigma;
            }
            seed[0] = x1;
            seed[1] = y1;
            pinned = {0, 1, family.zero_coord};
        } else {
            pinned = {family.zero_coord};
        }
        auto law = branch_seed(family, sigma, x1, y1);
        if (!law) {
            out.failures.push_back("sigma=" + std::to_string(sigma) + ": outside the family's validity side");
            continue;
        }
        seed[family.law_coord] = *law;
        if (prev && prev->sigma != 0) {
            double scalefac = std::sqrt(std::fabs(sigma / prev->sigma));
            seed[family.law_coord] = prev->v[family.law_coord] * scalefac;
        }

        ShootProblem prob;
        prob.Rhat = Rhat;
        prob.seed = seed;
        prob.period_seed = prev ? prev->T * (1 + prev->sigma) / (1 + sigma) : 2 * M_PI / (1 + sigma);
        prob.pinned = pinned;
        prob.anchor = family.law_coord;
        prob.rotation_coords = rotation_coords(family.tag);
        auto res = symmetric_shoot(X, prob, cfg);
        if (res.status != ShootStatus::converged) {
            out.failures.push_back("sigma=" + std::to_string(sigma) + ": " + to_string(res.status)
                                   + (res.message.empty() ? "" : " (" + res.message + ")"));
            ++consecutive_failures;
            if (consecutive_failures >= 3)
                break; // family lost; the records so far are the last good data
            continue;
        }
        consecutive_failures = 0;
        res.record.sigma = sigma;
        res.record.lambda = lambda;
        res.record.lambda_boundary = lambda_boundary;
        res.record.family_id = family.id;
        res.record.T_physical = res.record.T / alpha;
        certify_record(X, Rhat, H, cfg, res.record);
        out.records.push_back(res.record);
        prev = res.record;
    }

    // amplitude monotonicity and log-log slope over the collected records
    out.amplitude_monotone = true;
    for (size_t i = 1; i < out.records.size(); ++i)
        if (out.records[i].amplitude >= out.records[i - 1].amplitude
            && std::fabs(out.records[i].sigma) < std::fabs(out.records[i - 1].sigma))
            out.amplitude_monotone = false;
    if (out.records.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (const auto& r : out.records) {
            // the 6:4 kernel offset (x1,y1) ~ sigma is not part of the sqrt law
            double amp = family.tag == CaseTag::c64
                             ? std::fabs(r.v[family.law_coord])
                             : r.amplitude;
            double lx = std::log(std::fabs(r.sigma)), ly = std::log(amp);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++m;
        }
        out.amplitude_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    }
    for (const auto& r : out.records)
        out.max_period_deviation = std::max(out.max_period_deviation,
                                            std::fabs(r.T - 2 * M_PI / (1 + r.sigma)));
    return out;
}

namespace {

double halton(int index, int base)
{
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

} // namespace

ScanReport absence_scan(const CompiledField& X, const Mat<double>& Rhat, CaseTag tag, double radius,
                        int seeds, double period_lo, double period_hi, const FlowConfig& cfg)
{
    ScanReport rep;
    rep.seeds = seeds;
    rep.radius = radius;
    rep.period_lo = period_lo;
    rep.period_hi = period_hi;
    if (seeds <= 0) {
        rep.verdict = "empty scan: no verdict";
        return rep;
    }
    const int n = X.dim();
    auto fixc = fix_indices(Rhat);
    // seed the two "most oscillatory" Fix coordinates on a quasi-random disc;
    // remaining Fix coordinates (6:4 kernel plane) sweep a smaller cube
    for (int s = 1; s <= seeds; ++s) {
        double u1 = halton(s, 2), u2 = halton(s, 3), u3 = halton(s, 5);
        double rr = radius * std::sqrt(u1);
        double th = 2 * M_PI * u2;
        std::vector<double> v(n, 0.0);
        auto rot = rotation_coords(tag);
        std::vector<int> rot_fix;
        for (int i : rot)
            if (std::find(fixc.begin(), fixc.end(), i) != fixc.end())
                rot_fix.push_back(i);
        if (rot_fix.size() >= 2) {
            v[rot_fix[0]] = rr * std::cos(th);
            v[rot_fix[1]] = rr * std::sin(th);
        }
        int extra = 7;
        for (int i : fixc)
            if (std::find(rot_fix.begin(), rot_fix.end(), i) == rot_fix.end())
                v[i] = radius * (halton(s, extra += 4) - 0.5);
        double T0 = period_lo + (period_hi - period_lo) * u3;

        ShootProblem prob;
        prob.Rhat = Rhat;
        prob.seed = v;
        prob.period_seed = T0;
        prob.rotation_coords = rot;
        auto res = symmetric_shoot(X, prob, cfg);
        switch (res.status) {
        case ShootStatus::converged: {
            rep.counts.converged++;
            if (res.record.amplitude > cfg.amplitude_floor && res.record.amplitude <= radius) {
                ++rep.nontrivial_in_ball;
                if (rep.found.size() < 32) {
                    certify_record(X, Rhat, nullptr, cfg, res.record);
                    rep.found.push_back(res.record);
                }
            }
            break;
        }
        case ShootStatus::trivial: rep.counts.trivial++; break;
        case ShootStatus::diverged: rep.counts.diverged++; break;
        case ShootStatus::singular: rep.counts.singular++; break;
        case ShootStatus::maxiter: rep.counts.maxiter++; break;
        }
    }
    rep.verdict = rep.nontrivial_in_ball == 0
                      ? "no symmetric orbit found in the ball (numerical evidence, not a proof)"
                      : "symmetric orbits found";
    return rep;
}

} // namespace revham
