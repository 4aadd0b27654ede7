#include "revham/flow.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>

namespace odeint = boost::numeric::odeint;

namespace revham {

CompiledField::CompiledField(const PolyVector<double>& X) : n_(X.size())
{
    if (X.vars() != n_)
        throw flow_error("CompiledField: field must be square (n components in n variables)");
    auto pack = [](const Poly<double>& p) {
        std::vector<Term> terms;
        terms.reserve(p.term_count());
        for (const auto& [m, c] : p.terms())
            terms.push_back({c, m.e});
        return terms;
    };
    comps_.reserve(n_);
    jac_.resize(n_);
    for (int i = 0; i < n_; ++i) {
        comps_.push_back(pack(X[i]));
        jac_[i].reserve(n_);
        for (int j = 0; j < n_; ++j)
            jac_[i].push_back(pack(partial(X[i], j)));
    }
}

namespace {

inline double eval_terms(const std::vector<CompiledField::Term>& terms, const double* x, int n)
{
    double acc = 0;
    for (const auto& t : terms) {
        double v = t.c;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < t.e[i]; ++k)
                v *= x[i];
        acc += v;
    }
    return acc;
}

} // namespace

void CompiledField::eval(const double* x, double* out) const
{
    for (int i = 0; i < n_; ++i)
        out[i] = eval_terms(comps_[i], x, n_);
}

void CompiledField::jacobian(const double* x, double* J) const
{
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            J[i * n_ + j] = eval_terms(jac_[i][j], x, n_);
}

namespace {

using state_t = std::vector<double>;
using stepper_t = odeint::runge_kutta_fehlberg78<state_t>;
using error_checker_t = odeint::default_error_checker<double, odeint::range_algebra, odeint::default_operations>;
using step_adjuster_t = odeint::default_step_adjuster<double, double>;
using controlled_t = odeint::controlled_runge_kutta<stepper_t, error_checker_t, step_adjuster_t>;

// the step adjuster's max-dt clamp must carry the sign of the integration
// direction (boost 1.74 min_abs assumes matching signs)
controlled_t make_stepper(const FlowConfig& cfg, double direction)
{
    return controlled_t(error_checker_t(cfg.abs_tol, cfg.rel_tol),
                        step_adjuster_t(direction * cfg.max_step));
}

void integrate_to(const CompiledField& X, state_t& x, double t0, double t1, const FlowConfig& cfg)
{
    if (t1 == t0)
        return;
    auto sys = [&X](const state_t& s, state_t& dsdt, double) {
        dsdt.resize(s.size());
        X.eval(s.data(), dsdt.data());
    };
    double dir = t1 > t0 ? 1.0 : -1.0;
    double dt = dir * std::min(cfg.init_step, std::fabs(t1 - t0));
    auto stepper = make_stepper(cfg, dir);
    odeint::integrate_adaptive(stepper, sys, x, t0, t1, dt);
}

} // namespace

std::vector<double> flow(const CompiledField& X, const std::vector<double>& x0, double T, const FlowConfig& cfg)
{
    if (!std::isfinite(T))
        throw flow_error("flow: non-finite horizon");
    state_t x = x0;
    integrate_to(X, x, 0.0, T, cfg);
    for (double v : x)
        if (!std::isfinite(v))
            throw flow_error("flow: state blew up (step-size underflow or escape)");
    return x;
}

std::vector<std::vector<double>> flow_samples(const CompiledField& X, const std::vector<double>& x0,
                                              const std::vector<double>& times, const FlowConfig& cfg)
{
    std::vector<std::vector<double>> out;
    out.reserve(times.size());
    state_t x = x0;
    double t = 0;
    for (double tt : times) {
        integrate_to(X, x, t, tt, cfg);
        t = tt;
        out.push_back(x);
    }
    return out;
}

FlowWithVariational flow_variational(const CompiledField& X, const std::vector<double>& x0, double T,
                                     const FlowConfig& cfg)
{
    int n = X.dim();
    state_t s(n + n * n, 0.0);
    for (int i = 0; i < n; ++i) {
        s[i] = x0[i];
        s[n + i * n + i] = 1.0;
    }
    auto sys = [&X, n](const state_t& st, state_t& d, double) {
        d.assign(st.size(), 0.0);
        X.eval(st.data(), d.data());
        std::vector<double> J(n * n);
        X.jacobian(st.data(), J.data());
        // d Phi = DF(x) Phi
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0;
                for (int k = 0; k < n; ++k)
                    acc += J[i * n + k] * st[n + k * n + j];
                d[n + i * n + j] = acc;
            }
    };
    if (T != 0) {
        double dir = T > 0 ? 1.0 : -1.0;
        double dt = dir * std::min(cfg.init_step, std::fabs(T));
        auto stepper = make_stepper(cfg, dir);
        odeint::integrate_adaptive(stepper, sys, s, 0.0, T, dt);
    }
    FlowWithVariational out;
    out.x.assign(s.begin(), s.begin() + n);
    out.Phi = Mat<double>(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.Phi(i, j) = s[n + i * n + j];
    for (double v : s)
        if (!std::isfinite(v))
            throw flow_error("flow_variational: state blew up");
    return out;
}

ReversibilityReport reversibility_residual(const PolyVector<double>& Xpoly, const Mat<double>& R,
                                           const std::vector<std::vector<double>>& samples,
                                           const FlowConfig& cfg, double orbit_time)
{
    int n = Xpoly.size();
    CompiledField X(Xpoly);
    ReversibilityReport rep;
    for (const auto& p : samples) {
        auto Rp = R * p;
        auto XR = X.eval(Rp);
        auto Xp = X.eval(p);
        auto RX = R * Xp;
        for (int i = 0; i < n; ++i)
            rep.pointwise = std::max(rep.pointwise, std::fabs(XR[i] + RX[i]));
    }
    if (!samples.empty()) {
        // flow_T(R x0) = R flow_{-T}(x0)
        const auto& x0 = samples.front();
        auto lhs = flow(X, R * x0, orbit_time, cfg);
        auto rhs = R * flow(X, x0, -orbit_time, cfg);
        for (int i = 0; i < n; ++i)
            rep.orbit_level = std::max(rep.orbit_level, std::fabs(lhs[i] - rhs[i]));
    }
    return rep;
}

} // namespace revham
