#pragma once

#include "revham/expr.hpp"
#include "revham/poly.hpp"

#include <vector>

namespace revham {

struct taylor_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Series reciprocal: 1/g with g = g0 (1 + u), val(u) >= 1, via the geometric
/// series truncated at ctx.order. g0 = 0 is a singular expansion point.
template <class K>
Poly<K> series_reciprocal(const Poly<K>& g, const TruncContext& ctx)
{
    int n = g.dim();
    K g0 = g.coefficient(Monomial(n));
    if (field<K>::is_zero(g0))
        throw taylor_error("singular expansion point: division by a series vanishing at the center");
    Poly<K> u = (g - Poly<K>::constant(n, g0)).scaled(field<K>::one() / g0);
    Poly<K> acc = Poly<K>::constant(n, field<K>::one());
    Poly<K> upow = Poly<K>::constant(n, field<K>::one());
    for (int k = 1; k <= ctx.order; ++k) {
        upow = mul(upow, u, ctx);
        if (upow.is_zero())
            break;
        acc += (k % 2 == 1) ? -upow : upow;
    }
    return acc.scaled(field<K>::one() / g0);
}

/// Series square root via the binomial series on g = g0 (1 + u). Requires
/// g0 > 0; in exact mode g0 must additionally be a perfect rational square.
template <class K>
Poly<K> series_sqrt(const Poly<K>& g, const TruncContext& ctx)
{
    int n = g.dim();
    K g0 = g.coefficient(Monomial(n));
    if (field<K>::to_double(g0) <= 0)
        throw taylor_error("singular expansion point: sqrt of a series with nonpositive value at the center");
    K root0;
    if constexpr (field<K>::exact) {
        if (!exact_sqrt(g0, root0))
            throw taylor_error("sqrt radicand " + field<K>::str(g0)
                               + " at the center is not a perfect rational square; use float mode");
    } else {
        root0 = std::sqrt(g0);
    }
    Poly<K> u = (g - Poly<K>::constant(n, g0)).scaled(field<K>::one() / g0);
    Poly<K> acc = Poly<K>::constant(n, field<K>::one());
    Poly<K> upow = Poly<K>::constant(n, field<K>::one());
    K coef = field<K>::one();
    for (int k = 1; k <= ctx.order; ++k) {
        upow = mul(upow, u, ctx);
        if (upow.is_zero())
            break;
        // binomial(1/2, k) built incrementally
        K half = field<K>::one() / field<K>::from_int(2);
        coef *= (half - field<K>::from_int(k - 1)) / field<K>::from_int(k);
        acc += upow.scaled(coef);
    }
    return acc.scaled(root0);
}

} // namespace detail

/// Degree-<=N polynomial jet of the expression at `center`, in displacement
/// coordinates (the returned polynomial's variable i is x_i - center_i).
template <class K>
Poly<K> taylor(const ExprAST& e, const std::vector<K>& center, const TruncContext& ctx)
{
    int n = static_cast<int>(center.size());
    auto rec = [&](auto&& self, int i) -> Poly<K> {
        const auto& nd = e.node(i);
        using Op = ExprAST::Op;
        switch (nd.op) {
        case Op::constant: {
            if constexpr (field<K>::exact)
                return Poly<K>::constant(n, nd.value);
            else
                return Poly<K>::constant(n, nd.value.get_d());
        }
        case Op::variable:
            return Poly<K>::constant(n, center[nd.var]) + Poly<K>::variable(n, nd.var);
        case Op::add: return self(self, nd.a) + self(self, nd.b);
        case Op::sub: return self(self, nd.a) - self(self, nd.b);
        case Op::mul: return mul(self(self, nd.a), self(self, nd.b), ctx);
        case Op::div: return mul(self(self, nd.a), detail::series_reciprocal(self(self, nd.b), ctx), ctx);
        case Op::neg: return -self(self, nd.a);
        case Op::sqrt: return detail::series_sqrt(self(self, nd.a), ctx);
        case Op::pow: {
            auto base = self(self, nd.a);
            if (nd.exponent >= 0)
                return pow(base, nd.exponent, ctx);
            return pow(detail::series_reciprocal(base, ctx), -nd.exponent, ctx);
        }
        }
        throw taylor_error("corrupt expression tree");
    };
    return rec(rec, e.root());
}

} // namespace revham
