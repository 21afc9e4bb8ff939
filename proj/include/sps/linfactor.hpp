#pragma once
// Base-field linear factors of a homogeneous black box, and the Lin/NonLin split.

#include "sps/oracle.hpp"

namespace sps {

struct LinConfig {
    int anchors = 8;         // anchor resamples before giving up
    int pivot_tries = 256;   // base points tried for a nonvanishing pivot
    int vanish_trials = 2;   // zero_test trials when verifying a factor
    bool self_check = true;  // rerun extraction on the nonlinear part
};

namespace detail {

// (x1 + c*s + b) as a bivariate polynomial
inline DensePoly bivariate_line(FieldPtr F, uint32_t c, const Scalar& b) {
    DensePoly p(F, 2);
    Mono m1{}, m2{};
    m1[0] = 1;
    m2[1] = 1;
    p.add_term(m1, F->one());
    p.add_term(m2, F->from_base(c));
    p.add_term(Mono{}, b);
    return p;
}

inline UniPoly slice_in_x1(const DensePoly& g, const Scalar& s) {
    const Field* F = g.F.get();
    int deg = std::max(g.degree(), 0);
    std::vector<Scalar> c(deg + 1, F->zero());
    for (auto& [m, v] : g.terms) c[m[0]] = F->add(c[m[0]], F->mul(v, F->pow(s, m[1])));
    return UniPoly(F, c);
}

struct SliceFactor {
    uint32_t c;
    Scalar beta;
    int mult;
};

// candidate lines x1 + c*s + b of one bivariate slice with multiplicities
inline std::vector<SliceFactor> slice_factors(const DensePoly& g, const Scalar& alpha_j, Rng& rng) {
    const Field& F = *g.F;
    std::vector<SliceFactor> out;
    Scalar s1 = F.random(rng), s2 = F.random(rng);
    while (s2 == s1) s2 = F.random(rng);
    UniPoly u1 = slice_in_x1(g, s1), u2 = slice_in_x1(g, s2);
    if (u1.is_zero() || u2.is_zero()) return out;
    auto r1 = uni_roots(u1, rng), r2 = uni_roots(u2, rng);
    Scalar ds = F.inv(F.sub(s1, s2));
    DensePoly rest = g;
    for (auto& a : r1) {
        for (auto& b : r2) {
            Scalar c = F.mul(F.sub(b, a), ds);
            if (!F.is_base(c)) continue;
            Scalar off = F.sub(F.neg(a), F.mul(c, s1));
            DensePoly line = bivariate_line(g.F, c.c[0], off);
            int mult = 0;
            for (;;) {
                auto qd = exact_divide(rest, line);
                if (!qd) break;
                rest = std::move(*qd);
                ++mult;
            }
            if (mult) out.push_back({c.c[0], F.add(off, F.mul(c, alpha_j)), mult});
        }
    }
    return out;
}

}  // namespace detail

// Exact multiset of base-field linear factors, normalized, in the oracle's coordinates.
inline FactorList extract_linear_factors(const PolyOracle& o, Rng& rng, const LinConfig& cfg = {}) {
    const Field& F = *o.F;
    uint32_t q = F.q;
    int n = o.n;
    if (n < 1) throw std::invalid_argument("oracle has no variables");
    if (zero_test(o, 2, rng)) throw DomainError("linear factors of the zero polynomial");
    if (n == 1) {
        DensePoly p = dense_interpolate(o, {0}, o.d, rng);
        int D = p.degree();
        if (D <= 0) return {};
        return {{unit_form(1, 0), D}};
    }
    // pivot v with o(v) != 0 so every factor has a nonzero first coefficient after the change
    std::optional<LinearForm> pivot;
    for (int i = 0; i < cfg.pivot_tries && !pivot; ++i) {
        LinearForm v(n);
        for (auto& x : v) x = F.random_base(rng);
        if (form_is_zero(v)) continue;
        Point pv(n);
        for (int j = 0; j < n; ++j) pv[j] = F.from_base(v[j]);
        try {
            if (!o(pv).is_zero()) pivot = v;
        } catch (const Indeterminate&) {
        }
    }
    if (!pivot) throw ResampleExhausted("no base point where the polynomial is nonzero");
    Mat P;
    for (;;) {
        P.assign(n, std::vector<uint32_t>(n));
        for (int i = 0; i < n; ++i) {
            P[i][0] = (*pivot)[i];
            for (int j = 1; j < n; ++j) P[i][j] = F.random_base(rng);
        }
        if (mat_inverse(P, q)) break;
    }
    IsoMap change{*mat_inverse(P, q), P};
    PolyOracle op = compose_iso(o, change);

    for (int attempt = 0; attempt < cfg.anchors; ++attempt) {
        Point alpha = random_point(F, n, rng);
        alpha[0] = F.zero();
        std::vector<std::vector<detail::SliceFactor>> per(n);
        int D = -1;
        bool ok = true;
        for (int j = 1; j < n && ok; ++j) {
            PolyOracle slice = derive(op, 2, op.d, "slice", [op, alpha, j](const Point& y) {
                Point x = alpha;
                x[0] = y[0];
                x[j] = y[1];
                return op(x);
            });
            DensePoly g = dense_interpolate(slice, {0, 1}, op.d, rng);
            int dx1 = -1;
            for (auto& [m, c] : g.terms) dx1 = std::max(dx1, int(m[0]));
            if (D < 0) D = dx1;
            if (dx1 != D || g.degree() != D) {
                ok = false;
                break;
            }
            per[j] = detail::slice_factors(g, alpha[j], rng);
        }
        if (!ok) continue;
        // glue slices through the shared beta
        FactorList out;
        // a line missing from some slice has a non-base coefficient there: it stays in NonLin
        for (auto& sf : per[1]) {
            LinearForm l(n, 0);
            l[0] = 1;
            l[1] = sf.c;
            bool base = true;
            for (int j = 2; j < n && ok && base; ++j) {
                int hits = 0;
                for (auto& o2 : per[j])
                    if (o2.beta == sf.beta) {
                        ++hits;
                        if (o2.mult != sf.mult) ok = false;
                        l[j] = o2.c;
                    }
                if (hits == 0) base = false;
                if (hits > 1) ok = false;
            }
            if (!ok) break;
            if (base) out.push_back({l, sf.mult});
        }
        if (!ok) continue;
        int s = total_multiplicity(out);
        if (s > D) continue;
        for (auto& [l, m] : out) {
            l = normalize(change.unapply(l, q), q);
            auto hr = restrict_to_hyperplane(o, l);
            if (hr.oracle.n > 0 && !zero_test(hr.oracle, cfg.vanish_trials, rng)) ok = false;
        }
        if (!ok) continue;
        std::sort(out.begin(), out.end());
        return out;
    }
    throw ResampleExhausted("linear factor extraction: anchors exhausted");
}

struct LinNonLinSplit {
    FactorList lin;
    PolyOracle nonlin;
    int t = 0;
    Scalar scale;
};

// True total degree of a homogeneous nonzero oracle, read off a random line through 0.
inline int homogeneous_degree(const PolyOracle& o, Rng& rng) {
    const Field& F = *o.F;
    for (int attempt = 0; attempt < kRegridRetries; ++attempt) {
        Point dir = random_point(F, o.n, rng);
        PolyOracle line = derive(o, 1, o.d, "line", [o, dir, &F](const Point& y) {
            Point x(o.n);
            for (int i = 0; i < o.n; ++i) x[i] = F.mul(dir[i], y[0]);
            return o(x);
        });
        try {
            DensePoly p = dense_interpolate(line, {0}, o.d, rng);
            if (!p.is_zero()) return p.degree();
        } catch (const ResampleExhausted&) {
        }
    }
    throw ResampleExhausted("degree probe failed");
}

inline LinNonLinSplit split_lin_nonlin(const PolyOracle& o, Rng& rng, const LinConfig& cfg = {}) {
    LinNonLinSplit sp;
    sp.lin = extract_linear_factors(o, rng, cfg);
    sp.scale = o.F->one();
    int D = homogeneous_degree(o, rng);
    int s = total_multiplicity(sp.lin);
    sp.t = D - s;
    if (sp.t < 0) throw std::logic_error("more linear factors than the degree");
    sp.nonlin = divide_by_linear_factors(o, sp.lin, sp.scale);
    sp.nonlin.d = sp.t;
    if (cfg.self_check && sp.t > 0) {
        LinConfig inner = cfg;
        inner.self_check = false;
        if (!extract_linear_factors(sp.nonlin, rng, inner).empty())
            throw std::logic_error("nonlinear part still has linear factors");
    }
    return sp;
}

}  // namespace sps
