#pragma once
// Dense multivariate polynomials and univariate tools over F_{q^k}.

#include <map>
#include <set>

#include "sps/algebra.hpp"

namespace sps {

inline constexpr int kMaxVars = 16;
using Mono = std::array<uint8_t, kMaxVars>;

inline int mono_degree(const Mono& m) {
    int s = 0;
    for (auto e : m) s += e;
    return s;
}

// graded lex; the leading term is the largest
struct GrLexLess {
    bool operator()(const Mono& a, const Mono& b) const {
        int da = mono_degree(a), db = mono_degree(b);
        if (da != db) return da < db;
        return a < b;
    }
};

struct DensePoly {
    FieldPtr F;
    int n = 0;
    std::map<Mono, Scalar, GrLexLess> terms;

    DensePoly() = default;
    DensePoly(FieldPtr f, int nv) : F(std::move(f)), n(nv) {
        if (n < 0 || n > kMaxVars) throw std::invalid_argument("variable count out of range");
    }

    bool is_zero() const { return terms.empty(); }
    int degree() const { return terms.empty() ? -1 : mono_degree(terms.rbegin()->first); }

    bool is_homogeneous() const {
        int d = -1;
        for (auto& [m, c] : terms) {
            int e = mono_degree(m);
            if (d >= 0 && e != d) return false;
            d = e;
        }
        return true;
    }

    // adds c to the coefficient of m, dropping zeros
    void add_term(const Mono& m, const Scalar& c) {
        if (c.is_zero()) return;
        auto it = terms.find(m);
        if (it == terms.end()) {
            terms.emplace(m, c);
            return;
        }
        it->second = F->add(it->second, c);
        if (it->second.is_zero()) terms.erase(it);
    }

    Scalar coeff(const Mono& m) const {
        auto it = terms.find(m);
        return it == terms.end() ? F->zero() : it->second;
    }

    bool coeffs_in_base() const {
        for (auto& [m, c] : terms)
            if (!F->is_base(c)) return false;
        return true;
    }

    static DensePoly constant(FieldPtr f, int n, const Scalar& c) {
        DensePoly p(f, n);
        p.add_term(Mono{}, c);
        return p;
    }
    static DensePoly variable(FieldPtr f, int n, int i) {
        DensePoly p(f, n);
        Mono m{};
        m[i] = 1;
        p.add_term(m, p.F->one());
        return p;
    }
    static DensePoly from_form(FieldPtr f, const LinearForm& l) {
        DensePoly p(f, int(l.size()));
        for (size_t i = 0; i < l.size(); ++i) {
            if (!l[i]) continue;
            Mono m{};
            m[i] = 1;
            p.add_term(m, p.F->from_base(l[i]));
        }
        return p;
    }

    Scalar eval(const std::vector<Scalar>& x) const {
        if (int(x.size()) != n) throw std::invalid_argument("point arity mismatch");
        // cache powers per variable
        std::vector<std::vector<Scalar>> pw(n);
        int d = std::max(degree(), 0);
        for (int i = 0; i < n; ++i) {
            pw[i].push_back(F->one());
            for (int e = 1; e <= d; ++e) pw[i].push_back(F->mul(pw[i].back(), x[i]));
        }
        Scalar acc = F->zero();
        for (auto& [m, c] : terms) {
            Scalar t = c;
            for (int i = 0; i < n; ++i)
                if (m[i]) t = F->mul(t, pw[i][m[i]]);
            acc = F->add(acc, t);
        }
        return acc;
    }

    std::string to_string() const {
        if (terms.empty()) return "0";
        std::string s;
        for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
            if (!s.empty()) s += " + ";
            s += F->to_string(it->second);
            for (int i = 0; i < n; ++i)
                if (it->first[i]) s += "*x" + std::to_string(i + 1) + (it->first[i] > 1 ? "^" + std::to_string(it->first[i]) : "");
        }
        return s;
    }
};

inline void check_compatible(const DensePoly& a, const DensePoly& b) {
    if (a.n != b.n) throw std::invalid_argument("polynomial arity mismatch");
    if (a.F->q != b.F->q || a.F->k != b.F->k) throw std::invalid_argument("polynomial field mismatch");
}

inline bool operator==(const DensePoly& a, const DensePoly& b) { return a.n == b.n && a.terms == b.terms; }

inline DensePoly operator+(const DensePoly& a, const DensePoly& b) {
    check_compatible(a, b);
    DensePoly r = a;
    for (auto& [m, c] : b.terms) r.add_term(m, c);
    return r;
}

inline DensePoly operator-(const DensePoly& a) {
    DensePoly r(a.F, a.n);
    for (auto& [m, c] : a.terms) r.terms.emplace(m, a.F->neg(c));
    return r;
}

inline DensePoly operator-(const DensePoly& a, const DensePoly& b) { return a + (-b); }

inline DensePoly scale(const DensePoly& a, const Scalar& s) {
    DensePoly r(a.F, a.n);
    if (s.is_zero()) return r;
    for (auto& [m, c] : a.terms) r.add_term(m, a.F->mul(c, s));
    return r;
}

inline Mono mono_mul(const Mono& a, const Mono& b) {
    Mono r{};
    for (int i = 0; i < kMaxVars; ++i) {
        int e = a[i] + b[i];
        if (e > 255) throw std::overflow_error("exponent overflow");
        r[i] = uint8_t(e);
    }
    return r;
}

inline DensePoly operator*(const DensePoly& a, const DensePoly& b) {
    check_compatible(a, b);
    DensePoly r(a.F, a.n);
    for (auto& [ma, ca] : a.terms)
        for (auto& [mb, cb] : b.terms) r.add_term(mono_mul(ma, mb), a.F->mul(ca, cb));
    return r;
}

inline DensePoly pow(const DensePoly& a, int e) {
    DensePoly r = DensePoly::constant(a.F, a.n, a.F->one());
    for (int i = 0; i < e; ++i) r = r * a;
    return r;
}

enum class PolyOp { add, sub, mul };

inline DensePoly poly_arith(const DensePoly& a, const DensePoly& b, PolyOp op) {
    switch (op) {
        case PolyOp::add: return a + b;
        case PolyOp::sub: return a - b;
        case PolyOp::mul: return a * b;
    }
    return a;
}

// Replacement for one variable: form·x + constant, with the form in the same n variables.
struct LinearSub {
    LinearForm form;  // may be empty, meaning zero
    Scalar constant;
};

// Simultaneous substitution; variables not in the map stay as they are.
inline DensePoly substitute_linear(const DensePoly& p, const std::map<int, LinearSub>& sub) {
    for (auto& [i, s] : sub) {
        if (i < 0 || i >= p.n) throw std::invalid_argument("substituted variable out of range");
        if (!s.form.empty() && int(s.form.size()) != p.n) throw std::invalid_argument("substitution arity mismatch");
    }
    const Field& F = *p.F;
    int d = std::max(p.degree(), 0);
    // powers of each image polynomial, built lazily
    std::vector<std::vector<DensePoly>> pw(p.n);
    auto image = [&](int i) {
        auto it = sub.find(i);
        if (it == sub.end()) return DensePoly::variable(p.F, p.n, i);
        DensePoly r(p.F, p.n);
        if (!it->second.form.empty()) r = DensePoly::from_form(p.F, it->second.form);
        if (it->second.constant.f) r.add_term(Mono{}, it->second.constant);
        return r;
    };
    auto power = [&](int i, int e) -> const DensePoly& {
        if (pw[i].empty()) {
            pw[i].push_back(DensePoly::constant(p.F, p.n, F.one()));
            pw[i].push_back(image(i));
        }
        while (int(pw[i].size()) <= e) pw[i].push_back(pw[i].back() * pw[i][1]);
        return pw[i][e];
    };
    (void)d;
    DensePoly r(p.F, p.n);
    for (auto& [m, c] : p.terms) {
        DensePoly t = DensePoly::constant(p.F, p.n, c);
        for (int i = 0; i < p.n; ++i)
            if (m[i]) t = t * power(i, m[i]);
        r = r + t;
    }
    return r;
}

// p / d when exact, nullopt otherwise
inline std::optional<DensePoly> exact_divide(const DensePoly& p, const DensePoly& d) {
    check_compatible(p, d);
    if (d.is_zero()) throw DomainError("division by zero polynomial");
    const Field& F = *p.F;
    DensePoly rem = p, quo(p.F, p.n);
    auto [dm, dc] = *d.terms.rbegin();
    Scalar dinv = F.inv(dc);
    while (!rem.is_zero()) {
        auto [rm, rc] = *rem.terms.rbegin();
        Mono qm{};
        for (int i = 0; i < kMaxVars; ++i) {
            if (rm[i] < dm[i]) return std::nullopt;
            qm[i] = uint8_t(rm[i] - dm[i]);
        }
        Scalar qc = F.mul(rc, dinv);
        quo.add_term(qm, qc);
        for (auto& [m, c] : d.terms) rem.add_term(mono_mul(m, qm), F.neg(F.mul(c, qc)));
    }
    return quo;
}

// ---------------- univariate ----------------

struct UniPoly {
    const Field* F = nullptr;
    std::vector<Scalar> c;  // low to high

    UniPoly() = default;
    explicit UniPoly(const Field* f, std::vector<Scalar> cs = {}) : F(f), c(std::move(cs)) { trim(); }

    void trim() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }
    bool is_zero() const { return c.empty(); }
    int degree() const { return int(c.size()) - 1; }
    const Scalar& lead() const { return c.back(); }

    Scalar eval(const Scalar& x) const {
        Scalar acc = F->zero();
        for (size_t i = c.size(); i-- > 0;) acc = F->add(F->mul(acc, x), c[i]);
        return acc;
    }

    static UniPoly x(const Field* f) { return UniPoly(f, {f->zero(), f->one()}); }
    static UniPoly constant(const Field* f, const Scalar& s) { return UniPoly(f, {s}); }
};

inline UniPoly operator+(const UniPoly& a, const UniPoly& b) {
    const Field* F = a.F ? a.F : b.F;
    std::vector<Scalar> r(std::max(a.c.size(), b.c.size()), F->zero());
    for (size_t i = 0; i < a.c.size(); ++i) r[i] = a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] = F->add(r[i], b.c[i]);
    return UniPoly(F, std::move(r));
}

inline UniPoly operator-(const UniPoly& a, const UniPoly& b) {
    const Field* F = a.F ? a.F : b.F;
    std::vector<Scalar> r(std::max(a.c.size(), b.c.size()), F->zero());
    for (size_t i = 0; i < a.c.size(); ++i) r[i] = a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] = F->sub(r[i], b.c[i]);
    return UniPoly(F, std::move(r));
}

inline UniPoly operator*(const UniPoly& a, const UniPoly& b) {
    const Field* F = a.F ? a.F : b.F;
    if (a.is_zero() || b.is_zero()) return UniPoly(F);
    std::vector<Scalar> r(a.c.size() + b.c.size() - 1, F->zero());
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i].is_zero()) continue;
        for (size_t j = 0; j < b.c.size(); ++j) r[i + j] = F->add(r[i + j], F->mul(a.c[i], b.c[j]));
    }
    return UniPoly(F, std::move(r));
}

inline std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b) {
    if (b.is_zero()) throw DomainError("division by zero polynomial");
    const Field* F = b.F;
    UniPoly r = a;
    r.F = F;
    if (r.degree() < b.degree()) return {UniPoly(F), r};
    std::vector<Scalar> q(r.c.size() - b.c.size() + 1, F->zero());
    Scalar li = F->inv(b.lead());
    int db = b.degree();
    while (!r.is_zero() && r.degree() >= db) {
        int sh = r.degree() - db;
        Scalar co = F->mul(r.lead(), li);
        q[sh] = co;
        for (int j = 0; j <= db; ++j) r.c[sh + j] = F->sub(r.c[sh + j], F->mul(co, b.c[j]));
        r.trim();
    }
    return {UniPoly(F, std::move(q)), r};
}

inline UniPoly make_monic(UniPoly a) {
    if (a.is_zero()) return a;
    Scalar li = a.F->inv(a.lead());
    for (auto& v : a.c) v = a.F->mul(v, li);
    return a;
}

inline UniPoly gcd(UniPoly a, UniPoly b) {
    while (!b.is_zero()) {
        UniPoly r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return make_monic(a);
}

inline UniPoly powmod(UniPoly base, uint64_t e, const UniPoly& m) {
    UniPoly r = divmod(UniPoly::constant(m.F, m.F->one()), m).second;
    base = divmod(base, m).second;
    while (e) {
        if (e & 1) r = divmod(r * base, m).second;
        e >>= 1;
        if (e) base = divmod(base * base, m).second;
    }
    return r;
}

// Lagrange interpolation through (xs[i], ys[i]) with distinct xs
inline UniPoly uni_interpolate(const Field* F, const std::vector<Scalar>& xs, const std::vector<Scalar>& ys) {
    UniPoly acc(F);
    for (size_t i = 0; i < xs.size(); ++i) {
        UniPoly basis = UniPoly::constant(F, F->one());
        Scalar den = F->one();
        for (size_t j = 0; j < xs.size(); ++j) {
            if (j == i) continue;
            basis = basis * UniPoly(F, {F->neg(xs[j]), F->one()});
            den = F->mul(den, F->sub(xs[i], xs[j]));
        }
        acc = acc + basis * UniPoly::constant(F, F->div(ys[i], den));
    }
    return acc;
}

namespace detail {

// g monic, squarefree, product of distinct linear factors
inline void split_linear(const UniPoly& g, Rng& rng, std::vector<Scalar>& out, int budget) {
    const Field* F = g.F;
    if (g.degree() <= 0) return;
    if (g.degree() == 1) {
        out.push_back(F->neg(F->div(g.c[0], g.c[1])));
        return;
    }
    uint64_t Q = F->size();
    for (int attempt = 0; attempt < budget; ++attempt) {
        UniPoly h;
        if (F->q == 2) {
            // trace map of a*x
            UniPoly ax(F, {F->zero(), F->random_nonzero(rng)});
            UniPoly t = divmod(ax, g).second, acc = t;
            for (int i = 1; i < F->k; ++i) {
                t = divmod(t * t, g).second;
                acc = acc + t;
            }
            h = acc;
        } else {
            UniPoly base(F, {F->random(rng), F->one()});
            h = powmod(base, (Q - 1) / 2, g) - UniPoly::constant(F, F->one());
        }
        UniPoly f1 = gcd(g, h);
        if (f1.degree() > 0 && f1.degree() < g.degree()) {
            UniPoly f2 = make_monic(divmod(g, f1).first);
            split_linear(f1, rng, out, budget);
            split_linear(f2, rng, out, budget);
            return;
        }
    }
    throw std::runtime_error("root splitting retries exhausted");
}

}  // namespace detail

// distinct roots in F_{q^k}
inline std::vector<Scalar> uni_roots(const UniPoly& p, Rng& rng) {
    if (p.is_zero()) throw DomainError("roots of the zero polynomial");
    const Field* F = p.F;
    if (p.degree() == 0) return {};
    UniPoly g = make_monic(p);
    UniPoly xq = powmod(UniPoly::x(F), F->size(), g);
    UniPoly lin = gcd(g, xq - UniPoly::x(F));
    std::vector<Scalar> out;
    detail::split_linear(lin, rng, out, 200);
    std::sort(out.begin(), out.end());
    return out;
}

// common roots of a list; zero entries impose nothing but at least one must be nonzero
inline std::vector<Scalar> uni_gcd_roots(const std::vector<UniPoly>& polys, Rng& rng) {
    UniPoly g;
    bool any = false;
    for (auto& p : polys) {
        if (p.is_zero()) continue;
        g = any ? gcd(g, p) : make_monic(p);
        any = true;
    }
    if (!any) throw DomainError("all polynomials are zero");
    return uni_roots(g, rng);
}

}  // namespace sps
