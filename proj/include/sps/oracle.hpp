#pragma once
// Black-box polynomials and the combinators used on them.

#include <atomic>
#include <functional>

#include "sps/mpoly.hpp"

namespace sps {

// Evaluation hit a point where a known divisor vanishes.
struct Indeterminate : std::runtime_error {
    Indeterminate() : std::runtime_error("indeterminate evaluation") {}
};

struct ResampleExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Point = std::vector<Scalar>;

struct PolyOracle {
    FieldPtr F;
    int n = 0;
    int d = 0;
    std::string note;
    std::function<Scalar(const Point&)> fn;
    std::shared_ptr<std::atomic<uint64_t>> counter;

    Scalar operator()(const Point& x) const {
        if (int(x.size()) != n) throw std::invalid_argument("oracle arity mismatch");
        return fn(x);
    }
    uint64_t queries() const { return counter ? counter->load(std::memory_order_relaxed) : 0; }
};

// leaf oracle; its counter is shared by everything derived from it
inline PolyOracle make_oracle(FieldPtr F, int n, int d, std::function<Scalar(const Point&)> f,
                              std::string note = "external") {
    auto ctr = std::make_shared<std::atomic<uint64_t>>(0);
    PolyOracle o{F, n, d, std::move(note), nullptr, ctr};
    o.fn = [f = std::move(f), ctr](const Point& x) {
        ctr->fetch_add(1, std::memory_order_relaxed);
        return f(x);
    };
    return o;
}

inline PolyOracle derive(const PolyOracle& base, int n, int d, std::string note,
                         std::function<Scalar(const Point&)> f) {
    return PolyOracle{base.F, n, d, std::move(note), std::move(f), base.counter};
}

inline PolyOracle oracle_from_poly(const DensePoly& p, int d) {
    return make_oracle(p.F, p.n, d, [p](const Point& x) { return p.eval(x); }, "dense");
}

inline PolyOracle oracle_from_product(FieldPtr F, int n, const std::vector<LinearForm>& forms, Scalar scale) {
    const Field* f = F.get();
    return make_oracle(F, n, int(forms.size()), [forms, scale, f](const Point& x) {
        Scalar acc = scale;
        for (auto& l : forms) acc = f->mul(acc, eval_form(*f, l, x));
        return acc;
    }, "product");
}

inline Point random_point(const Field& F, int n, Rng& rng) {
    Point p(n);
    for (auto& v : p) v = F.random(rng);
    return p;
}

// x -> o(Minv x): the forms in m.M become the coordinates
inline PolyOracle compose_iso(const PolyOracle& o, const IsoMap& m) {
    if (m.n() != o.n) throw std::invalid_argument("isomorphism arity mismatch");
    const Field* F = o.F.get();
    Mat minv = m.Minv;
    return derive(o, o.n, o.d, "iso(" + o.note + ")", [o, minv, F](const Point& x) { return o(mat_apply(*F, minv, x)); });
}

// fixes some coordinates; the others keep their relative order
inline PolyOracle restrict_vars(const PolyOracle& o, const std::map<int, Scalar>& fixed) {
    for (auto& [i, v] : fixed)
        if (i < 0 || i >= o.n) throw std::invalid_argument("restricted variable out of range");
    std::vector<int> free_vars;
    for (int i = 0; i < o.n; ++i)
        if (!fixed.count(i)) free_vars.push_back(i);
    int n = o.n;
    return derive(o, int(free_vars.size()), o.d, "restrict(" + o.note + ")", [o, fixed, free_vars, n](const Point& x) {
        Point full(n);
        for (auto& [i, v] : fixed) full[i] = v;
        for (size_t j = 0; j < free_vars.size(); ++j) full[free_vars[j]] = x[j];
        return o(full);
    });
}

// keeps arity; listed coordinates are overwritten
inline PolyOracle pin_vars(const PolyOracle& o, const std::map<int, Scalar>& fixed) {
    return derive(o, o.n, o.d, "pin(" + o.note + ")", [o, fixed](const Point& x) {
        Point y = x;
        for (auto& [i, v] : fixed) y[i] = v;
        return o(y);
    });
}

using FactorList = std::vector<std::pair<LinearForm, int>>;

inline int total_multiplicity(const FactorList& fs) {
    int s = 0;
    for (auto& [l, m] : fs) s += m;
    return s;
}

inline PolyOracle divide_by_linear_factors(const PolyOracle& o, const FactorList& factors, const Scalar& scale) {
    const Field* F = o.F.get();
    int s = total_multiplicity(factors);
    if (scale.is_zero()) throw DomainError("zero scale");
    Scalar sinv = F->inv(scale);
    return derive(o, o.n, o.d - s, "div(" + o.note + ")", [o, factors, sinv, F](const Point& x) {
        Scalar den = F->one();
        for (auto& [l, m] : factors) {
            Scalar v = eval_form(*F, l, x);
            if (v.is_zero()) throw Indeterminate();
            for (int i = 0; i < m; ++i) den = F->mul(den, v);
        }
        return F->mul(F->mul(o(x), F->inv(den)), sinv);
    });
}

inline PolyOracle multiply_by_linear_factors(const PolyOracle& o, const FactorList& factors, const Scalar& scale) {
    const Field* F = o.F.get();
    int s = total_multiplicity(factors);
    return derive(o, o.n, o.d + s, "mul(" + o.note + ")", [o, factors, scale, F](const Point& x) {
        Scalar acc = F->mul(o(x), scale);
        for (auto& [l, m] : factors) {
            Scalar v = eval_form(*F, l, x);
            for (int i = 0; i < m; ++i) acc = F->mul(acc, v);
        }
        return acc;
    });
}

inline PolyOracle difference(const PolyOracle& a, const PolyOracle& b) {
    if (a.n != b.n) throw std::invalid_argument("oracle arity mismatch");
    const Field* F = a.F.get();
    return derive(a, a.n, std::max(a.d, b.d), "diff", [a, b, F](const Point& x) { return F->sub(a(x), b(x)); });
}

// V(l) as an (n-1)-variate oracle; iso.M has l as its first row
struct HyperplaneRestriction {
    PolyOracle oracle;
    IsoMap iso;
};

inline HyperplaneRestriction restrict_to_hyperplane(const PolyOracle& o, const LinearForm& l) {
    IsoMap iso = make_isomorphism({l}, o.n, o.F->q);
    PolyOracle r = restrict_vars(compose_iso(o, iso), {{0, o.F->zero()}});
    return {r, iso};
}

// factor of the restricted oracle (n-1 coords) back to an original-coordinate form
inline LinearForm lift_from_hyperplane(const LinearForm& f, const IsoMap& iso, uint32_t q) {
    LinearForm full(f.size() + 1, 0);
    for (size_t i = 0; i < f.size(); ++i) full[i + 1] = f[i];
    return iso.unapply(full, q);
}

// V(l1,l2) as an (n-2)-variate oracle
inline PolyOracle restrict_to_codim2(const PolyOracle& o, const LinearForm& l1, const LinearForm& l2) {
    IsoMap iso = make_isomorphism({l1, l2}, o.n, o.F->q);
    return restrict_vars(compose_iso(o, iso), {{0, o.F->zero()}, {1, o.F->zero()}});
}

inline constexpr int kIndeterminateRetries = 64;

// Schwartz-Zippel over the whole (extension) field
inline bool zero_test(const PolyOracle& o, int trials, Rng& rng) {
    if (trials < 1) throw std::invalid_argument("trials must be positive");
    int done = 0, skipped = 0;
    while (done < trials) {
        Point x = random_point(*o.F, o.n, rng);
        try {
            if (!o(x).is_zero()) return false;
            ++done;
        } catch (const Indeterminate&) {
            if (++skipped > kIndeterminateRetries * trials) throw ResampleExhausted("zero_test: too many indeterminate points");
        }
    }
    return true;
}

// distinct grid values per axis; base-field values only when there is no extension
inline std::vector<Scalar> distinct_points(const Field& F, int count, Rng& rng) {
    if (uint64_t(count) > F.size()) throw std::invalid_argument("field too small for interpolation grid");
    std::set<Scalar> seen;
    std::vector<Scalar> out;
    while (int(out.size()) < count) {
        Scalar s = F.random(rng);
        if (seen.insert(s).second) out.push_back(s);
    }
    return out;
}

namespace detail {

// inverse Vandermonde: coefficients = Vinv * values
inline std::vector<std::vector<Scalar>> inverse_vandermonde(const Field& F, const std::vector<Scalar>& xs) {
    size_t m = xs.size();
    std::vector<std::vector<Scalar>> inv(m, std::vector<Scalar>(m, F.zero()));
    for (size_t i = 0; i < m; ++i) {
        UniPoly basis = UniPoly::constant(&F, F.one());
        Scalar den = F.one();
        for (size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            basis = basis * UniPoly(&F, {F.neg(xs[j]), F.one()});
            den = F.mul(den, F.sub(xs[i], xs[j]));
        }
        Scalar di = F.inv(den);
        for (size_t e = 0; e < basis.c.size(); ++e) inv[e][i] = F.mul(basis.c[e], di);
    }
    return inv;
}

// tensor interpolation over the given axes; per-axis degree <= deg; result in m variables
inline DensePoly tensor_interpolate(const Field& F, FieldPtr Fp, int m, int deg,
                                    const std::function<Scalar(const Point&)>& eval, Rng& rng) {
    int side = deg + 1;
    size_t total = 1;
    for (int i = 0; i < m; ++i) total *= size_t(side);
    std::vector<std::vector<Scalar>> grid(m);
    std::vector<std::vector<std::vector<Scalar>>> vinv(m);
    for (int i = 0; i < m; ++i) {
        grid[i] = distinct_points(F, side, rng);
        vinv[i] = inverse_vandermonde(F, grid[i]);
    }
    std::vector<Scalar> vals(total);
    Point pt(m);
    std::vector<int> idx(m, 0);
    for (size_t lin = 0; lin < total; ++lin) {
        size_t r = lin;
        for (int i = m - 1; i >= 0; --i) {
            idx[i] = int(r % side);
            r /= side;
            pt[i] = grid[i][idx[i]];
        }
        vals[lin] = eval(pt);
    }
    // axis by axis; axis i has stride side^(m-1-i)
    size_t stride = total;
    std::vector<Scalar> line(side), out(side);
    for (int ax = 0; ax < m; ++ax) {
        stride /= side;
        for (size_t base = 0; base < total; ++base) {
            if ((base / stride) % side != 0) continue;
            for (int j = 0; j < side; ++j) line[j] = vals[base + j * stride];
            for (int e = 0; e < side; ++e) {
                Scalar acc = F.zero();
                for (int j = 0; j < side; ++j) acc = F.add(acc, F.mul(vinv[ax][e][j], line[j]));
                out[e] = acc;
            }
            for (int e = 0; e < side; ++e) vals[base + e * stride] = out[e];
        }
    }
    DensePoly p(Fp, m);
    for (size_t lin = 0; lin < total; ++lin) {
        if (vals[lin].is_zero()) continue;
        Mono mono{};
        size_t r = lin;
        for (int i = m - 1; i >= 0; --i) {
            mono[i] = uint8_t(r % side);
            r /= side;
        }
        p.terms.emplace(mono, vals[lin]);
    }
    return p;
}

}  // namespace detail

inline constexpr int kRegridRetries = 20;

// Interpolates o restricted to the active coordinates (others set to 0) as a polynomial
// in |active| variables, ordered as listed.
inline DensePoly dense_interpolate(const PolyOracle& o, const std::vector<int>& active, int t, Rng& rng) {
    const Field& F = *o.F;
    int m = int(active.size());
    if (m > kMaxVars) throw std::invalid_argument("too many active variables");
    if (m == 0) {
        Point z(o.n, F.zero());
        return DensePoly::constant(o.F, 0, o(z));
    }
    for (int attempt = 0; attempt < kRegridRetries; ++attempt) {
        try {
            auto eval = [&](const Point& y) {
                Point x(o.n, F.zero());
                for (int i = 0; i < m; ++i) x[active[i]] = y[i];
                return o(x);
            };
            DensePoly p = detail::tensor_interpolate(F, o.F, m, t, eval, rng);
            if (p.degree() > t) throw std::runtime_error("interpolated degree exceeds bound");
            return p;
        } catch (const Indeterminate&) {
        }
    }
    throw ResampleExhausted("dense_interpolate: indeterminate grid");
}

// For o homogeneous of degree exactly t: sets the first active variable to 1,
// interpolates the rest and homogenizes.
inline DensePoly dense_interpolate_homogeneous(const PolyOracle& o, const std::vector<int>& active, int t, Rng& rng) {
    const Field& F = *o.F;
    int m = int(active.size());
    if (m < 1) throw std::invalid_argument("need an active variable");
    for (int attempt = 0; attempt < kRegridRetries; ++attempt) {
        try {
            auto eval = [&](const Point& y) {
                Point x(o.n, F.zero());
                x[active[0]] = F.one();
                for (int i = 1; i < m; ++i) x[active[i]] = y[i - 1];
                return o(x);
            };
            DensePoly de = detail::tensor_interpolate(F, o.F, m - 1, t, eval, rng);
            DensePoly p(o.F, m);
            for (auto& [mono, c] : de.terms) {
                int deg = mono_degree(mono);
                if (deg > t) throw std::runtime_error("interpolated degree exceeds bound");
                Mono h{};
                h[0] = uint8_t(t - deg);
                for (int i = 1; i < m; ++i) h[i] = mono[i - 1];
                p.terms.emplace(h, c);
            }
            return p;
        } catch (const Indeterminate&) {
        }
    }
    throw ResampleExhausted("dense_interpolate_homogeneous: indeterminate grid");
}

// Evaluates through a random line wherever the wrapped oracle is indeterminate,
// giving the polynomial's value there.
inline PolyOracle resolve_indeterminate(const PolyOracle& o) {
    return derive(o, o.n, o.d, "resolved(" + o.note + ")", [o](const Point& x) {
        try {
            return o(x);
        } catch (const Indeterminate&) {
        }
        const Field& F = *o.F;
        uint64_t h = 1469598103934665603ULL;
        for (auto& s : x)
            for (int i = 0; i < F.k; ++i) h = (h ^ s.c[i]) * 1099511628211ULL;
        Rng local(h);
        for (int attempt = 0; attempt < kRegridRetries; ++attempt) {
            Point v = random_point(F, o.n, local);
            std::vector<Scalar> lam, val;
            try {
                while (int(lam.size()) < o.d + 1) {
                    Scalar l = F.random_nonzero(local);
                    if (std::find(lam.begin(), lam.end(), l) != lam.end()) continue;
                    Point y(o.n);
                    for (int i = 0; i < o.n; ++i) y[i] = F.add(x[i], F.mul(l, v[i]));
                    val.push_back(o(y));
                    lam.push_back(l);
                }
            } catch (const Indeterminate&) {
                continue;
            }
            UniPoly u = uni_interpolate(&F, lam, val);
            return u.is_zero() ? F.zero() : u.c[0];
        }
        throw ResampleExhausted("could not resolve an indeterminate point");
    });
}

// agreement of an interpolant with its oracle at fresh random points
inline bool agrees(const PolyOracle& o, const std::vector<int>& active, const DensePoly& p, int trials, Rng& rng) {
    const Field& F = *o.F;
    int done = 0, skipped = 0;
    while (done < trials) {
        Point y = random_point(F, int(active.size()), rng);
        Point x(o.n, F.zero());
        for (size_t i = 0; i < active.size(); ++i) x[active[i]] = y[i];
        try {
            if (o(x) != p.eval(y)) return false;
            ++done;
        } catch (const Indeterminate&) {
            if (++skipped > kIndeterminateRetries * trials) throw ResampleExhausted("agreement check");
        }
    }
    return true;
}

}  // namespace sps
