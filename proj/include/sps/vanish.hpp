#pragma once
// Codimension-2 subspaces on which the nonlinear part vanishes.

#include <cmath>

#include "sps/linfactor.hpp"

namespace sps {

// V(a,b) stored as the reduced echelon basis of sp{a,b}
struct CodimTwoSpace {
    LinearForm a, b;
    friend bool operator<(const CodimTwoSpace& x, const CodimTwoSpace& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    }
    friend bool operator==(const CodimTwoSpace& x, const CodimTwoSpace& y) { return x.a == y.a && x.b == y.b; }
};

using VanishSet = std::set<CodimTwoSpace>;

inline CodimTwoSpace canonical_space(const LinearForm& l1, const LinearForm& l2, uint32_t q) {
    Rref r = rref({l1, l2}, q);
    if (r.rank != 2) throw std::invalid_argument("codim-2 generators are dependent");
    return {r.rows[0], r.rows[1]};
}

inline std::string space_to_string(const CodimTwoSpace& w) {
    return "V" + form_to_string(w.a) + form_to_string(w.b);
}

// (x1 - y.(x3,x4,x5), x2 - z.(x3,x4,x5)) in a 5-variable slice
struct SpecialPair {
    std::array<uint32_t, 3> y{}, z{};
    friend bool operator<(const SpecialPair& a, const SpecialPair& b) { return std::tie(a.y, a.z) < std::tie(b.y, b.z); }
    friend bool operator==(const SpecialPair& a, const SpecialPair& b) { return a.y == b.y && a.z == b.z; }
};

using SpecialPairSet = std::set<SpecialPair>;

struct VanishConfig {
    int rounds = 0;          // 0 picks a count from q
    int pool = 10;           // base points used to filter each enumerated slope
    uint32_t max_q = 31;     // enumeration gate
    int verify_trials = 2;
    int max_combos = 64;     // glue combinations tried per tuple
    bool check_size_bound = true;
};

// Rounds so that a fixed space is missed by every random basis change with probability <= 1e-7.
inline int default_rounds(uint32_t q) {
    double p = 1.0 - (1.0 - 1.0 / q) * (1.0 - 1.0 / (double(q) * q));
    return std::max(1, int(std::ceil(std::log(1e-7) / std::log(p))));
}

namespace detail {

struct BaseTerm {
    std::array<uint8_t, 5> e;
    uint32_t c;
};

inline std::vector<BaseTerm> base_terms(const DensePoly& p) {
    std::vector<BaseTerm> out;
    for (auto& [m, c] : p.terms) {
        BaseTerm t;
        for (int i = 0; i < 5; ++i) t.e[i] = m[i];
        t.c = p.F->base_value(c);
        out.push_back(t);
    }
    return out;
}

inline uint32_t dot3(const std::array<uint32_t, 3>& a, const std::array<uint32_t, 3>& b, uint32_t q) {
    return uint32_t((uint64_t(a[0]) * b[0] + uint64_t(a[1]) * b[1] + uint64_t(a[2]) * b[2]) % q);
}

inline bool special_pair_vanishes(const DensePoly& p, const SpecialPair& sp) {
    LinearSub s1{{0, 0, sp.y[0], sp.y[1], sp.y[2]}, p.F->zero()};
    LinearSub s2{{0, 0, sp.z[0], sp.z[1], sp.z[2]}, p.F->zero()};
    return substitute_linear(p, {{0, s1}, {1, s2}}).is_zero();
}

}  // namespace detail

// All special pairs on which the 5-variable polynomial p vanishes identically.
inline SpecialPairSet solve_special_codim2_5var(const DensePoly& p, Rng& rng, const VanishConfig& cfg = {}) {
    const Field& F = *p.F;
    uint32_t q = F.q;
    if (p.n != 5) throw std::invalid_argument("solver expects 5 variables");
    if (p.is_zero()) throw DomainError("solver input is zero");
    if (q > cfg.max_q) throw std::invalid_argument("q above the enumeration gate");
    if (!p.coeffs_in_base()) throw DomainError("solver input must have base-field coefficients");
    auto terms = detail::base_terms(p);
    int t = p.degree();

    using V3 = std::array<uint32_t, 3>;
    std::vector<V3> pool = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    while (int(pool.size()) < std::max(cfg.pool, 3)) {
        V3 w{F.random_base(rng), F.random_base(rng), F.random_base(rng)};
        if (w[0] || w[1] || w[2]) pool.push_back(w);
    }
    // powers of pool coordinates
    std::vector<std::array<std::vector<uint32_t>, 3>> wpow(pool.size());
    for (size_t k = 0; k < pool.size(); ++k)
        for (int i = 0; i < 3; ++i) {
            wpow[k][i].assign(t + 1, 1);
            for (int e = 1; e <= t; ++e) wpow[k][i][e] = F.bmul(wpow[k][i][e - 1], pool[k][i]);
        }

    SpecialPairSet out;
    std::vector<std::vector<uint32_t>> roots(pool.size());
    std::vector<bool> all(pool.size());
    std::vector<uint32_t> U(t + 1), x1pow(t + 1);
    auto is_root_at = [&](size_t k, uint32_t v) {
        return all[k] || std::binary_search(roots[k].begin(), roots[k].end(), v);
    };
    for (uint32_t a = 0; a < q; ++a)
        for (uint32_t b = 0; b < q; ++b)
            for (uint32_t c = 0; c < q; ++c) {
                V3 y{a, b, c};
                bool dead = false;
                for (size_t k = 0; k < pool.size() && !dead; ++k) {
                    uint32_t x1 = detail::dot3(y, pool[k], q);
                    x1pow[0] = 1;
                    for (int e = 1; e <= t; ++e) x1pow[e] = F.bmul(x1pow[e - 1], x1);
                    std::fill(U.begin(), U.end(), 0);
                    for (auto& tm : terms) {
                        uint64_t v = tm.c;
                        v = v * x1pow[tm.e[0]] % q;
                        v = v * wpow[k][0][tm.e[2]] % q;
                        v = v * wpow[k][1][tm.e[3]] % q;
                        v = v * wpow[k][2][tm.e[4]] % q;
                        U[tm.e[1]] = uint32_t((U[tm.e[1]] + v) % q);
                    }
                    all[k] = std::all_of(U.begin(), U.end(), [](uint32_t v) { return v == 0; });
                    roots[k].clear();
                    if (all[k]) continue;
                    for (uint32_t r = 0; r < q; ++r) {
                        uint64_t acc = 0;
                        for (int e = t; e >= 0; --e) acc = (acc * r + U[e]) % q;
                        if (acc == 0) roots[k].push_back(r);
                    }
                    if (roots[k].empty()) dead = true;
                }
                if (dead) continue;
                std::vector<size_t> chosen;
                std::vector<LinearForm> rows;
                for (size_t k = 0; k < pool.size() && chosen.size() < 3; ++k) {
                    if (all[k]) continue;
                    rows.push_back({pool[k][0], pool[k][1], pool[k][2]});
                    if (span_rank(rows, q) == int(rows.size()))
                        chosen.push_back(k);
                    else
                        rows.pop_back();
                }
                auto consider = [&](const V3& z) {
                    for (size_t k = 0; k < pool.size(); ++k)
                        if (!is_root_at(k, detail::dot3(z, pool[k], q))) return;
                    SpecialPair sp{y, z};
                    if (detail::special_pair_vanishes(p, sp)) out.insert(sp);
                };
                if (chosen.size() == 3) {
                    Mat W = rows;
                    Mat Winv = *mat_inverse(W, q);
                    for (uint32_t r0 : roots[chosen[0]])
                        for (uint32_t r1 : roots[chosen[1]])
                            for (uint32_t r2 : roots[chosen[2]]) {
                                LinearForm z = vec_mat({r0, r1, r2}, {{Winv[0][0], Winv[1][0], Winv[2][0]},
                                                                      {Winv[0][1], Winv[1][1], Winv[2][1]},
                                                                      {Winv[0][2], Winv[1][2], Winv[2][2]}}, q);
                                consider({z[0], z[1], z[2]});
                            }
                } else {
                    for (uint32_t z0 = 0; z0 < q; ++z0)
                        for (uint32_t z1 = 0; z1 < q; ++z1)
                            for (uint32_t z2 = 0; z2 < q; ++z2) consider({z0, z1, z2});
                }
            }
    return out;
}

// Whether o vanishes on V(l1,l2); indeterminate points resolved through lines.
inline bool vanishes_on(const PolyOracle& o, const LinearForm& l1, const LinearForm& l2, int trials, Rng& rng) {
    return zero_test(restrict_to_codim2(resolve_indeterminate(o), l1, l2), trials, rng);
}

namespace detail {

inline Mat shear_matrix(int n, const std::vector<std::pair<uint32_t, uint32_t>>& alpha) {
    Mat D = identity_mat(n);
    for (int i = 4; i < n; ++i) {
        D[i][2] = alpha[i - 4].first;
        D[i][3] = alpha[i - 4].second;
    }
    return D;
}

// one random basis change: spaces found in this round, in original coordinates
inline std::optional<VanishSet> vanish_round(const PolyOracle& f, const PolyOracle& nonlin, int t, Rng& rng,
                                             const VanishConfig& cfg) {
    const Field& F = *f.F;
    uint32_t q = F.q;
    int n = f.n;
    IsoMap phi = random_isomorphism(n, F, rng);
    std::vector<std::pair<uint32_t, uint32_t>> alpha(n - 4);
    for (auto& a : alpha) a = {F.random_base(rng), F.random_base(rng)};
    Mat A = mat_mul(phi.Minv, shear_matrix(n, alpha), q);  // g'(x) = f(A x)
    auto Ainv = mat_inverse(A, q);
    IsoMap iso{*Ainv, A};
    PolyOracle g = compose_iso(f, iso);

    LinConfig lc;
    lc.self_check = false;
    std::vector<SpecialPairSet> S(n);
    for (int i = 4; i < n; ++i) {
        std::map<int, Scalar> zero;
        for (int j = 4; j < n; ++j)
            if (j != i) zero[j] = F.zero();
        PolyOracle gi = restrict_vars(g, zero);
        if (zero_test(gi, 2, rng)) return std::nullopt;
        LinNonLinSplit sp = split_lin_nonlin(gi, rng, lc);
        if (sp.t != t) return std::nullopt;
        DensePoly p = dense_interpolate_homogeneous(resolve_indeterminate(sp.nonlin), {0, 1, 2, 3, 4}, t, rng);
        if (!p.coeffs_in_base() || p.is_zero()) return std::nullopt;
        S[i] = solve_special_codim2_5var(p, rng, cfg);
    }
    VanishSet out;
    auto to_forms = [&](const std::vector<SpecialPair>& choice) {
        LinearForm u1(n, 0), u2(n, 0);
        u1[0] = 1;
        u2[1] = 1;
        u1[2] = F.bneg(choice[0].y[0]);
        u1[3] = F.bneg(choice[0].y[1]);
        u2[2] = F.bneg(choice[0].z[0]);
        u2[3] = F.bneg(choice[0].z[1]);
        for (int i = 4; i < n; ++i) {
            u1[i] = F.bneg(choice[i - 4].y[2]);
            u2[i] = F.bneg(choice[i - 4].z[2]);
        }
        return std::make_pair(iso.unapply(u1, q), iso.unapply(u2, q));
    };
    for (auto& tau : S[4]) {
        std::vector<std::vector<SpecialPair>> options(n - 4);
        options[0] = {tau};
        bool missing = false;
        for (int i = 5; i < n; ++i) {
            for (auto& sg : S[i])
                if (sg.y[0] == tau.y[0] && sg.y[1] == tau.y[1] && sg.z[0] == tau.z[0] && sg.z[1] == tau.z[1])
                    options[i - 4].push_back(sg);
            if (options[i - 4].empty()) missing = true;
        }
        if (missing) continue;
        // walk the product of choices, bounded
        std::vector<size_t> idx(n - 4, 0);
        for (int combos = 0; combos < cfg.max_combos; ++combos) {
            std::vector<SpecialPair> choice(n - 4);
            for (int i = 0; i < n - 4; ++i) choice[i] = options[i][idx[i]];
            auto [l1, l2] = to_forms(choice);
            if (vanishes_on(nonlin, l1, l2, cfg.verify_trials, rng)) out.insert(canonical_space(l1, l2, q));
            int pos = 0;
            while (pos < n - 4 && ++idx[pos] == options[pos].size()) idx[pos++] = 0;
            if (pos == n - 4) break;
        }
    }
    return out;
}

}  // namespace detail

// S(NonLin(f)) from a precomputed split of f.
inline VanishSet compute_vanishing_codim2(const PolyOracle& f, const LinNonLinSplit& split, int d, Rng& rng,
                                          const VanishConfig& cfg = {}) {
    if (f.n < 5) throw std::invalid_argument("need at least 5 variables");
    if (f.F->q > cfg.max_q) throw std::invalid_argument("q above the enumeration gate");
    VanishSet out;
    if (split.t < 2) return out;
    int rounds = cfg.rounds > 0 ? cfg.rounds : default_rounds(f.F->q);
    int good = 0;
    for (int attempt = 0; good < rounds && attempt < 4 * rounds; ++attempt) {
        auto r = detail::vanish_round(f, split.nonlin, split.t, rng, cfg);
        if (!r) continue;
        ++good;
        out.insert(r->begin(), r->end());
    }
    if (good == 0) throw ResampleExhausted("no usable basis change for the vanishing computation");
    if (cfg.check_size_bound) {
        double bound = 3.0 * std::pow(double(d), 7);
        if (double(out.size()) > bound) throw std::logic_error("vanishing set exceeds 3d^7");
    }
    return out;
}

inline VanishSet compute_vanishing_codim2(const PolyOracle& f, int d, Rng& rng, const VanishConfig& cfg = {}) {
    LinConfig lc;
    lc.self_check = false;
    LinNonLinSplit sp = split_lin_nonlin(f, rng, lc);
    return compute_vanishing_codim2(f, sp, d, rng, cfg);
}

// Every canonical codim-2 subspace, tested directly.
inline VanishSet brute_force_codim2(const PolyOracle& o, Rng& rng, int extension_points = 10,
                                    uint64_t max_spaces = 2000000) {
    const Field& F = *o.F;
    uint32_t q = F.q;
    int n = o.n;
    if (n < 2) throw std::invalid_argument("need at least 2 variables");
    double count = std::pow(double(q), 2.0 * (n - 2)) * 2;
    if (count > double(max_spaces)) throw std::invalid_argument("brute-force size gate exceeded");
    PolyOracle ro = resolve_indeterminate(o);
    VanishSet out;
    for (int p1 = 0; p1 < n; ++p1)
        for (int p2 = p1 + 1; p2 < n; ++p2) {
            std::vector<int> free1, free2;
            for (int j = p1 + 1; j < n; ++j)
                if (j != p2) free1.push_back(j);
            for (int j = p2 + 1; j < n; ++j) free2.push_back(j);
            size_t nf = free1.size() + free2.size();
            uint64_t total = 1;
            for (size_t i = 0; i < nf; ++i) total *= q;
            for (uint64_t code = 0; code < total; ++code) {
                LinearForm a(n, 0), b(n, 0);
                a[p1] = 1;
                b[p2] = 1;
                uint64_t c = code;
                for (int j : free1) {
                    a[j] = uint32_t(c % q);
                    c /= q;
                }
                for (int j : free2) {
                    b[j] = uint32_t(c % q);
                    c /= q;
                }
                auto basis = nullspace({a, b}, n, q);
                bool zero = true;
                auto at = [&](const Point& x) {
                    for (int attempt = 0; attempt < 8; ++attempt) {
                        try {
                            return ro(x).is_zero();
                        } catch (const ResampleExhausted&) {
                        }
                    }
                    throw ResampleExhausted("brute force: unresolved point");
                };
                for (int e = 0; e < extension_points && zero; ++e) {
                    Point x(n, F.zero());
                    for (auto& v : basis) {
                        Scalar s = F.random(rng);
                        for (int i = 0; i < n; ++i) x[i] = F.add(x[i], F.scale(s, v[i]));
                    }
                    zero = at(x);
                }
                for (size_t k = 0; k < basis.size() && zero; ++k) {
                    Point x(n);
                    for (int i = 0; i < n; ++i) x[i] = F.from_base(basis[k][i]);
                    zero = at(x);
                }
                if (zero) out.insert({a, b});
            }
        }
    return out;
}

}  // namespace sps
