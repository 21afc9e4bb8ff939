#pragma once
// Reconstruction drivers: low rank, corner case, known gate factors, high rank.

#include <chrono>

#include "sps/candidates.hpp"
#include "sps/circuit.hpp"
#include "sps/geometry.hpp"

namespace sps {

struct ReconstructionConfig {
    int R_max = 6;
    int tau_x = 4;
    int tau_b = 3;
    int tau_r = 0;          // 0: 60*ceil(log2 d) + 61
    int pit_trials = 40;
    int max_subsets = 64;   // per r in the low-rank search
    int corner_retries = 1;
    VanishConfig vanish;
    LinConfig lin;

    int effective_tau_r(int d) const {
        if (tau_r > 0) return tau_r;
        return 60 * int(std::ceil(std::log2(std::max(d, 2)))) + 61;
    }
    void validate() const {
        if (R_max < 1 || tau_x < 1 || tau_b < 1 || tau_r < 0) throw std::invalid_argument("thresholds must be >= 1");
        if (pit_trials < 2) throw std::invalid_argument("pit_trials must be >= 2");
    }
};

enum class ReconStatus { success, not_applicable, failed };

inline std::string to_string(ReconStatus s) {
    switch (s) {
        case ReconStatus::success: return "success";
        case ReconStatus::not_applicable: return "not-applicable";
        case ReconStatus::failed: return "failed";
    }
    return "?";
}

struct ReconResult {
    ReconStatus status = ReconStatus::failed;
    SpsCircuit circuit;
    std::string path;
    std::string message;
    uint64_t queries = 0;
    double seconds = 0;
    int pit_trials = 0;

    int fan_in() const { return circuit.fan_in(); }
};

// Shared preprocessing: Lin/NonLin split, vanishing set, candidate forms.
struct Analysis {
    LinNonLinSplit split;
    VanishSet S;
    CandidateSet L;
    int n = 0, d = 0;
};

inline Analysis analyze(const PolyOracle& o, int d, Rng& rng, const ReconstructionConfig& cfg) {
    Analysis a;
    a.n = o.n;
    a.d = d;
    LinConfig lc = cfg.lin;
    lc.self_check = false;
    a.split = split_lin_nonlin(o, rng, lc);
    a.split.nonlin = resolve_indeterminate(a.split.nonlin);
    if (a.split.t >= 2) {
        a.S = compute_vanishing_codim2(o, a.split, d, rng, cfg.vanish);
        a.L = compute_candidate_forms(a.split.nonlin, a.split.t, a.S, rng);
    }
    return a;
}

namespace detail {

inline std::vector<LinearForm> expand(const FactorList& fl) {
    std::vector<LinearForm> out;
    for (auto& [l, m] : fl)
        for (int i = 0; i < m; ++i) out.push_back(l);
    return out;
}

// normalizes every factor, folding the leads into the coefficient
inline Gate normalized_gate(const Field& F, Scalar coeff, const std::vector<LinearForm>& factors) {
    Gate g{coeff, {}};
    for (auto& l : factors) {
        uint32_t lead = 0;
        g.factors.push_back(normalize(l, F.q, &lead));
        g.coeff = F.scale(g.coeff, lead);
    }
    std::sort(g.factors.begin(), g.factors.end());
    return g;
}

inline bool pit_ok(const PolyOracle& o, const SpsCircuit& c, const ReconstructionConfig& cfg, Rng& rng) {
    return equivalent_pit(o, circuit_oracle(c), cfg.pit_trials, rng);
}

// complete split into exactly deg linear factors with the leftover constant
struct FullSplit {
    FactorList factors;
    Scalar scale;
};

inline std::optional<FullSplit> full_split(const PolyOracle& o, int deg, Rng& rng, const LinConfig& lc) {
    if (zero_test(o, 2, rng)) return std::nullopt;
    LinConfig inner = lc;
    inner.self_check = false;
    FactorList fl = extract_linear_factors(o, rng, inner);
    if (total_multiplicity(fl) != deg) return std::nullopt;
    PolyOracle rest = resolve_indeterminate(divide_by_linear_factors(o, fl, o.F->one()));
    Point x = random_point(*o.F, o.n, rng);
    return FullSplit{fl, rest(x)};
}

inline void finish(ReconResult& r, const PolyOracle& o, uint64_t q0, std::chrono::steady_clock::time_point t0) {
    r.queries = o.queries() - q0;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

// ---------------- low rank ----------------

inline ReconResult low_rank_reconstruct(const PolyOracle& o, int d, const Analysis& A, Rng& rng,
                                        const ReconstructionConfig& cfg) {
    cfg.validate();
    auto t0 = std::chrono::steady_clock::now();
    uint64_t q0 = o.queries();
    const Field& F = *o.F;
    uint32_t q = F.q;
    int n = o.n;
    ReconResult res;
    res.path = "low";
    int t = A.split.t;
    if (t == 0) {
        res.status = ReconStatus::not_applicable;
        res.message = "degenerate input: product of linear forms";
        detail::finish(res, o, q0, t0);
        return res;
    }
    std::vector<LinearForm> pool;
    for (auto& w : A.S) {
        pool.push_back(w.a);
        pool.push_back(w.b);
    }
    pool = make_proper_set(pool, q);
    std::sort(pool.begin(), pool.end());
    std::vector<LinearForm> lin = detail::expand(A.split.lin);
    const PolyOracle& nonlin = A.split.nonlin;
    int span_dim = span_rank(pool, q);

    for (int r = 1; r <= std::min(cfg.R_max, int(pool.size())); ++r) {
        if (r < span_dim && span_dim <= cfg.R_max) continue;
        std::vector<int> idx(r);
        for (int i = 0; i < r; ++i) idx[i] = i;
        int tried = 0;
        for (;;) {
            std::vector<LinearForm> ys;
            for (int i : idx) ys.push_back(pool[i]);
            if (span_rank(ys, q) == r) {
                ++tried;
                IsoMap gamma = make_isomorphism(ys, n, q);
                PolyOracle g = compose_iso(nonlin, gamma);
                // quick filter: g must not depend on coordinates r+1..n
                bool depends = false;
                for (int trial = 0; trial < 2 && !depends; ++trial) {
                    Point x = random_point(F, n, rng), y = x;
                    for (int i = r; i < n; ++i) y[i] = F.random(rng);
                    depends = g(x) != g(y);
                }
                if (!depends) {
                    std::vector<int> active(r);
                    for (int i = 0; i < r; ++i) active[i] = i;
                    DensePoly h = dense_interpolate_homogeneous(g, active, t, rng);
                    if (h.coeffs_in_base() && !h.is_zero()) {
                        SpsCircuit c{o.F, n, d, {}};
                        for (auto& [m, coeff] : h.terms) {
                            std::vector<LinearForm> fs = lin;
                            for (int i = 0; i < r; ++i)
                                for (int e = 0; e < m[i]; ++e) fs.push_back(ys[i]);
                            c.gates.push_back(detail::normalized_gate(F, F.mul(coeff, A.split.scale), fs));
                        }
                        if (detail::pit_ok(o, c, cfg, rng)) {
                            double bound = std::pow(double(t), double(r));
                            if (double(c.fan_in()) > bound) throw std::logic_error("low-rank fan-in exceeds t^r");
                            res.status = ReconStatus::success;
                            res.circuit = c;
                            res.pit_trials = cfg.pit_trials;
                            res.message = "r=" + std::to_string(r);
                            detail::finish(res, o, q0, t0);
                            return res;
                        }
                    }
                }
            }
            if (tried >= cfg.max_subsets) break;
            int i = r - 1;
            while (i >= 0 && idx[i] == int(pool.size()) - r + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    res.status = ReconStatus::failed;
    res.message = "no subset passed the identity test";
    detail::finish(res, o, q0, t0);
    return res;
}

inline ReconResult low_rank_reconstruct(const PolyOracle& o, int d, Rng& rng, const ReconstructionConfig& cfg = {}) {
    return low_rank_reconstruct(o, d, analyze(o, d, rng, cfg), rng, cfg);
}

// ---------------- corner case ----------------

namespace detail {

// polynomial x -> delta * l^t
inline PolyOracle power_oracle(const PolyOracle& like, const LinearForm& l, int t, const Scalar& delta) {
    const Field* F = like.F.get();
    return derive(like, like.n, t, "power", [F, l, t, delta](const Point& x) {
        return F->mul(delta, F->pow(eval_form(*F, l, x), uint64_t(t)));
    });
}

// the set X of scalars for one candidate l1
inline std::vector<Scalar> corner_scalars(const PolyOracle& nonlin, int t, const LinearForm& l1, Rng& rng,
                                          const ReconstructionConfig& cfg) {
    const Field& F = *nonlin.F;
    uint32_t q = F.q;
    int n = nonlin.n;
    auto hr = restrict_to_hyperplane(nonlin, l1);
    if (zero_test(hr.oracle, 2, rng)) return {};
    LinConfig lc = cfg.lin;
    lc.self_check = false;
    FactorList fl = extract_linear_factors(hr.oracle, rng, lc);
    std::vector<LinearForm> basis = {l1};
    for (auto& [f, m] : fl) {
        basis.push_back(lift_from_hyperplane(f, hr.iso, q));
        if (span_rank(basis, q) != int(basis.size())) basis.pop_back();
        if (basis.size() == 3) break;
    }
    if (basis.size() < 3) return {};
    IsoMap delta = make_isomorphism(basis, n, q);
    PolyOracle g = compose_iso(nonlin, delta);
    for (int attempt = 0; attempt <= cfg.corner_retries; ++attempt) {
        Point fixed = random_point(F, n, rng);
        PolyOracle g3 = derive(g, 3, t, "corner-slice", [g, fixed](const Point& y) {
            Point x = fixed;
            x[0] = y[0];
            x[1] = y[1];
            x[2] = y[2];
            return g(x);
        });
        DensePoly p = dense_interpolate(g3, {0, 1, 2}, t, rng);
        // x2 = y*x1: coefficient of x1^e x3^c is a polynomial in y
        std::map<std::pair<int, int>, std::vector<Scalar>> P;
        for (auto& [m, c] : p.terms) {
            auto& v = P[{m[0] + m[1], m[2]}];
            if (int(v.size()) <= m[1]) v.resize(m[1] + 1, F.zero());
            v[m[1]] = F.add(v[m[1]], c);
        }
        std::vector<UniPoly> system;
        for (auto& [key, v] : P)
            if (!(key.first == t && key.second == 0)) system.push_back(UniPoly(&F, v));
        bool all_zero = std::all_of(system.begin(), system.end(), [](const UniPoly& u) { return u.is_zero(); });
        if (all_zero) continue;
        auto roots = uni_gcd_roots(system, rng);
        UniPoly top(&F, P.count({t, 0}) ? P[{t, 0}] : std::vector<Scalar>{});
        std::vector<Scalar> X;
        for (auto& beta : roots) {
            Scalar dl = top.eval(beta);
            if (dl.is_zero() || !F.is_base(dl)) continue;
            if (std::find(X.begin(), X.end(), dl) == X.end()) X.push_back(dl);
        }
        return X;
    }
    return {};
}

}  // namespace detail

inline ReconResult corner_case_reconstruct(const PolyOracle& o, int d, const Analysis& A, Rng& rng,
                                           const ReconstructionConfig& cfg) {
    cfg.validate();
    auto t0 = std::chrono::steady_clock::now();
    uint64_t q0 = o.queries();
    const Field& F = *o.F;
    ReconResult res;
    res.path = "corner";
    int t = A.split.t;
    const PolyOracle& nonlin = A.split.nonlin;
    std::vector<LinearForm> lin = detail::expand(A.split.lin);
    if (t >= 1) {
        for (auto& l1 : A.L.forms) {
            std::vector<Scalar> X;
            try {
                X = detail::corner_scalars(nonlin, t, l1, rng, cfg);
            } catch (const ResampleExhausted&) {
                continue;
            }
            for (auto& dl : X) {
                PolyOracle resid = difference(nonlin, detail::power_oracle(nonlin, l1, t, dl));
                std::optional<detail::FullSplit> fs;
                try {
                    fs = detail::full_split(resid, t, rng, cfg.lin);
                } catch (const ResampleExhausted&) {
                    continue;
                }
                if (!fs) continue;
                std::vector<LinearForm> g1 = lin, g2 = lin;
                for (int i = 0; i < t; ++i) g1.push_back(l1);
                auto V = detail::expand(fs->factors);
                g2.insert(g2.end(), V.begin(), V.end());
                SpsCircuit c{o.F, o.n, d, {}};
                c.gates.push_back(detail::normalized_gate(F, F.mul(dl, A.split.scale), g1));
                c.gates.push_back(detail::normalized_gate(F, F.mul(fs->scale, A.split.scale), g2));
                if (detail::pit_ok(o, c, cfg, rng)) {
                    res.status = ReconStatus::success;
                    res.circuit = c;
                    res.pit_trials = cfg.pit_trials;
                    detail::finish(res, o, q0, t0);
                    return res;
                }
            }
        }
    }
    res.status = ReconStatus::not_applicable;
    res.message = "no candidate produced a pure-power gate";
    detail::finish(res, o, q0, t0);
    return res;
}

inline ReconResult corner_case_reconstruct(const PolyOracle& o, int d, Rng& rng, const ReconstructionConfig& cfg = {}) {
    return corner_case_reconstruct(o, d, analyze(o, d, rng, cfg), rng, cfg);
}

// ---------------- known independent factors of one gate ----------------

// U[i]: normalized factors (with repetition) of g restricted to x_i = 0, with a 0 in position i
struct GlueState {
    std::vector<std::vector<LinearForm>> U;
};

inline LinearForm zero_coord(LinearForm l, int j) {
    l[j] = 0;
    return l;
}

inline std::optional<std::vector<LinearForm>> merge_restricted_factorizations(const GlueState& gs, uint32_t q) {
    int r = int(gs.U.size());
    if (r < 2) throw std::invalid_argument("merge needs at least two restrictions");
    for (auto& u : gs.U)
        if (u.size() != gs.U[0].size()) return std::nullopt;
    std::vector<std::vector<LinearForm>> U = gs.U;
    for (auto& u : U) std::sort(u.begin(), u.end());
    std::vector<LinearForm> out;
    while (!U[0].empty()) {
        LinearForm l1 = U[0].front();
        int m = int(std::count(U[0].begin(), U[0].end(), l1));
        bool done = false;
        for (int i = 1; i < r && !done; ++i) {
            LinearForm a = zero_coord(l1, i);
            if (form_is_zero(a)) continue;
            LinearForm na = normalize(a, q);
            std::vector<size_t> hits;
            for (size_t k = 0; k < U[i].size(); ++k) {
                LinearForm b = zero_coord(U[i][k], 0);
                if (!form_is_zero(b) && normalize(b, q) == na) hits.push_back(k);
            }
            if (int(hits.size()) != m) continue;
            std::vector<LinearForm> glued;
            bool ok = true;
            for (size_t k : hits) {
                const LinearForm& u = U[i][k];
                int p = -1;
                for (int j = 0; j < int(l1.size()); ++j)
                    if (j != 0 && j != i && l1[j]) {
                        p = j;
                        break;
                    }
                if (p < 0 || !u[p]) {
                    ok = false;
                    break;
                }
                uint32_t c = uint32_t(uint64_t(l1[p]) * fq::inv_mod(u[p], q) % q);
                LinearForm l = form_scale(u, c, q);
                for (int j = 0; j < int(l.size()); ++j)
                    if (j != 0 && j != i && l[j] != l1[j]) ok = false;
                l[i] = l1[i];
                glued.push_back(normalize(l, q));
            }
            if (!ok) continue;
            for (auto it = hits.rbegin(); it != hits.rend(); ++it) U[i].erase(U[i].begin() + long(*it));
            U[0].erase(std::remove(U[0].begin(), U[0].end(), l1), U[0].end());
            out.insert(out.end(), glued.begin(), glued.end());
            done = true;
        }
        if (!done) return std::nullopt;
    }
    // every restriction must be reproduced
    for (int j = 0; j < r; ++j) {
        std::vector<LinearForm> rj;
        for (auto& l : out) {
            LinearForm z = zero_coord(l, j);
            if (form_is_zero(z)) return std::nullopt;
            rj.push_back(normalize(z, q));
        }
        std::sort(rj.begin(), rj.end());
        std::vector<LinearForm> uj = gs.U[j];
        std::sort(uj.begin(), uj.end());
        if (rj != uj) return std::nullopt;
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline ReconResult reconstruct_with_known_gate_factors(const PolyOracle& o, int d, const std::vector<LinearForm>& ys,
                                                       Rng& rng, const ReconstructionConfig& cfg) {
    cfg.validate();
    auto t0 = std::chrono::steady_clock::now();
    uint64_t q0 = o.queries();
    const Field& F = *o.F;
    uint32_t q = F.q;
    int n = o.n;
    int r = int(ys.size());
    ReconResult res;
    res.path = "known-factors";
    auto bail = [&](ReconStatus st, const std::string& msg) {
        res.status = st;
        res.message = msg;
        detail::finish(res, o, q0, t0);
        return res;
    };
    if (r < 2) return bail(ReconStatus::not_applicable, "need at least two forms");
    if (span_rank(ys, q) != r) return bail(ReconStatus::not_applicable, "forms are dependent");
    IsoMap phi = make_isomorphism(ys, n, q);
    PolyOracle po = compose_iso(o, phi);
    LinConfig lc = cfg.lin;
    lc.self_check = false;
    try {
        FactorList lin = extract_linear_factors(po, rng, lc);
        FactorList strip;
        std::vector<int> e(r, 0);
        for (auto& [l, m] : lin)
            for (int i = 0; i < r; ++i)
                if (l == unit_form(n, i)) {
                    e[i] = m;
                    strip.push_back({l, m});
                }
        int deg = d - total_multiplicity(strip);
        PolyOracle g = resolve_indeterminate(divide_by_linear_factors(po, strip, F.one()));
        GlueState gs;
        Scalar scale1 = F.zero();
        for (int i = 0; i < r; ++i) {
            PolyOracle gi = restrict_vars(g, {{i, F.zero()}});
            auto fs = detail::full_split(gi, deg, rng, lc);
            if (!fs) return bail(ReconStatus::not_applicable, "a restriction does not split");
            std::vector<LinearForm> lifted;
            for (auto& l : detail::expand(fs->factors)) {
                LinearForm full(n, 0);
                for (int j = 0, k = 0; j < n; ++j)
                    if (j != i) full[j] = l[k++];
                lifted.push_back(full);
            }
            gs.U.push_back(lifted);
            if (i == 0) scale1 = fs->scale;
        }
        auto U = merge_restricted_factorizations(gs, q);
        if (!U) return bail(ReconStatus::failed, "merge failed");
        Scalar lead_prod = F.one();
        for (auto& l : *U) {
            uint32_t lead = 0;
            normalize(zero_coord(l, 0), q, &lead);
            lead_prod = F.scale(lead_prod, lead);
        }
        Scalar alpha = F.div(scale1, lead_prod);
        std::vector<LinearForm> Uv = *U;
        PolyOracle prodU = derive(g, n, deg, "alphaU", [Uv, alpha, &F](const Point& x) {
            Scalar acc = alpha;
            for (auto& l : Uv) acc = F.mul(acc, eval_form(F, l, x));
            return acc;
        });
        PolyOracle h = difference(g, prodU);
        auto fv = detail::full_split(h, deg, rng, lc);
        if (!fv) return bail(ReconStatus::failed, "residual does not split");
        std::vector<LinearForm> pw;
        for (int i = 0; i < r; ++i)
            for (int k = 0; k < e[i]; ++k) pw.push_back(ys[i]);
        std::vector<LinearForm> g1 = pw, g2 = pw;
        for (auto& l : Uv) g1.push_back(phi.unapply(l, q));
        for (auto& l : detail::expand(fv->factors)) g2.push_back(phi.unapply(l, q));
        if (int(g1.size()) != d || int(g2.size()) != d) return bail(ReconStatus::failed, "gate degree mismatch");
        SpsCircuit c{o.F, n, d, {}};
        c.gates.push_back(detail::normalized_gate(F, alpha, g1));
        c.gates.push_back(detail::normalized_gate(F, fv->scale, g2));
        if (!detail::pit_ok(o, c, cfg, rng)) return bail(ReconStatus::failed, "identity test failed");
        res.circuit = c;
        res.pit_trials = cfg.pit_trials;
        return bail(ReconStatus::success, "r=" + std::to_string(r));
    } catch (const ResampleExhausted& ex) {
        return bail(ReconStatus::failed, ex.what());
    } catch (const DomainError& ex) {
        return bail(ReconStatus::failed, ex.what());
    }
}

// ---------------- high rank ----------------

inline ReconResult high_rank_reconstruct(const PolyOracle& o, int d, const Analysis& A, Rng& rng,
                                         const ReconstructionConfig& cfg) {
    cfg.validate();
    auto t0 = std::chrono::steady_clock::now();
    uint64_t q0 = o.queries();
    uint32_t q = o.F->q;
    ReconResult corner = corner_case_reconstruct(o, d, A, rng, cfg);
    if (corner.status == ReconStatus::success) {
        detail::finish(corner, o, q0, t0);
        return corner;
    }
    ReconResult res;
    res.path = "high";
    int tau_r = cfg.effective_tau_r(d);
    bool any_x = false;
    for (auto& l : A.L.forms) {
        std::vector<LinearForm> partners = ordinary_partners(l, A.L.forms, q);
        std::vector<LinearForm> X;
        for (auto& p : partners) {
            X.push_back(p);
            if (span_rank(X, q) != int(X.size())) X.pop_back();
        }
        if (int(X.size()) < cfg.tau_x) continue;
        any_x = true;
        for (size_t start = 0; start < X.size(); start += cfg.tau_b) {
            std::vector<LinearForm> Us, Vs;
            for (size_t k = start; k < std::min(X.size(), start + size_t(cfg.tau_b)); ++k) {
                if (vanishes_on(A.split.nonlin, l, X[k], cfg.vanish.verify_trials, rng))
                    Us.push_back(X[k]);
                else
                    Vs.push_back(X[k]);
            }
            std::vector<LinearForm>& side = Us.size() >= Vs.size() ? Us : Vs;
            int r = std::min<int>(tau_r, int(side.size()));
            if (r < 2) continue;
            std::vector<LinearForm> ys(side.begin(), side.begin() + r);
            ReconResult kr = reconstruct_with_known_gate_factors(o, d, ys, rng, cfg);
            if (kr.status == ReconStatus::success) {
                kr.path = "high";
                detail::finish(kr, o, q0, t0);
                return kr;
            }
        }
    }
    res.status = ReconStatus::failed;
    res.message = any_x ? "no part produced a verified circuit" : "no candidate reached the ordinary-line threshold";
    detail::finish(res, o, q0, t0);
    return res;
}

inline ReconResult high_rank_reconstruct(const PolyOracle& o, int d, Rng& rng, const ReconstructionConfig& cfg = {}) {
    return high_rank_reconstruct(o, d, analyze(o, d, rng, cfg), rng, cfg);
}

enum class Algo { automatic, low, high, corner };

inline Algo parse_algo(const std::string& s) {
    if (s == "auto") return Algo::automatic;
    if (s == "low") return Algo::low;
    if (s == "high") return Algo::high;
    if (s == "corner") return Algo::corner;
    throw std::invalid_argument("unknown algorithm: " + s);
}

// high rank (corner first), then low rank
inline ReconResult reconstruct(const PolyOracle& o, int d, Algo algo, Rng& rng, const ReconstructionConfig& cfg = {}) {
    cfg.validate();
    auto t0 = std::chrono::steady_clock::now();
    uint64_t q0 = o.queries();
    Analysis A = analyze(o, d, rng, cfg);
    ReconResult r;
    switch (algo) {
        case Algo::low: r = low_rank_reconstruct(o, d, A, rng, cfg); break;
        case Algo::corner: r = corner_case_reconstruct(o, d, A, rng, cfg); break;
        case Algo::high: r = high_rank_reconstruct(o, d, A, rng, cfg); break;
        case Algo::automatic:
            r = high_rank_reconstruct(o, d, A, rng, cfg);
            if (r.status != ReconStatus::success) {
                ReconResult lr = low_rank_reconstruct(o, d, A, rng, cfg);
                if (lr.status == ReconStatus::success || A.split.t == 0) r = lr;
            }
            break;
    }
    detail::finish(r, o, q0, t0);
    return r;
}

}  // namespace sps
