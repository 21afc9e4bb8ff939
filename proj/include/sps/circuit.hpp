#pragma once
// Explicit depth-3 circuits with top fan-in k, the G/T1/T2 split, and a seeded generator.

#include "sps/oracle.hpp"

namespace sps {

struct Gate {
    Scalar coeff;
    std::vector<LinearForm> factors;
};

struct SpsCircuit {
    FieldPtr F;
    int n = 0;
    int d = 0;
    std::vector<Gate> gates;

    int fan_in() const { return int(gates.size()); }
};

inline void validate(const SpsCircuit& c) {
    if (c.gates.empty()) throw std::invalid_argument("circuit has no gates");
    for (auto& g : c.gates) {
        if (int(g.factors.size()) != c.d) throw std::invalid_argument("gate is not homogeneous of degree d");
        for (auto& l : g.factors) {
            if (int(l.size()) != c.n) throw std::invalid_argument("factor arity mismatch");
            if (form_is_zero(l)) throw std::invalid_argument("zero linear factor");
        }
    }
}

inline Scalar eval_circuit(const SpsCircuit& c, const Point& x) {
    const Field& F = *c.F;
    Scalar acc = F.zero();
    for (auto& g : c.gates) {
        Scalar t = g.coeff;
        for (auto& l : g.factors) {
            if (t.is_zero()) break;
            t = F.mul(t, eval_form(F, l, x));
        }
        acc = F.add(acc, t);
    }
    return acc;
}

inline PolyOracle circuit_oracle(const SpsCircuit& c) {
    auto cc = std::make_shared<SpsCircuit>(c);
    return make_oracle(c.F, c.n, c.d, [cc](const Point& x) { return eval_circuit(*cc, x); }, "circuit");
}

inline DensePoly expand(const SpsCircuit& c) {
    DensePoly acc(c.F, c.n);
    for (auto& g : c.gates) {
        DensePoly t = DensePoly::constant(c.F, c.n, g.coeff);
        for (auto& l : g.factors) t = t * DensePoly::from_form(c.F, l);
        acc = acc + t;
    }
    return acc;
}

// Normalized multisets, sorted.
struct GateDecomposition {
    std::vector<LinearForm> G, T1, T2;
    Scalar c1, c2;
    int rank = 0;
    bool degenerate = false;
};

inline std::vector<LinearForm> sorted_normalized(const std::vector<LinearForm>& fs, uint32_t q) {
    std::vector<LinearForm> out;
    for (auto& l : fs) out.push_back(normalize(l, q));
    std::sort(out.begin(), out.end());
    return out;
}

inline GateDecomposition decompose(const SpsCircuit& c) {
    if (c.gates.size() != 2) throw std::invalid_argument("decompose needs exactly two gates");
    const Field& F = *c.F;
    uint32_t q = F.q;
    GateDecomposition out;
    Scalar coeff[2];
    std::vector<LinearForm> norm[2];
    for (int g = 0; g < 2; ++g) {
        coeff[g] = c.gates[g].coeff;
        for (auto& l : c.gates[g].factors) {
            uint32_t lead = 0;
            norm[g].push_back(normalize(l, q, &lead));
            coeff[g] = F.scale(coeff[g], lead);
        }
        std::sort(norm[g].begin(), norm[g].end());
    }
    std::set_intersection(norm[0].begin(), norm[0].end(), norm[1].begin(), norm[1].end(), std::back_inserter(out.G));
    std::set_difference(norm[0].begin(), norm[0].end(), out.G.begin(), out.G.end(), std::back_inserter(out.T1));
    std::set_difference(norm[1].begin(), norm[1].end(), out.G.begin(), out.G.end(), std::back_inserter(out.T2));
    out.c1 = coeff[0];
    out.c2 = coeff[1];
    std::vector<LinearForm> all = out.T1;
    all.insert(all.end(), out.T2.begin(), out.T2.end());
    out.rank = span_rank(all, q);
    out.degenerate = out.T1.empty();
    return out;
}

inline bool structural_match(const GateDecomposition& a, const GateDecomposition& b) {
    auto join = [](const std::vector<LinearForm>& g, const std::vector<LinearForm>& t) {
        std::vector<LinearForm> r = g;
        r.insert(r.end(), t.begin(), t.end());
        std::sort(r.begin(), r.end());
        return r;
    };
    auto a1 = join(a.G, a.T1), a2 = join(a.G, a.T2), b1 = join(b.G, b.T1), b2 = join(b.G, b.T2);
    return (a1 == b1 && a2 == b2) || (a1 == b2 && a2 == b1);
}

inline bool equivalent_pit(const PolyOracle& a, const PolyOracle& b, int trials, Rng& rng) {
    if (a.n != b.n) throw std::invalid_argument("oracle arity mismatch");
    return zero_test(difference(a, b), trials, rng);
}

enum class InstanceMode { general, corner, low_rank };

inline std::string to_string(InstanceMode m) {
    switch (m) {
        case InstanceMode::general: return "general";
        case InstanceMode::corner: return "corner";
        case InstanceMode::low_rank: return "low_rank";
    }
    return "?";
}

inline InstanceMode parse_mode(const std::string& s) {
    if (s == "general") return InstanceMode::general;
    if (s == "corner") return InstanceMode::corner;
    if (s == "low_rank" || s == "low") return InstanceMode::low_rank;
    throw std::invalid_argument("unknown mode: " + s);
}

struct Instance {
    SpsCircuit circuit;
    PolyOracle oracle;
    GateDecomposition truth;
};

// degree of the T gates for a mode; G fills the rest
inline int t_gate_degree(int d, int rank, InstanceMode mode) {
    if (mode == InstanceMode::low_rank) return std::min(d, std::max((rank + 1) / 2, 2));
    return d;
}

inline LinearForm random_nonzero_form(const Field& F, int n, Rng& rng) {
    for (;;) {
        LinearForm l(n);
        for (auto& v : l) v = F.random_base(rng);
        if (!form_is_zero(l)) return normalize(l, F.q);
    }
}

inline Instance random_instance(int n, int d, FieldPtr F, int rank, InstanceMode mode, Rng& rng) {
    uint32_t q = F->q;
    if (n < 1 || n > kMaxVars) throw std::invalid_argument("n out of range");
    if (d < 1) throw std::invalid_argument("d must be positive");
    if (rank < 2 || rank > std::min(n, 2 * d)) throw std::invalid_argument("rank must lie in [2, min(n, 2d)]");
    int m = t_gate_degree(d, rank, mode);
    int forms_needed = mode == InstanceMode::corner ? m + 1 : 2 * m;
    if (rank > forms_needed) throw std::invalid_argument("rank not achievable for this mode and degree");
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::vector<LinearForm> basis;
        while (int(basis.size()) < rank) {
            basis.push_back(random_nonzero_form(*F, n, rng));
            if (span_rank(basis, q) != int(basis.size())) basis.pop_back();
        }
        std::vector<LinearForm> forms = basis;
        while (int(forms.size()) < forms_needed) {
            LinearForm l(n, 0);
            for (auto& b : basis) l = form_add(l, form_scale(b, F->random_base(rng), q), q);
            if (form_is_zero(l)) continue;
            forms.push_back(normalize(l, q));
        }
        std::shuffle(forms.begin(), forms.end(), rng);
        std::vector<LinearForm> T1, T2;
        if (mode == InstanceMode::corner) {
            T1.assign(m, forms[0]);
            T2.assign(forms.begin() + 1, forms.end());
        } else {
            T1.assign(forms.begin(), forms.begin() + m);
            T2.assign(forms.begin() + m, forms.end());
        }
        bool clash = false;
        for (auto& a : T1)
            for (auto& b : T2)
                if (proportional(a, b, q)) clash = true;
        if (clash) continue;
        std::vector<LinearForm> G;
        for (int i = 0; i < d - m; ++i) G.push_back(random_nonzero_form(*F, n, rng));
        SpsCircuit c{F, n, d, {}};
        Gate g1{F->from_base(F->random_base_nonzero(rng)), G};
        Gate g2{F->from_base(F->random_base_nonzero(rng)), G};
        g1.factors.insert(g1.factors.end(), T1.begin(), T1.end());
        g2.factors.insert(g2.factors.end(), T2.begin(), T2.end());
        std::sort(g1.factors.begin(), g1.factors.end());
        std::sort(g2.factors.begin(), g2.factors.end());
        c.gates = {g1, g2};
        GateDecomposition truth = decompose(c);
        if (truth.rank != rank || truth.degenerate) continue;
        return Instance{c, circuit_oracle(c), truth};
    }
    throw std::runtime_error("generator could not reach the requested rank");
}

}  // namespace sps
