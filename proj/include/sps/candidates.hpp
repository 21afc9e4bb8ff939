#pragma once
// Candidate linear forms built from pairs of vanishing codim-2 subspaces.

#include "sps/vanish.hpp"

namespace sps {

struct CandidateSet {
    std::vector<LinearForm> forms;  // sorted, normalized
    std::map<LinearForm, std::pair<CodimTwoSpace, CodimTwoSpace>> provenance;

    bool contains(const LinearForm& l, uint32_t q) const {
        return std::binary_search(forms.begin(), forms.end(), normalize(l, q));
    }
    friend bool operator==(const CandidateSet& a, const CandidateSet& b) { return a.forms == b.forms; }
};

// nonlin restricted to V(l) is nonzero and a product of exactly t linear forms
inline bool restriction_splits(const PolyOracle& nonlin, const LinearForm& l, int t, Rng& rng,
                               const LinConfig& lc = {}) {
    auto hr = restrict_to_hyperplane(resolve_indeterminate(nonlin), l);
    if (hr.oracle.n == 0) return t == 0;
    if (zero_test(hr.oracle, 2, rng)) return false;
    LinConfig inner = lc;
    inner.self_check = false;
    FactorList fl = extract_linear_factors(hr.oracle, rng, inner);
    return total_multiplicity(fl) == t;
}

inline CandidateSet compute_candidate_forms(const PolyOracle& nonlin, int t, const VanishSet& S, Rng& rng) {
    uint32_t q = nonlin.F->q;
    CandidateSet out;
    std::vector<CodimTwoSpace> sp(S.begin(), S.end());
    std::map<LinearForm, std::pair<CodimTwoSpace, CodimTwoSpace>> cand;
    for (size_t i = 0; i < sp.size(); ++i)
        for (size_t j = i + 1; j < sp.size(); ++j) {
            auto r = intersect_two_planes(sp[i].a, sp[i].b, sp[j].a, sp[j].b, q);
            if (r.relation != PlaneRelation::one_dimensional) continue;
            cand.emplace(*r.form, std::make_pair(sp[i], sp[j]));
        }
    for (auto& [l, prov] : cand) {
        if (!restriction_splits(nonlin, l, t, rng)) continue;
        out.forms.push_back(l);
        out.provenance.emplace(l, prov);
    }
    return out;
}

}  // namespace sps
