#pragma once
// Ordinary lines in projective point sets over F_q.

#include <cmath>

#include "sps/vanish.hpp"

namespace sps {

using ProperSet = std::vector<LinearForm>;

// normalizes, drops zeros and duplicates; keeps first-seen order
inline ProperSet make_proper_set(const std::vector<LinearForm>& pts, uint32_t q) {
    ProperSet out;
    std::set<LinearForm> seen;
    for (auto& p : pts) {
        if (form_is_zero(p)) continue;
        LinearForm n = normalize(p, q);
        if (seen.insert(n).second) out.push_back(n);
    }
    return out;
}

using OrdinaryLineSet = std::set<CodimTwoSpace>;

// members s of S with sp{t,s} ordinary, in S order
inline std::vector<LinearForm> ordinary_partners(const LinearForm& t, const ProperSet& S, uint32_t q) {
    if (form_is_zero(t)) throw std::invalid_argument("zero anchor");
    std::vector<LinearForm> out;
    for (size_t i = 0; i < S.size(); ++i) {
        if (span_rank({t, S[i]}, q) < 2) continue;
        bool ordinary = true;
        for (size_t j = 0; j < S.size() && ordinary; ++j) {
            if (j == i || span_rank({t, S[j]}, q) < 2) continue;
            if (span_rank({t, S[i], S[j]}, q) == 2) ordinary = false;
        }
        if (ordinary) out.push_back(S[i]);
    }
    return out;
}

inline OrdinaryLineSet ordinary_lines(const LinearForm& t, const ProperSet& S, uint32_t q) {
    OrdinaryLineSet out;
    for (auto& s : ordinary_partners(t, S, q)) out.insert(canonical_space(t, s, q));
    return out;
}

// dimension of the sum of the lines
inline int lines_span_dim(const OrdinaryLineSet& lines, uint32_t q) {
    std::vector<LinearForm> rows;
    for (auto& w : lines) {
        rows.push_back(w.a);
        rows.push_back(w.b);
    }
    return span_rank(rows, q);
}

struct Prop2Witness {
    LinearForm t;
    int dim = 0;
};

inline Prop2Witness prop2_witness(const ProperSet& S, const ProperSet& T, uint32_t q) {
    if (S.empty()) throw std::invalid_argument("S is empty");
    if (double(T.size()) < std::log2(double(S.size())) + 2) throw std::invalid_argument("T too small");
    if (span_rank(T, q) != int(T.size())) throw std::invalid_argument("T must be independent");
    Prop2Witness best{T[0], -1};
    for (auto& t : T) {
        int dim = lines_span_dim(ordinary_lines(t, S, q), q);
        if (dim > best.dim) best = {t, dim};
    }
    return best;
}

inline bool ordinary_free_bound_check(const ProperSet& S, const ProperSet& T, uint32_t q) {
    if (S.empty()) throw std::invalid_argument("S is empty");
    if (double(T.size()) <= std::log2(double(S.size())) + 1) return true;
    for (auto& t : T)
        if (!ordinary_partners(t, S, q).empty()) return true;
    return false;
}

}  // namespace sps
