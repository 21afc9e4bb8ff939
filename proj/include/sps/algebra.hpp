#pragma once
// Prime field / extension field arithmetic and exact linear algebra over F_q.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace sps {

using Rng = std::mt19937_64;

inline constexpr int kMaxExt = 24;

class Field;

// Element of F_{q^k} as a coefficient list; base elements only use c[0].
struct Scalar {
    const Field* f = nullptr;
    std::array<uint16_t, kMaxExt> c{};

    bool is_zero() const {
        for (auto v : c)
            if (v) return false;
        return true;
    }
    friend bool operator==(const Scalar& a, const Scalar& b) { return a.c == b.c; }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a.c == b.c); }
    friend bool operator<(const Scalar& a, const Scalar& b) { return a.c < b.c; }
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// ---------- dense polynomials over F_q (plain coefficient vectors, low to high) ----------
namespace fq {

using Poly = std::vector<uint32_t>;

inline void trim(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline uint32_t inv_mod(uint32_t a, uint32_t q) {
    if (a % q == 0) throw DomainError("inverse of zero");
    int64_t t = 0, nt = 1, r = q, nr = a % q;
    while (nr) {
        int64_t quo = r / nr;
        t -= quo * nt;
        std::swap(t, nt);
        r -= quo * nr;
        std::swap(r, nr);
    }
    if (t < 0) t += q;
    return static_cast<uint32_t>(t);
}

inline Poly sub(Poly a, const Poly& b, uint32_t q) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + q - b[i]) % q;
    trim(a);
    return a;
}

inline Poly mul(const Poly& a, const Poly& b, uint32_t q) {
    if (a.empty() || b.empty()) return {};
    std::vector<uint64_t> t(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (size_t j = 0; j < b.size(); ++j) t[i + j] = (t[i + j] + uint64_t(a[i]) * b[j]) % q;
    }
    Poly r(t.begin(), t.end());
    trim(r);
    return r;
}

// remainder of a modulo m (m nonzero)
inline Poly mod(Poly a, const Poly& m, uint32_t q) {
    trim(a);
    Poly mm = m;
    trim(mm);
    if (mm.empty()) throw DomainError("polynomial modulo zero");
    uint32_t linv = inv_mod(mm.back(), q);
    size_t dm = mm.size() - 1;
    while (a.size() >= mm.size()) {
        uint32_t coef = uint32_t(uint64_t(a.back()) * linv % q);
        size_t shift = a.size() - 1 - dm;
        for (size_t j = 0; j <= dm; ++j)
            a[shift + j] = uint32_t((a[shift + j] + uint64_t(q - coef) * mm[j]) % q);
        trim(a);
    }
    return a;
}

inline Poly gcd(Poly a, Poly b, uint32_t q) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = mod(a, b, q);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        uint32_t li = inv_mod(a.back(), q);
        for (auto& v : a) v = uint32_t(uint64_t(v) * li % q);
    }
    return a;
}

inline Poly powmod(Poly base, uint64_t e, const Poly& m, uint32_t q) {
    Poly r{1};
    base = mod(base, m, q);
    while (e) {
        if (e & 1) r = mod(mul(r, base, q), m, q);
        e >>= 1;
        if (e) base = mod(mul(base, base, q), m, q);
    }
    return r;
}

// Distinct-degree irreducibility test for a monic m of degree k.
inline bool is_irreducible(const Poly& m, uint32_t q) {
    int k = int(m.size()) - 1;
    if (k < 1) return false;
    if (k == 1) return true;
    Poly x{0, 1};
    Poly h = x;
    for (int i = 1; i <= k; ++i) {
        h = powmod(h, q, m, q);
        if (i < k) {
            Poly g = gcd(sub(h, x, q), m, q);
            if (g.size() != 1) return false;
        }
    }
    return mod(sub(h, x, q), m, q).empty();
}

}  // namespace fq

class Field {
public:
    Field(uint32_t q_, std::vector<uint32_t> modulus) : q(q_), mod(std::move(modulus)) {
        if (q < 2 || q > 65521) throw std::invalid_argument("q out of range");
        k = int(mod.size()) - 1;
        if (k < 1 || k > kMaxExt) throw std::invalid_argument("extension degree out of range");
        if (mod.back() != 1) throw std::invalid_argument("modulus must be monic");
        inv_.assign(q, 0);
        for (uint32_t a = 1; a < q; ++a) inv_[a] = fq::inv_mod(a, q);
        size_ = 1;
        for (int i = 0; i < k; ++i) {
            if (size_ > (uint64_t(1) << 62) / q) throw std::invalid_argument("field too large");
            size_ *= q;
        }
    }

    uint32_t q;
    int k;
    std::vector<uint32_t> mod;

    uint64_t size() const { return size_; }

    Scalar zero() const {
        Scalar s;
        s.f = this;
        return s;
    }
    Scalar one() const { return from_base(1); }
    Scalar from_base(int64_t v) const {
        Scalar s = zero();
        int64_t r = v % int64_t(q);
        if (r < 0) r += q;
        s.c[0] = uint16_t(r);
        return s;
    }
    Scalar from_coeffs(const std::vector<uint32_t>& v) const {
        if (int(v.size()) > k) throw std::invalid_argument("too many coefficients");
        Scalar s = zero();
        for (size_t i = 0; i < v.size(); ++i) s.c[i] = uint16_t(v[i] % q);
        return s;
    }
    std::vector<uint32_t> coeffs(const Scalar& a) const {
        std::vector<uint32_t> v(a.c.begin(), a.c.begin() + k);
        fq::trim(v);
        return v;
    }
    bool is_base(const Scalar& a) const {
        for (int i = 1; i < kMaxExt; ++i)
            if (a.c[i]) return false;
        return true;
    }
    uint32_t base_value(const Scalar& a) const {
        if (!is_base(a)) throw DomainError("scalar not in base field");
        return a.c[0];
    }

    uint32_t badd(uint32_t a, uint32_t b) const { return (a + b) % q; }
    uint32_t bsub(uint32_t a, uint32_t b) const { return (a + q - b) % q; }
    uint32_t bmul(uint32_t a, uint32_t b) const { return uint32_t(uint64_t(a) * b % q); }
    uint32_t bneg(uint32_t a) const { return a ? q - a : 0; }
    uint32_t binv(uint32_t a) const {
        if (a % q == 0) throw DomainError("inverse of zero");
        return inv_[a % q];
    }

    Scalar add(const Scalar& a, const Scalar& b) const {
        Scalar r = zero();
        for (int i = 0; i < k; ++i) r.c[i] = uint16_t((a.c[i] + b.c[i]) % q);
        return r;
    }
    Scalar sub(const Scalar& a, const Scalar& b) const {
        Scalar r = zero();
        for (int i = 0; i < k; ++i) r.c[i] = uint16_t((a.c[i] + q - b.c[i]) % q);
        return r;
    }
    Scalar neg(const Scalar& a) const {
        Scalar r = zero();
        for (int i = 0; i < k; ++i) r.c[i] = uint16_t(a.c[i] ? q - a.c[i] : 0);
        return r;
    }
    Scalar scale(const Scalar& a, uint32_t s) const {
        Scalar r = zero();
        if (s % q == 0) return r;
        for (int i = 0; i < k; ++i) r.c[i] = uint16_t(uint64_t(a.c[i]) * s % q);
        return r;
    }
    Scalar mul(const Scalar& a, const Scalar& b) const {
        if (k == 1) {
            Scalar r = zero();
            r.c[0] = uint16_t(uint64_t(a.c[0]) * b.c[0] % q);
            return r;
        }
        if (is_base(a)) return scale(b, a.c[0]);
        if (is_base(b)) return scale(a, b.c[0]);
        uint64_t t[2 * kMaxExt] = {0};
        for (int i = 0; i < k; ++i) {
            if (!a.c[i]) continue;
            for (int j = 0; j < k; ++j) t[i + j] += uint64_t(a.c[i]) * b.c[j];
        }
        for (int i = 2 * k - 2; i >= k; --i) {
            uint64_t v = t[i] % q;
            if (!v) continue;
            uint64_t nv = q - v;
            for (int j = 0; j < k; ++j)
                if (mod[j]) t[i - k + j] += nv * mod[j];
        }
        Scalar r = zero();
        for (int i = 0; i < k; ++i) r.c[i] = uint16_t(t[i] % q);
        return r;
    }
    // extended Euclid on the modulus
    Scalar inv(const Scalar& a) const {
        if (a.is_zero()) throw DomainError("inverse of zero");
        if (is_base(a)) return from_base(binv(a.c[0]));
        fq::Poly r0 = mod, r1 = coeffs(a);
        fq::Poly s0{}, s1{1};
        while (r1.size() > 1) {
            // r0 = quo*r1 + rem
            fq::Poly quo, rem = r0;
            uint32_t li = binv(r1.back());
            size_t d1 = r1.size() - 1;
            if (rem.size() >= r1.size()) quo.assign(rem.size() - d1, 0);
            while (rem.size() >= r1.size()) {
                uint32_t coef = bmul(rem.back(), li);
                size_t sh = rem.size() - 1 - d1;
                quo[sh] = coef;
                for (size_t j = 0; j <= d1; ++j) rem[sh + j] = bsub(rem[sh + j], bmul(coef, r1[j]));
                fq::trim(rem);
            }
            fq::Poly ns = fq::sub(s0, fq::mul(quo, s1, q), q);
            r0 = std::move(r1);
            r1 = std::move(rem);
            s0 = std::move(s1);
            s1 = std::move(ns);
        }
        if (r1.empty()) throw DomainError("modulus not irreducible");
        uint32_t c = binv(r1[0]);
        Scalar res = zero();
        for (size_t i = 0; i < s1.size() && int(i) < k; ++i) res.c[i] = uint16_t(bmul(s1[i], c));
        return res;
    }
    Scalar div(const Scalar& a, const Scalar& b) const { return mul(a, inv(b)); }
    Scalar pow(Scalar a, uint64_t e) const {
        Scalar r = one();
        while (e) {
            if (e & 1) r = mul(r, a);
            e >>= 1;
            if (e) a = mul(a, a);
        }
        return r;
    }

    Scalar random(Rng& rng) const {
        Scalar s = zero();
        std::uniform_int_distribution<uint32_t> dist(0, q - 1);
        for (int i = 0; i < k; ++i) s.c[i] = uint16_t(dist(rng));
        return s;
    }
    Scalar random_nonzero(Rng& rng) const {
        for (;;) {
            Scalar s = random(rng);
            if (!s.is_zero()) return s;
        }
    }
    uint32_t random_base(Rng& rng) const { return std::uniform_int_distribution<uint32_t>(0, q - 1)(rng); }
    uint32_t random_base_nonzero(Rng& rng) const {
        return std::uniform_int_distribution<uint32_t>(1, q - 1)(rng);
    }

    std::string to_string(const Scalar& a) const {
        if (is_base(a)) return std::to_string(a.c[0]);
        std::string s = "[";
        for (int i = 0; i < k; ++i) s += (i ? "," : "") + std::to_string(a.c[i]);
        return s + "]";
    }

private:
    std::vector<uint32_t> inv_;
    uint64_t size_ = 0;
};

using FieldParams = Field;
using FieldPtr = std::shared_ptr<const Field>;

inline Scalar operator+(const Scalar& a, const Scalar& b) { return (a.f ? a.f : b.f)->add(a, b); }
inline Scalar operator-(const Scalar& a, const Scalar& b) { return (a.f ? a.f : b.f)->sub(a, b); }
inline Scalar operator-(const Scalar& a) { return a.f->neg(a); }
inline Scalar operator*(const Scalar& a, const Scalar& b) { return (a.f ? a.f : b.f)->mul(a, b); }
inline Scalar operator/(const Scalar& a, const Scalar& b) { return (a.f ? a.f : b.f)->div(a, b); }
inline Scalar& operator+=(Scalar& a, const Scalar& b) { return a = a + b; }
inline Scalar& operator-=(Scalar& a, const Scalar& b) { return a = a - b; }
inline Scalar& operator*=(Scalar& a, const Scalar& b) { return a = a * b; }

enum class ArithOp { add, sub, mul, div, pow, inv };

// field_arith: pow reads the exponent from b's base coefficient.
inline Scalar field_arith(const Field& F, const Scalar& a, const Scalar& b, ArithOp op) {
    switch (op) {
        case ArithOp::add: return F.add(a, b);
        case ArithOp::sub: return F.sub(a, b);
        case ArithOp::mul: return F.mul(a, b);
        case ArithOp::div: return F.div(a, b);
        case ArithOp::pow: return F.pow(a, b.c[0]);
        case ArithOp::inv: return F.inv(a);
    }
    return F.zero();
}

inline bool is_prime(uint32_t q) {
    if (q < 2) return false;
    for (uint32_t p = 2; p * p <= q; ++p)
        if (q % p == 0) return false;
    return true;
}

// Random monic irreducible of degree k; k = 1 gives the modulus x - 0.
inline FieldPtr build_extension(uint32_t q, int k, Rng& rng) {
    if (!is_prime(q)) throw std::invalid_argument("q must be prime");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (k == 1) return std::make_shared<Field>(q, std::vector<uint32_t>{0, 1});
    std::uniform_int_distribution<uint32_t> dist(0, q - 1);
    for (;;) {
        std::vector<uint32_t> m(k + 1);
        for (int i = 0; i < k; ++i) m[i] = dist(rng);
        m[k] = 1;
        if (m[0] == 0) continue;
        if (fq::is_irreducible(m, q)) return std::make_shared<Field>(q, m);
    }
}

// Deterministic variant keyed on (q,k), so files written by separate runs agree.
inline FieldPtr build_extension(uint32_t q, int k) {
    Rng rng(0x5eed0000ULL + 1000ULL * q + uint64_t(k));
    return build_extension(q, k, rng);
}

inline int ext_degree_for(uint32_t q, int bits) {
    int k = 1;
    long double v = q;
    while (v < std::ldexp(1.0L, bits)) {
        v *= q;
        ++k;
    }
    return k;
}

// ---------- linear forms and matrices over the base field ----------

using LinearForm = std::vector<uint32_t>;
using Mat = std::vector<std::vector<uint32_t>>;

inline bool form_is_zero(const LinearForm& f) {
    for (auto v : f)
        if (v) return false;
    return true;
}

inline int form_pivot(const LinearForm& f) {
    for (size_t i = 0; i < f.size(); ++i)
        if (f[i]) return int(i);
    return -1;
}

inline LinearForm unit_form(int n, int i) {
    LinearForm f(n, 0);
    f[i] = 1;
    return f;
}

// first nonzero coefficient becomes 1; *lead receives the removed factor
inline LinearForm normalize(const LinearForm& f, uint32_t q, uint32_t* lead = nullptr) {
    int p = form_pivot(f);
    if (p < 0) throw DomainError("zero linear form");
    uint32_t inv = fq::inv_mod(f[p], q);
    LinearForm r(f.size());
    for (size_t i = 0; i < f.size(); ++i) r[i] = uint32_t(uint64_t(f[i]) * inv % q);
    if (lead) *lead = f[p];
    return r;
}

inline bool proportional(const LinearForm& a, const LinearForm& b, uint32_t q) {
    if (form_is_zero(a) || form_is_zero(b)) return false;
    return normalize(a, q) == normalize(b, q);
}

inline LinearForm form_scale(const LinearForm& a, uint32_t s, uint32_t q) {
    LinearForm r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = uint32_t(uint64_t(a[i]) * s % q);
    return r;
}

inline LinearForm form_add(const LinearForm& a, const LinearForm& b, uint32_t q) {
    LinearForm r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = (a[i] + b[i]) % q;
    return r;
}

inline LinearForm form_sub(const LinearForm& a, const LinearForm& b, uint32_t q) {
    LinearForm r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = (a[i] + q - b[i]) % q;
    return r;
}

inline Scalar eval_form(const Field& F, const LinearForm& l, const std::vector<Scalar>& x) {
    Scalar acc = F.zero();
    if (F.k == 1) {
        uint64_t s = 0;
        for (size_t i = 0; i < l.size(); ++i) s += uint64_t(l[i]) * x[i].c[0];
        acc.c[0] = uint16_t(s % F.q);
        return acc;
    }
    uint64_t t[kMaxExt] = {0};
    for (size_t i = 0; i < l.size(); ++i) {
        if (!l[i]) continue;
        for (int j = 0; j < F.k; ++j) t[j] += uint64_t(l[i]) * x[i].c[j];
    }
    for (int j = 0; j < F.k; ++j) acc.c[j] = uint16_t(t[j] % F.q);
    return acc;
}

inline std::string form_to_string(const LinearForm& l) {
    std::string s = "(";
    for (size_t i = 0; i < l.size(); ++i) s += (i ? "," : "") + std::to_string(l[i]);
    return s + ")";
}

struct Rref {
    Mat rows;  // reduced rows, nonzero ones first
    std::vector<int> pivots;
    int rank = 0;
};

inline Rref rref(Mat m, uint32_t q) {
    Rref out;
    if (m.empty()) return out;
    size_t cols = m[0].size();
    size_t r = 0;
    for (size_t c = 0; c < cols && r < m.size(); ++c) {
        size_t piv = r;
        while (piv < m.size() && m[piv][c] == 0) ++piv;
        if (piv == m.size()) continue;
        std::swap(m[piv], m[r]);
        uint32_t inv = fq::inv_mod(m[r][c], q);
        for (auto& v : m[r]) v = uint32_t(uint64_t(v) * inv % q);
        for (size_t i = 0; i < m.size(); ++i) {
            if (i == r || m[i][c] == 0) continue;
            uint64_t f = m[i][c];
            for (size_t j = c; j < cols; ++j) m[i][j] = uint32_t((m[i][j] + (q - f) * m[r][j]) % q);
        }
        out.pivots.push_back(int(c));
        ++r;
    }
    out.rank = int(r);
    out.rows = std::move(m);
    return out;
}

inline int span_rank(const std::vector<LinearForm>& v, uint32_t q) {
    if (v.empty()) return 0;
    return rref(v, q).rank;
}

inline std::vector<LinearForm> span_basis(const std::vector<LinearForm>& v, uint32_t q) {
    if (v.empty()) return {};
    Rref r = rref(v, q);
    return std::vector<LinearForm>(r.rows.begin(), r.rows.begin() + r.rank);
}

inline bool in_span(const std::vector<LinearForm>& v, const LinearForm& x, uint32_t q) {
    if (form_is_zero(x)) return true;
    if (v.empty()) return false;
    std::vector<LinearForm> w = v;
    int r0 = span_rank(w, q);
    w.push_back(x);
    return span_rank(w, q) == r0;
}

// greedy in input order; returns indices
inline std::vector<int> maximal_independent_subset(const std::vector<LinearForm>& v, uint32_t q) {
    std::vector<int> idx;
    std::vector<LinearForm> cur;
    for (size_t i = 0; i < v.size(); ++i) {
        cur.push_back(v[i]);
        if (span_rank(cur, q) == int(cur.size()))
            idx.push_back(int(i));
        else
            cur.pop_back();
    }
    return idx;
}

// appends lexicographically first unit vectors that keep independence
inline std::vector<LinearForm> complete_to_basis(const std::vector<LinearForm>& v, int n, uint32_t q) {
    std::vector<LinearForm> cur = v;
    if (span_rank(cur, q) != int(cur.size())) throw std::invalid_argument("forms are dependent");
    for (int i = 0; i < n && int(cur.size()) < n; ++i) {
        cur.push_back(unit_form(n, i));
        if (span_rank(cur, q) != int(cur.size())) cur.pop_back();
    }
    return cur;
}

enum class SpanQuery { rank, basis, membership, maximal_independent_subset, complete_to_basis };

struct SpanAnswer {
    int rank = 0;
    bool member = false;
    std::vector<LinearForm> forms;
    std::vector<int> indices;
};

inline SpanAnswer span_tools(const std::vector<LinearForm>& v, SpanQuery query, uint32_t q, int n = 0,
                             const LinearForm& probe = {}) {
    SpanAnswer a;
    a.rank = span_rank(v, q);
    switch (query) {
        case SpanQuery::rank: break;
        case SpanQuery::basis: a.forms = span_basis(v, q); break;
        case SpanQuery::membership: a.member = in_span(v, probe, q); break;
        case SpanQuery::maximal_independent_subset: a.indices = maximal_independent_subset(v, q); break;
        case SpanQuery::complete_to_basis: a.forms = complete_to_basis(v, n, q); break;
    }
    return a;
}

// basis of {x : m x = 0}
inline std::vector<LinearForm> nullspace(const Mat& m, size_t cols, uint32_t q) {
    std::vector<LinearForm> out;
    if (m.empty()) {
        for (size_t i = 0; i < cols; ++i) out.push_back(unit_form(int(cols), int(i)));
        return out;
    }
    Rref r = rref(m, q);
    std::vector<int> is_piv(cols, -1);
    for (int i = 0; i < r.rank; ++i) is_piv[r.pivots[i]] = i;
    for (size_t f = 0; f < cols; ++f) {
        if (is_piv[f] >= 0) continue;
        LinearForm v(cols, 0);
        v[f] = 1;
        for (int i = 0; i < r.rank; ++i) v[r.pivots[i]] = r.rows[i][f] ? q - r.rows[i][f] : 0;
        out.push_back(v);
    }
    return out;
}

inline std::optional<Mat> mat_inverse(const Mat& m, uint32_t q) {
    size_t n = m.size();
    Mat aug(n, std::vector<uint32_t>(2 * n, 0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) aug[i][j] = m[i][j] % q;
        aug[i][n + i] = 1;
    }
    Rref r = rref(aug, q);
    if (r.rank < int(n) || r.pivots[n - 1] != int(n - 1)) return std::nullopt;
    Mat inv(n, std::vector<uint32_t>(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) inv[i][j] = r.rows[i][n + j];
    return inv;
}

inline Mat mat_mul(const Mat& a, const Mat& b, uint32_t q) {
    size_t n = a.size(), m = b[0].size(), kk = b.size();
    Mat c(n, std::vector<uint32_t>(m, 0));
    for (size_t i = 0; i < n; ++i)
        for (size_t l = 0; l < kk; ++l) {
            if (!a[i][l]) continue;
            for (size_t j = 0; j < m; ++j) c[i][j] = uint32_t((c[i][j] + uint64_t(a[i][l]) * b[l][j]) % q);
        }
    return c;
}

// row vector times matrix
inline LinearForm vec_mat(const LinearForm& v, const Mat& m, uint32_t q) {
    size_t cols = m.empty() ? 0 : m[0].size();
    std::vector<uint64_t> acc(cols, 0);
    for (size_t i = 0; i < v.size(); ++i) {
        if (!v[i]) continue;
        for (size_t j = 0; j < cols; ++j) acc[j] = (acc[j] + uint64_t(v[i]) * m[i][j]) % q;
    }
    return LinearForm(acc.begin(), acc.end());
}

// base matrix times a point over the extension
inline std::vector<Scalar> mat_apply(const Field& F, const Mat& m, const std::vector<Scalar>& x) {
    std::vector<Scalar> y(m.size());
    for (size_t i = 0; i < m.size(); ++i) y[i] = eval_form(F, m[i], x);
    return y;
}

inline Mat identity_mat(int n) {
    Mat m(n, std::vector<uint32_t>(n, 0));
    for (int i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

// ---------- plane intersection ----------

enum class PlaneRelation { one_dimensional, empty, equal };

struct PlaneIntersection {
    std::optional<LinearForm> form;
    PlaneRelation relation = PlaneRelation::empty;
};

inline PlaneIntersection intersect_two_planes(const LinearForm& p1, const LinearForm& q1, const LinearForm& p2,
                                              const LinearForm& q2, uint32_t q) {
    if (span_rank({p1, q1}, q) != 2 || span_rank({p2, q2}, q) != 2)
        throw std::invalid_argument("plane generators are dependent");
    size_t n = p1.size();
    Mat cols(n, std::vector<uint32_t>(4));
    for (size_t i = 0; i < n; ++i) {
        cols[i][0] = p1[i];
        cols[i][1] = q1[i];
        cols[i][2] = p2[i];
        cols[i][3] = q2[i];
    }
    auto ker = nullspace(cols, 4, q);
    PlaneIntersection out;
    if (ker.empty()) {
        out.relation = PlaneRelation::empty;
    } else if (ker.size() == 1) {
        const auto& a = ker[0];
        LinearForm l = form_add(form_scale(p1, a[0], q), form_scale(q1, a[1], q), q);
        out.form = normalize(l, q);
        out.relation = PlaneRelation::one_dimensional;
    } else {
        out.relation = PlaneRelation::equal;
    }
    return out;
}

// ---------- invertible variable changes ----------

// Rows of M are the forms sent to x_1..x_n; forms map by l -> l * Minv and
// a black box f becomes x -> f(Minv x).
struct IsoMap {
    Mat M, Minv;
    int n() const { return int(M.size()); }
    LinearForm apply(const LinearForm& l, uint32_t q) const { return vec_mat(l, Minv, q); }
    LinearForm unapply(const LinearForm& l, uint32_t q) const { return vec_mat(l, M, q); }
    std::vector<Scalar> preimage(const Field& F, const std::vector<Scalar>& x) const { return mat_apply(F, Minv, x); }
    IsoMap inverse() const { return IsoMap{Minv, M}; }
};

inline IsoMap make_isomorphism(const std::vector<LinearForm>& forms, int n, uint32_t q) {
    for (const auto& f : forms)
        if (int(f.size()) != n) throw std::invalid_argument("form length mismatch");
    auto rows = complete_to_basis(forms, n, q);
    auto inv = mat_inverse(rows, q);
    if (!inv) throw std::invalid_argument("forms are dependent");
    return IsoMap{rows, *inv};
}

inline IsoMap random_isomorphism(int n, const Field& F, Rng& rng) {
    for (;;) {
        Mat m(n, std::vector<uint32_t>(n));
        for (auto& r : m)
            for (auto& v : r) v = F.random_base(rng);
        auto inv = mat_inverse(m, F.q);
        if (inv) return IsoMap{m, *inv};
    }
}

inline IsoMap compose(const IsoMap& first, const IsoMap& second, uint32_t q) {
    // forms: l -> (l * first.Minv) * second.Minv
    return IsoMap{mat_mul(second.M, first.M, q), mat_mul(first.Minv, second.Minv, q)};
}

}  // namespace sps
