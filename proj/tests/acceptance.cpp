// One PASS/FAIL line per acceptance criterion.
#include <chrono>
#include <cstdio>
#include <numeric>

#include "bruteforce.hpp"

using namespace sps;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s: %s  %s\n", name.c_str(), ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

LinConfig quiet_lin() {
    LinConfig lc;
    lc.self_check = false;
    return lc;
}

DensePoly random_poly(FieldPtr F, int n, int deg, int terms, Rng& rng) {
    DensePoly p(F, n);
    for (int t = 0; t < terms; ++t) {
        Mono m{};
        int left = int(rng() % (deg + 1));
        while (left-- > 0) m[rng() % n]++;
        p.add_term(m, F->random(rng));
    }
    return p;
}

// criterion 1
void linear_factors() {
    auto t0 = Clock::now();
    Rng rng(101);
    int match = 0, loud = 0, wrong = 0, total = 200;
    for (int it = 0; it < total; ++it) {
        uint32_t q = std::array<uint32_t, 3>{5, 7, 11}[it % 3];
        auto F = build_extension(q, ext_degree_for(q, 20));
        int n = 3 + int(rng() % 3), d = 2 + int(rng() % 5);
        PolyOracle o;
        if (it % 4 == 3) {
            // plain product, repeated factors likely
            std::vector<LinearForm> fs;
            for (int i = 0; i < d; ++i) fs.push_back(i && rng() % 3 == 0 ? fs.back() : random_nonzero_form(*F, n, rng));
            o = oracle_from_product(F, n, fs, F->random_nonzero(rng));
        } else {
            int rank = 2 + int(rng() % (std::min(n, 2 * d) - 1));
            auto mode = rng() % 2 ? InstanceMode::general : InstanceMode::low_rank;
            try {
                o = random_instance(n, d, F, rank, mode, rng).oracle;
            } catch (const std::exception&) {
                o = random_instance(n, d, F, 2, InstanceMode::general, rng).oracle;
            }
        }
        auto expect = bf::scan_linear_factors(o, rng);
        try {
            auto got = extract_linear_factors(o, rng);
            if (got == expect)
                ++match;
            else
                ++wrong;
        } catch (const ResampleExhausted&) {
            ++loud;
        }
    }
    double s = since(t0);
    report("criterion 1", wrong == 0 && match >= 198 && s < 300,
           fmt("match %d/%d, loud failures %d, silent mismatches %d, %.1fs", match, total, loud, wrong, s));
}

// criterion 2
void vanishing_spaces() {
    auto t0 = Clock::now();
    Rng rng(202);
    int equal = 0, bound = 0, total = 30;
    for (int it = 0; it < total; ++it) {
        uint32_t q = it % 2 ? 7 : 5;
        int d = 3 + it % 3;
        auto F = build_extension(q, ext_degree_for(q, 20));
        auto mode = it % 3 == 0 ? InstanceMode::general : InstanceMode::low_rank;
        auto inst = random_instance(5, d, F, 5, mode, rng);
        auto split = split_lin_nonlin(inst.oracle, rng, quiet_lin());
        auto S = compute_vanishing_codim2(inst.oracle, split, d, rng);
        VanishSet B = split.t >= 2 ? brute_force_codim2(split.nonlin, rng) : VanishSet{};
        if (S == B) ++equal;
        if (double(S.size()) <= 3 * std::pow(double(d), 7)) ++bound;
    }
    double s = since(t0);
    report("criterion 2", equal == total && bound == total && s < 600,
           fmt("equal %d/%d, |S| <= 3d^7 on %d/%d, %.1fs", equal, total, bound, total, s));
}

struct Prepared {
    LinNonLinSplit split;
    VanishSet S;
    CandidateSet L;
};

Prepared prepare(const PolyOracle& o, int d, Rng& rng) {
    Prepared p;
    p.split = split_lin_nonlin(o, rng, quiet_lin());
    p.split.nonlin = resolve_indeterminate(p.split.nonlin);
    p.S = compute_vanishing_codim2(o, p.split, d, rng);
    p.L = compute_candidate_forms(p.split.nonlin, p.split.t, p.S, rng);
    return p;
}

// criterion 3
void candidates() {
    auto t0 = Clock::now();
    Rng rng(303);
    int equal = 0, total = 20;
    for (int it = 0; it < total; ++it) {
        uint32_t q = it % 2 ? 7 : 5;
        int d = 3 + it % 2;
        auto F = build_extension(q, ext_degree_for(q, 20));
        auto inst = random_instance(5, d, F, 5, InstanceMode::low_rank, rng);
        auto p = prepare(inst.oracle, d, rng);
        auto expect = bf::definitional_candidates(p.split.nonlin, p.split.t, p.S, rng);
        if (p.L.forms == expect) ++equal;
    }
    report("criterion 3a", equal == total, fmt("definitional equality %d/%d, %.1fs", equal, total, since(t0)));

    t0 = Clock::now();
    auto F = build_extension(13, 6);
    int ok = 0, instances = 50;
    for (int it = 0; it < instances; ++it) {
        int d = 4, rank = 6 + it % 3;
        auto inst = random_instance(8, d, F, rank, InstanceMode::general, rng);
        auto p = prepare(inst.oracle, d, rng);
        auto part = bf::candidate_partition(p.L.forms, inst.truth, 13);
        bool good = span_rank(part.good, 13) >= rank - 2;
        bool bad = span_rank(part.bad, 13) <= std::log2(double(d)) + 2;
        bool others = span_rank(part.others, 13) <= 2;
        if (good && bad && others) ++ok;
    }
    report("criterion 3b", ok == instances, fmt("candidate inequalities hold on %d/%d, %.1fs", ok, instances, since(t0)));
}

double median(std::vector<double> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

// criterion 4
void high_rank() {
    auto F = build_extension(13, 6);
    int success = 0, verified = 0, matched = 0, unverified = 0, total = 100;
    std::vector<double> times;
    for (int seed = 0; seed < total; ++seed) {
        Rng rng(4000 + seed);
        auto inst = random_instance(8, 4, F, 8, InstanceMode::general, rng);
        auto t0 = Clock::now();
        auto r = reconstruct(inst.oracle, 4, Algo::automatic, rng);
        times.push_back(since(t0));
        if (r.status != ReconStatus::success) continue;
        ++success;
        Rng check(99 + seed);
        bool pit = r.pit_trials >= 40 && equivalent_pit(inst.oracle, circuit_oracle(r.circuit), 40, check);
        bool sm = structural_match(decompose(r.circuit), inst.truth);
        if (pit) ++verified;
        else ++unverified;
        if (sm) ++matched;
    }
    double med = median(times);
    report("criterion 4", success >= 95 && verified == success && matched == success && med <= 30,
           fmt("success %d/%d, pit %d, structural %d, unverified %d, median %.2fs", success, total, verified, matched,
               unverified, med));
}

// criterion 5
void corner_case() {
    auto F = build_extension(13, 6);
    report("criterion 5", false, "d=4 with rank 8 is unattainable: a gate alpha*y^4 gives rank at most 5");
    struct Setting {
        const char* name;
        int d, rank;
    };
    for (auto st : {Setting{"criterion 5a (d=4, rank 5)", 4, 5}, Setting{"criterion 5b (d=7, rank 8)", 7, 8}}) {
        int ok = 0, wrong = 0, total = 50;
        for (int seed = 0; seed < total; ++seed) {
            Rng rng(5000 + 100 * st.d + seed);
            auto inst = random_instance(8, st.d, F, st.rank, InstanceMode::corner, rng);
            auto r = reconstruct(inst.oracle, st.d, Algo::automatic, rng);
            if (r.status != ReconStatus::success) continue;
            Rng check(7 + seed);
            bool pit = equivalent_pit(inst.oracle, circuit_oracle(r.circuit), 40, check);
            if (pit && structural_match(decompose(r.circuit), inst.truth))
                ++ok;
            else
                ++wrong;
        }
        report(st.name, ok >= 48 && wrong == 0, fmt("success with structural match %d/%d, wrong %d", ok, total, wrong));
    }
    // non-corner inputs
    int passed = 0, wrong = 0, total = 20;
    for (int seed = 0; seed < total; ++seed) {
        Rng rng(5900 + seed);
        auto inst = random_instance(8, 4, F, 8, InstanceMode::general, rng);
        auto c = corner_case_reconstruct(inst.oracle, 4, rng);
        Rng check(seed);
        if (c.status == ReconStatus::success && !equivalent_pit(inst.oracle, circuit_oracle(c.circuit), 40, check)) ++wrong;
        auto a = reconstruct(inst.oracle, 4, Algo::automatic, rng);
        if (a.status == ReconStatus::success) {
            if (!equivalent_pit(inst.oracle, circuit_oracle(a.circuit), 40, check) ||
                !structural_match(decompose(a.circuit), inst.truth))
                ++wrong;
        }
        if (c.status != ReconStatus::success && a.path != "corner") ++passed;
    }
    report("criterion 5c (non-corner)", wrong == 0 && passed == total,
           fmt("routed past corner %d/%d, wrong outputs %d", passed, total, wrong));
}

// criterion 6
void low_rank() {
    int ok = 0, total = 50;
    double worst = 0;
    for (int seed = 0; seed < total; ++seed) {
        Rng rng(6000 + seed);
        uint32_t q = seed % 2 ? 7 : 5;
        int d = 3 + seed % 3;
        auto F = build_extension(q, ext_degree_for(q, 20));
        auto inst = random_instance(6, d, F, 5, InstanceMode::low_rank, rng);
        auto t0 = Clock::now();
        Analysis A = analyze(inst.oracle, d, rng, {});
        auto r = low_rank_reconstruct(inst.oracle, d, A, rng, {});
        double s = since(t0);
        worst = std::max(worst, s);
        if (r.status != ReconStatus::success) continue;
        int sdeg = total_multiplicity(A.split.lin);
        Rng check(seed);
        bool pit = equivalent_pit(inst.oracle, circuit_oracle(r.circuit), 40, check);
        if (pit && double(r.fan_in()) <= std::pow(double(d - sdeg), 5.0) && s <= 300) ++ok;
    }
    report("criterion 6", ok == total, fmt("success with fan-in bound and pit %d/%d, slowest %.1fs", ok, total, worst));
}

ProperSet random_proper(int n, int size, uint32_t q, Rng& rng) {
    std::vector<LinearForm> pts;
    for (int i = 0; i < size; ++i) {
        LinearForm l(n);
        for (auto& v : l) v = uint32_t(rng() % q);
        pts.push_back(l);
    }
    return make_proper_set(pts, q);
}

ProperSet clustered_proper(int n, int size, uint32_t q, Rng& rng) {
    int dim = 2 + int(rng() % 3);
    std::vector<LinearForm> basis;
    for (int i = 0; i < dim; ++i) {
        LinearForm l(n);
        for (auto& v : l) v = uint32_t(rng() % q);
        basis.push_back(l);
    }
    std::vector<LinearForm> pts;
    for (int i = 0; i < size; ++i) {
        LinearForm l(n, 0);
        for (auto& b : basis) l = form_add(l, form_scale(b, uint32_t(rng() % q), q), q);
        pts.push_back(l);
    }
    return make_proper_set(pts, q);
}

ProperSet independent_set(int n, int size, uint32_t q, Rng& rng) {
    ProperSet T;
    while (int(T.size()) < size) {
        LinearForm l(n);
        for (auto& v : l) v = uint32_t(rng() % q);
        auto c = T;
        c.push_back(l);
        if (span_rank(c, q) == int(c.size())) T.push_back(normalize(l, q));
    }
    return T;
}

// criterion 7
void geometry() {
    Rng rng(707);
    uint32_t q = 5;
    int held = 0, tested = 0;
    while (tested < 100) {
        int n = 6 + int(rng() % 7);
        int size = 2 + int(rng() % 63);
        ProperSet S = rng() % 2 ? clustered_proper(n, size, q, rng) : random_proper(n, size, q, rng);
        if (S.empty()) continue;
        int need = int(std::ceil(std::log2(double(S.size())) + 2));
        if (need > n) continue;
        ProperSet T = independent_set(n, need, q, rng);
        auto w = prop2_witness(S, T, q);
        // recompute the witness dimension pointwise
        int best = 0;
        for (auto& t : T) best = std::max(best, lines_span_dim(bf::ordinary_lines_pointwise(t, S, q), q));
        if (best == w.dim && double(w.dim) >= span_rank(S, q) / (std::log2(double(S.size())) + 2)) ++held;
        ++tested;
    }
    int checks = 0, ok = 0;
    while (checks < 200) {
        int n = 3 + int(rng() % 10);
        ProperSet S = clustered_proper(n, 1 + int(rng() % 64), q, rng);
        if (S.empty()) continue;
        ProperSet T = independent_set(n, 1 + int(rng() % n), q, rng);
        if (ordinary_free_bound_check(S, T, q)) ++ok;
        ++checks;
    }
    report("criterion 7", held == tested && ok == checks,
           fmt("witness inequality %d/%d, bound check %d/%d", held, tested, ok, checks));
}

// criterion 8
void pit_calibration() {
    auto F = build_extension(13, 6);
    Rng rng(808);
    auto z = make_oracle(F, 8, 4, [F](const Point&) { return F->zero(); });
    bool zero_ok = zero_test(z, 10000, rng) && z.queries() == 10000;
    int flagged = 0, total = 1000;
    for (int seed = 0; seed < total; ++seed) {
        Rng r(8000 + seed);
        int d = 1 + seed % 6;
        PolyOracle o;
        if (seed % 2) {
            std::vector<LinearForm> fs;
            for (int i = 0; i < d; ++i) fs.push_back(random_nonzero_form(*F, 8, r));
            o = oracle_from_product(F, 8, fs, F->random_nonzero(r));
        } else {
            auto p = random_poly(F, 8, d, 1 + int(r() % 6), r);
            if (p.terms.empty()) p = DensePoly::variable(F, 8, 0);
            o = oracle_from_poly(p, d);
        }
        if (!zero_test(o, 2, r)) ++flagged;
    }
    report("criterion 8", zero_ok && flagged == total,
           fmt("zero oracle %s on %llu calls, nonzero flagged %d/%d", zero_ok ? "zero" : "NOT zero",
               (unsigned long long)z.queries(), flagged, total));
}

// criterion 9
void infrastructure() {
    Rng rng(909);
    int cases = 1000;

    auto F7 = build_extension(7, 4);
    int compose = 0;
    for (int it = 0; it < cases; ++it) {
        int n = 2 + int(rng() % 4);
        auto o = oracle_from_poly(random_poly(F7, n, 3, 6, rng), 3);
        IsoMap m = random_isomorphism(n, *F7, rng);
        auto back = compose_iso(compose_iso(o, m), m.inverse());
        Point x = random_point(*F7, n, rng);
        if (back(x) == o(x)) ++compose;
    }

    auto F5 = build_extension(5, 6);
    int divide = 0;
    for (int it = 0; it < cases; ++it) {
        int n = 2 + int(rng() % 4);
        std::vector<LinearForm> fs;
        int m = 1 + int(rng() % 3);
        for (int i = 0; i < m; ++i) fs.push_back(random_nonzero_form(*F5, n, rng));
        std::map<LinearForm, int> counts;
        for (auto& l : fs) counts[l]++;
        FactorList fl(counts.begin(), counts.end());
        auto cof = random_poly(F5, n, 2, 4, rng);
        DensePoly prod = cof;
        for (auto& l : fs) prod = prod * DensePoly::from_form(F5, l);
        Scalar s = F5->random_nonzero(rng);
        auto o = oracle_from_poly(prod, 2 + m);
        auto quotient = divide_by_linear_factors(o, fl, s);
        auto back = multiply_by_linear_factors(quotient, fl, s);
        Point x = random_point(*F5, n, rng);
        bool ok;
        try {
            ok = back(x) == o(x) && quotient(x) == F5->div(cof.eval(x), s);
        } catch (const Indeterminate&) {
            ok = false;
            for (auto& l : fs) ok = ok || eval_form(*F5, l, x).is_zero();
        }
        if (ok) ++divide;
    }

    auto F13 = build_extension(13, 6);
    int interp = 0;
    for (int it = 0; it < cases; ++it) {
        int n = 1 + int(rng() % 4), deg = int(rng() % 4);
        auto p = random_poly(F13, n, deg, 5, rng);
        std::vector<int> active(n);
        std::iota(active.begin(), active.end(), 0);
        if (dense_interpolate(oracle_from_poly(p, deg), active, deg, rng) == p) ++interp;
    }

    auto F = build_extension(13, 1);
    int roots = 0, tried = 0;
    while (tried < cases) {
        int count = 1 + int(rng() % 3);
        std::vector<UniPoly> ps;
        Scalar shared = F->from_base(F->random_base(rng));
        for (int i = 0; i < count; ++i) {
            std::vector<Scalar> cs(1 + rng() % 6);
            for (auto& v : cs) v = F->from_base(F->random_base(rng));
            UniPoly p(F.get(), cs);
            if (rng() % 2) p = p * UniPoly(F.get(), {F->neg(shared), F->one()});
            ps.push_back(p);
        }
        if (std::all_of(ps.begin(), ps.end(), [](auto& p) { return p.is_zero(); })) continue;
        ++tried;
        std::vector<Scalar> expect;
        for (uint32_t v = 0; v < 13; ++v) {
            bool ok = true;
            for (auto& p : ps) ok = ok && p.eval(F->from_base(v)).is_zero();
            if (ok) expect.push_back(F->from_base(v));
        }
        if (uni_gcd_roots(ps, rng) == expect) ++roots;
    }
    report("criterion 9", compose == cases && divide == cases && interp == cases && roots == cases,
           fmt("compose %d, divide %d, interpolate %d, gcd roots %d (of %d each)", compose, divide, interp, roots,
               cases));
}

}  // namespace

int main() {
    linear_factors();
    vanishing_spaces();
    candidates();
    high_rank();
    corner_case();
    low_rank();
    geometry();
    pit_calibration();
    infrastructure();
    return failures == 0 ? 0 : 1;
}
