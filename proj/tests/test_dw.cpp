#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "tqdw/anyon.hpp"
#include "tqdw/dw.hpp"

using namespace tqdw;

namespace {

GroupSpec z2() { return GroupSpec(IMat{[] { IMat m(1, 1); m.at(0, 0) = 2; return m; }()}); }

GroupSpec zf(std::vector<std::vector<i64>> rows) {
    IMat m((int)rows.size(), (int)rows.size());
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) m.at(i, j) = rows[i][j];
    return GroupSpec(m);
}

ActionSpec action_of(const GroupSpec& g, std::vector<std::vector<Rat>> F,
                     ActionSpec::Variant v = ActionSpec::Variant::general) {
    return ActionSpec(g, std::move(F), v);
}

ActionSpec double_semion(const GroupSpec& g) { return action_of(g, {{Rat(1, 4)}}); }
ActionSpec untwisted(const GroupSpec& g) {
    std::vector<std::vector<Rat>> F(g.k, std::vector<Rat>(g.k));
    return action_of(g, std::move(F));
}

// Independent oracle: the action formula evaluated with an arbitrary integer
// lift choice (not the canonical one), for the general variant.
RationalPhase action_oracle(const GroupSpec& g, const ActionSpec& act,
                            const std::map<int, IVec>& liftA, const std::map<int, IVec>& liftb,
                            const std::map<int, IVec>& liftc, const CellComplex& m,
                            const CupCatalog& cat) {
    Rat S;
    auto get = [&](const std::map<int, IVec>& mp, int cell) {
        auto it = mp.find(cell);
        return it == mp.end() ? IVec(g.k, 0) : it->second;
    };
    // dAbar over Z
    std::map<int, IVec> dA;
    for (auto& [e, v] : liftA)
        for (auto& [sup, coef] : m.cofaces[1][e]) {
            auto& acc = dA.try_emplace(sup, IVec(g.k, 0)).first->second;
            for (int i = 0; i < g.k; ++i) acc[i] += coef * v[i];
        }
    eval_cup_terms(0, 1, 2, m, cat, [&](CellRef a, CellRef b, i64 coef, CellRef top) {
        i64 sigma = m.top_orientation[top.index];
        IVec av = get(liftA, a.index);
        S += act.Fdot(av, get(dA, b.index)) * Rat(sigma * coef);
        S -= act.FplusFT(av, get(liftb, b.index)) * Rat(sigma * coef);
    });
    eval_cup_terms(1, 2, 2, m, cat, [&](CellRef a, CellRef b, i64 coef, CellRef top) {
        i64 sigma = m.top_orientation[top.index];
        S += act.Fdot(get(liftb, a.index), get(dA, b.index)) * Rat(sigma * coef);
    });
    // A^T (f^-1)^T c: solve f^T y = cbar exactly per edge
    GroupSpec gt = g.transposed();
    for (auto& [e, cv] : liftc) {
        IVec av = get(liftA, e);
        // (f^{-1})^T c = (f^T)^{-1} c: use rational solve via adjugate
        i64 det = det_bareiss(gt.f);
        for (int i = 0; i < g.k; ++i) {
            // entry i of (f^T)^{-1} c via Cramer
            IMat tmp = gt.f;
            for (int r = 0; r < g.k; ++r) tmp.at(r, i) = cv[r];
            S += Rat(av[i]) * Rat(det_bareiss(tmp), det);
        }
    }
    return RationalPhase(S);
}

int randint(std::mt19937_64& rng, int lo, int hi) {
    return lo + (int)(rng() % (unsigned)(hi - lo + 1));
}

} // namespace

TEST_CASE("canonical lifts") {
    auto g2 = z2();
    CHECK(g2.canon({1}) == IVec{1});
    CHECK(g2.canon({0}) == IVec{0});
    CHECK(g2.canon({-3}) == IVec{1});
    // lift(x+y) - lift(x) - lift(y) is in f Z^k for all pairs
    auto g = zf({{2, 0}, {2, 2}});
    auto els = g.elements();
    CHECK(els.size() == 4);
    ZSolver fs(g.f);
    for (auto& x : els)
        for (auto& y : els) {
            IVec s = g.add(x, y);
            IVec diff(g.k);
            for (int i = 0; i < g.k; ++i) diff[i] = x[i] + y[i] - s[i];
            CHECK(fs.solve(diff).has_value());
        }
    // canonical domain is exhausted exactly once
    std::set<IVec> seen(els.begin(), els.end());
    CHECK((i64)seen.size() == g.order);
    for (auto& e : els) CHECK(g.canon(e) == e);
}

TEST_CASE("cyclotomic sums") {
    CycloSum s;
    s.add_phase(Rat(0));
    s.add_phase(Rat(1, 3));
    s.add_phase(Rat(2, 3));
    CHECK(s.is_zero());
    CycloSum t;
    t.add_phase(Rat(1, 4));
    t.add_phase(Rat(1, 4));
    CHECK(!t.is_zero());
    CycloSum u;
    u.add_phase(Rat(3, 4));
    u.add_phase(Rat(3, 4));
    auto r = t.phase_ratio(u);
    REQUIRE(r.has_value());
    CHECK(RationalPhase(*r) == RationalPhase(Rat(1, 2)));
}

TEST_CASE("double-semion weight on a single tetrahedron") {
    auto m = build_representative("tetrahedron");
    auto g = z2();
    auto act = double_semion(g);
    CupCatalog cat = builtin_catalog();
    // A determined by (A01, A12, A23) = (1,1,1) through dA = 0
    ZfChain A;
    A.degree = 1;
    A.vals[m.find("01").index] = {1};
    A.vals[m.find("12").index] = {1};
    A.vals[m.find("23").index] = {1};
    A.vals[m.find("02").index] = {0 + 0};  // 1+1 mod 2
    A.vals[m.find("13").index] = {0};
    A.vals[m.find("03").index] = {1};
    A.vals.erase(m.find("02").index);
    A.vals.erase(m.find("13").index);
    DefectConfig d;
    auto s = dw_action(g, act, A, d, m, cat);
    CHECK(s == RationalPhase(Rat(1, 2)));
    // group 3-cocycle: omega = (-1)^{A01 A12 A23} for all 8 inputs
    for (int bits = 0; bits < 8; ++bits) {
        i64 a01 = bits & 1, a12 = (bits >> 1) & 1, a23 = (bits >> 2) & 1;
        ZfChain B;
        B.degree = 1;
        B.set(g, m.find("01").index, {a01});
        B.set(g, m.find("12").index, {a12});
        B.set(g, m.find("23").index, {a23});
        B.set(g, m.find("02").index, {a01 + a12});
        B.set(g, m.find("13").index, {a12 + a23});
        B.set(g, m.find("03").index, {a01 + a12 + a23});
        auto sb = dw_action(g, act, B, d, m, cat);
        RationalPhase expect(Rat(a01 * a12 * a23, 2));
        CHECK(sb == expect);
    }
}

TEST_CASE("untwisted action vanishes without defects") {
    std::mt19937_64 rng(5);
    auto m = build_cubic(2, 2, 2, {true, true, true});
    auto g = z2();
    auto act = untwisted(g);
    CupCatalog cat = builtin_catalog();
    for (int t = 0; t < 10; ++t) {
        ZfChain alpha;
        alpha.degree = 0;
        for (int v = 0; v < m.count(0); ++v)
            if (rng() & 1) alpha.vals[v] = {1};
        ZfChain A = zf_coboundary(g, alpha, m);
        DefectConfig d;
        CHECK(dw_action(g, act, A, d, m, cat).is_trivial());
    }
}

TEST_CASE("action equals the oracle and is lift independent") {
    std::mt19937_64 rng(31);
    CupCatalog cat = builtin_catalog();
    for (int trial = 0; trial < 12; ++trial) {
        auto m = build_random_ball(rng, randint(rng, 0, 3));
        ensure_for_complex(cat, m, 0, 1, 2);
        ensure_for_complex(cat, m, 1, 2, 2);
        auto [g, act] = random_group_action(rng, 2, 6);
        // random valid configuration
        ZfChain A0;
        A0.degree = 1;
        auto els = g.elements();
        for (int e = 0; e < m.count(1); ++e) {
            IVec v = els[rng() % els.size()];
            if (!g.is_zero(v)) A0.vals[e] = v;
        }
        DefectConfig d;
        d.b = zf_coboundary(g, A0, m);
        GroupSpec gt = g.transposed();
        for (int e = 0; e < m.count(1); ++e)
            if (rng() % 3 == 0) d.c.set(gt, e, gt.elements()[rng() % g.order]);
        // make c valid is not needed for comparing lifts of the same S
        std::map<int, IVec> la, lb, lc;
        for (auto& [e, v] : A0.vals) la[e] = v;
        for (auto& [f, v] : d.b.vals) lb[f] = v;
        for (auto& [e, v] : d.c.vals) lc[e] = v;
        auto s_impl = dw_action(g, act, A0, d, m, cat);
        auto s_oracle = action_oracle(g, act, la, lb, lc, m, cat);
        CHECK(s_impl == s_oracle);
    }
}

TEST_CASE("lift periodicity on a closed complex") {
    // replacing lift(A) by lift(A) + f x leaves the action unchanged on a
    // torus (the derivation moves coboundaries off the fundamental class)
    std::mt19937_64 rng(32);
    CupCatalog cat = builtin_catalog();
    auto m = build_cubic(2, 2, 2, {true, true, true});
    for (int trial = 0; trial < 12; ++trial) {
        auto [g, act] = random_group_action(rng, 2, 6);
        auto els = g.elements();
        ZfChain A0;
        A0.degree = 1;
        for (int e = 0; e < m.count(1); ++e) {
            IVec v = els[rng() % els.size()];
            if (!g.is_zero(v)) A0.vals[e] = v;
        }
        DefectConfig d;
        d.b = zf_coboundary(g, A0, m);
        GroupSpec gt = g.transposed();
        for (int e = 0; e < m.count(1); ++e)
            if (rng() % 3 == 0) d.c.set(gt, e, gt.elements()[rng() % g.order]);
        std::map<int, IVec> la, lb, lc;
        for (auto& [e, v] : A0.vals) la[e] = v;
        for (auto& [f, v] : d.b.vals) lb[f] = v;
        for (auto& [e, v] : d.c.vals) lc[e] = v;
        auto s_oracle = action_oracle(g, act, la, lb, lc, m, cat);
        CHECK(dw_action(g, act, A0, d, m, cat) == s_oracle);
        auto la2 = la;
        for (auto& [e, v] : la2)
            if (rng() & 1)
                for (int i = 0; i < g.k; ++i) {
                    i64 x = randint(rng, -1, 1);
                    for (int r = 0; r < g.k; ++r) v[r] += g.f.at(r, i) * x;
                }
        auto s_shift = action_oracle(g, act, la2, lb, lc, m, cat);
        CHECK(s_shift == s_oracle);
    }
}

TEST_CASE("semion equivalence: general action vs the dedicated form") {
    // general f=(2), F=(1/4) equals (1/4) A cup dA + (1/4) b cup_1 dA
    // + (1/2) A^T c after replacing c by c + cup b; exhaustive on a small torus
    auto m = build_cubic(2, 1, 1, {true, true, true});
    auto g = z2();
    auto act = double_semion(g);
    CupCatalog cat = builtin_catalog();
    auto edges = m.count(1);
    REQUIRE(edges == 6);
    for (int abits = 0; abits < (1 << 6); ++abits) {
        ZfChain A;
        A.degree = 1;
        for (int e = 0; e < 6; ++e)
            if ((abits >> e) & 1) A.vals[e] = {1};
        DefectConfig d;
        d.b = zf_coboundary(g, A, m);
        for (int cbits = 0; cbits < (1 << 6); cbits += 7) {  // sample of c chains
            d.c.vals.clear();
            for (int e = 0; e < 6; ++e)
                if ((cbits >> e) & 1) d.c.vals[e] = {1};
            auto s_general = dw_action(g, act, A, d, m, cat);
            // dedicated: (1/4) A cup dA + (1/4) b cup_1 dA + (1/2) A (c + cup b)
            Rat S;
            std::map<int, i64> la, lb, lc;
            for (auto& [e, v] : A.vals) la[e] = v[0];
            for (auto& [f, v] : d.b.vals) lb[f] = v[0];
            for (auto& [e, v] : d.c.vals) lc[e] = v[0];
            std::map<int, i64> dA;
            for (auto& [e, v] : la)
                for (auto& [sup, coef] : m.cofaces[1][e]) dA[sup] += coef * v;
            eval_cup_terms(0, 1, 2, m, cat, [&](CellRef a, CellRef b, i64 coef, CellRef top) {
                i64 sigma = m.top_orientation[top.index];
                if (la.count(a.index) && dA.count(b.index))
                    S += Rat(sigma * coef * la[a.index] * dA[b.index], 4);
            });
            eval_cup_terms(1, 2, 2, m, cat, [&](CellRef a, CellRef b, i64 coef, CellRef top) {
                i64 sigma = m.top_orientation[top.index];
                if (lb.count(a.index) && dA.count(b.index))
                    S += Rat(sigma * coef * lb[a.index] * dA[b.index], 4);
            });
            // cup-shifted b: (cup b)(e) = sum sigma coef b(face) over (e,face) terms
            std::map<int, i64> cupb;
            eval_cup_terms(0, 1, 2, m, cat, [&](CellRef a, CellRef b, i64 coef, CellRef top) {
                i64 sigma = m.top_orientation[top.index];
                if (lb.count(b.index)) cupb[a.index] += sigma * coef * lb[b.index];
            });
            for (int e = 0; e < 6; ++e) {
                i64 ce = (lc.count(e) ? lc[e] : 0) + (cupb.count(e) ? cupb[e] : 0);
                if (la.count(e)) S += Rat(la[e] * ce, 2);
            }
            CHECK(s_general == RationalPhase(S));
        }
    }
}

TEST_CASE("partition function of the untwisted Z2 theory on the 2x2x2 torus") {
    auto m = build_cubic(2, 2, 2, {true, true, true});
    auto g = z2();
    auto act = untwisted(g);
    CupCatalog cat = builtin_catalog();
    PartitionEvaluator pe(m, g, act, &cat);
    DefectConfig d;
    ZfChain a;
    a.degree = 1;
    auto z = pe.evaluate(d, a);
    CHECK(!z.zero);
    CHECK(std::abs(z.value().real() - 4.0) < 1e-9);
    CHECK(std::abs(z.value().imag()) < 1e-12);
    CHECK(pe.solution_count(d, a) == 1024);
}

TEST_CASE("vertex star: zero exactly when the charge constraint breaks") {
    auto big = build_cubic(4, 4, 4, {false, false, false});
    auto ball = restrict_complex(big, closed_star(big, {big.find("v(2,2,2)")}));
    auto g = z2();
    CupCatalog cat = builtin_catalog();
    for (auto act : {untwisted(g), double_semion(g)}) {
        PartitionEvaluator pe(ball, g, act, &cat);
        DefectConfig d;
        ZfChain a;
        a.degree = 1;
        auto z0 = pe.evaluate(d, a);
        CHECK(!z0.zero);
        // single edge of c ending at the interior vertex
        auto interior = interior_vertices(ball);
        REQUIRE(interior.size() == 1);
        int v = *interior.begin();
        DefectConfig bad;
        bad.c.vals[ball.cofaces[0][v][0].first] = {1};
        auto z1 = pe.evaluate(bad, a);
        CHECK(z1.zero);
        // a closed c loop is fine
        DefectConfig loop;
        ZfChain gamma;
        gamma.degree = 2;
        gamma.vals[ball.cofaces[1][ball.cofaces[0][v][0].first][0].first] = {1};
        loop.c = zf_boundary(g.transposed(), gamma, ball);
        auto z2 = pe.evaluate(loop, a);
        CHECK(!z2.zero);
    }
}

TEST_CASE("gauge invariance for random groups and twists") {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 4; ++i) {
        auto [g, act] = random_group_action(rng, 3, 8);
        auto rep = check_gauge_invariance(g, act, 2, 10, rng);
        if (!rep.ok)
            for (auto& f : rep.failures) MESSAGE(f);
        CHECK(rep.ok);
    }
}

TEST_CASE("1-form condition suite for the double semion") {
    std::mt19937_64 rng(99);
    auto g = z2();
    auto rep = check_1form_conditions(g, double_semion(g), rng);
    if (!rep.ok)
        for (auto& f : rep.failures) MESSAGE(f);
    CHECK(rep.ok);
}

TEST_CASE("anyon data for the standard models") {
    auto g = z2();
    // toric code
    auto tc = anyon_data(g, untwisted(g));
    CHECK(anyon_conditions_hold(tc));
    CHECK(tc.invariant_factors == std::vector<i64>{2, 2});
    CHECK(tc.spin({1, 0}) == RationalPhase(Rat(0)));
    CHECK(tc.spin({0, 1}) == RationalPhase(Rat(0)));
    CHECK(tc.braiding({1, 0}, {0, 1}) == RationalPhase(Rat(1, 2)));
    // double semion
    auto ds = anyon_data(g, double_semion(g));
    CHECK(anyon_conditions_hold(ds));
    CHECK(ds.m.at(0, 0) == 2);
    CHECK(ds.m.at(1, 0) == 2);
    CHECK(ds.m.at(1, 1) == 2);
    CHECK(ds.invariant_factors == std::vector<i64>{2, 2});
    // generator spins -1/4 and 0; braiding 1/2
    CHECK(ds.spin({1, 0}) == RationalPhase(Rat(-1, 4)));
    CHECK(ds.spin({0, 1}) == RationalPhase(Rat(0)));
    CHECK(ds.braiding({1, 0}, {0, 1}) == RationalPhase(Rat(1, 2)));
    // equivalent to the spins +-1/4 presentation
    AnyonData target;
    target.m = IMat(2, 2);
    target.m.at(0, 0) = 2;
    target.m.at(1, 1) = 2;
    target.M_less.assign(2, std::vector<Rat>(2));
    target.M_less[0][0] = Rat(1, 4);
    target.M_less[1][1] = Rat(-1, 4);
    CHECK(metric_groups_equivalent(ds, target));
    // and not equivalent to the toric code
    CHECK(!metric_groups_equivalent(ds, tc));
    // type-II Z2 x Z2 with a=1: fusion group Z4 x Z4
    auto g22 = zf({{2, 0}, {0, 2}});
    auto t2 = anyon_data(g22, action_of(g22, {{Rat(0), Rat(1, 4)}, {Rat(0), Rat(0)}}));
    CHECK(anyon_conditions_hold(t2));
    CHECK(t2.invariant_factors == std::vector<i64>{4, 4});
}

TEST_CASE("det(Mbar m) = +-1 for random valid twists") {
    std::mt19937_64 rng(123);
    for (int i = 0; i < 50; ++i) {
        auto [g, act] = random_group_action(rng, 3, 8);
        auto a = anyon_data(g, act);
        CHECK(anyon_conditions_hold(a));
    }
}

TEST_CASE("flux-charge braiding measured from partition ratios") {
    CupCatalog cat = builtin_catalog();
    // open 4x4x4 box, flux tube along x at (y,z)=(1,1)
    auto box = build_cubic(4, 4, 4, {false, false, false});
    for (auto spec : {std::pair<i64, Rat>{2, Rat(0)}, {4, Rat(0)}, {2, Rat(1, 4)}}) {
        IMat fm(1, 1);
        fm.at(0, 0) = spec.first;
        GroupSpec g(fm);
        ActionSpec act = action_of(g, {{spec.second}});
        PartitionEvaluator pe(box, g, act, &cat);
        DefectConfig d;
        for (int i = 0; i <= 4; ++i)
            if (box.has("bx(" + std::to_string(i) + ",1,1)"))
                d.b.set(g, box.find("bx(" + std::to_string(i) + ",1,1)").index, {1});
        // boundary values from one full solution of dA = b
        int k = 1, ne = box.count(1), nf = box.count(2);
        IMat sys(nf, ne + nf);
        for (int fx = 0; fx < nf; ++fx) {
            for (auto& [e, coef] : box.incidence[2][fx]) sys.at(fx, e) += coef;
            sys.at(fx, ne + fx) = g.f.at(0, 0);
        }
        ZSolver sol(sys);
        std::vector<i64> rhs(nf, 0);
        for (auto& [fx, v] : d.b.vals) rhs[fx] = v[0];
        auto full = sol.solve(rhs);
        REQUIRE(full.has_value());
        ZfChain a;
        a.degree = 1;
        for (int e : pe.boundary_edges()) {
            IVec v = g.canon({(*full)[e]});
            if (!g.is_zero(v)) a.vals[e] = v;
        }
        (void)k;
        auto z0 = pe.evaluate(d, a);
        REQUIRE(!z0.zero);
        // move c across the flux-carrying face: ratio is the braiding phase
        DefectConfig dl = d;
        ZfChain gamma;
        gamma.degree = 2;
        gamma.vals[box.find("bx(1,1,1)").index] = {1};
        dl.c = zf_boundary(g.transposed(), gamma, box);
        auto z1 = pe.evaluate(dl, a);
        REQUIRE(!z1.zero);
        auto ratio = z1.sum.phase_ratio(z0.sum);
        REQUIRE(ratio.has_value());
        auto any = anyon_data(g, act);
        IVec flux(2, 0), charge(2, 0);
        flux[0] = 1;
        charge[1] = 1;
        CHECK(RationalPhase(*ratio) == any.braiding(charge, flux));
        CHECK(RationalPhase(*ratio) == RationalPhase(Rat(1, spec.first)));
        // the same move away from the flux is trivial
        DefectConfig dt = d;
        ZfChain gamma2;
        gamma2.degree = 2;
        gamma2.vals[box.find("bx(1,2,2)").index] = {1};
        dt.c = zf_boundary(g.transposed(), gamma2, box);
        auto z2 = pe.evaluate(dt, a);
        REQUIRE(!z2.zero);
        auto r2 = z2.sum.phase_ratio(z0.sum);
        REQUIRE(r2.has_value());
        CHECK(RationalPhase(*r2).is_trivial());
    }
}

TEST_CASE("group and defect json round trips") {
    auto g = zf({{2, 0}, {2, 2}});
    auto act = action_of(g, {{Rat(1, 4), Rat(0)}, {Rat(0), Rat(1, 2)}});
    auto text = group_action_to_json(g, act);
    auto [g2, act2] = group_action_from_json(text);
    CHECK(group_action_to_json(g2, act2) == text);
    auto m = build_cubic(2, 2, 2, {true, true, true});
    DefectConfig d;
    d.b.set(g, 3, {1, 1});
    d.c.set(g.transposed(), 5, {1, 0});
    auto dj = defects_to_json(d, m);
    auto d2 = defects_from_json(dj, m, g);
    CHECK(defects_to_json(d2, m) == dj);
}
