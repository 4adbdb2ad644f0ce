#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "tqdw/builders.hpp"
#include "tqdw/cup.hpp"

using namespace tqdw;

namespace {

int randint(std::mt19937_64& rng, int lo, int hi) {
    return lo + (int)(rng() % (unsigned)(hi - lo + 1));
}

Bichain random_bichain(const CellComplex& m, int c, std::mt19937_64& rng) {
    Bichain w;
    w.total_degree = c;
    for (int a = 0; a <= std::min(c, m.dimension); ++a) {
        int b = c - a;
        if (b < 0 || b > m.dimension) continue;
        for (int t = 0; t < 6; ++t) {
            CellRef ca{a, randint(rng, 0, m.count(a) - 1)};
            CellRef cb{b, randint(rng, 0, m.count(b) - 1)};
            w.add(ca, cb, randint(rng, -2, 2));
        }
    }
    return w;
}

ZChain random_zchain(const CellComplex& m, int degree, std::mt19937_64& rng) {
    ZChain ch;
    ch.degree = degree;
    for (int i = 0; i < m.count(degree); ++i) {
        int v = randint(rng, -2, 2);
        if (v) ch.vals[i] = v;
    }
    return ch;
}

Bichain parse(const CellComplex& m, int c, const std::string& text) {
    Bichain w;
    w.total_degree = c;
    std::istringstream is(text);
    std::string tok;
    i64 sign = 1;
    while (is >> tok) {
        if (tok == "+") { sign = 1; continue; }
        if (tok == "-") { sign = -1; continue; }
        if (tok[0] == '-') { sign = -1; tok = tok.substr(1); }
        auto bar = tok.find('|');
        w.add(m.find(tok.substr(0, bar)), m.find(tok.substr(bar + 1)), sign);
        sign = 1;
    }
    return w;
}

ZChain safe_coboundary(const ZChain& ch, const CellComplex& m) {
    if (ch.degree >= m.dimension) {
        ZChain z;
        z.degree = ch.degree + 1;
        return z;
    }
    return coboundary(ch, m);
}

bool same(const Bichain& x, const Bichain& y) {
    Bichain d = x;
    for (auto& [k, v] : y.vals) d.add(k.first, k.second, -v);
    return d.is_zero();
}

} // namespace

TEST_CASE("bichain boundary applied twice vanishes") {
    std::mt19937_64 rng(11);
    for (auto name : {"tetrahedron", "cube", "mod_cube", "sheared_cube_tri"}) {
        const CellComplex& m = rep_registry().get(name).complex;
        for (int t = 0; t < 25; ++t) {
            auto w = random_bichain(m, randint(rng, 2, 4), rng);
            auto b2 = bichain_boundary(bichain_boundary(w, m), m);
            REQUIRE(b2.is_zero());
        }
    }
}

TEST_CASE("transpose is an involution and commutes with the boundary") {
    std::mt19937_64 rng(12);
    const CellComplex& m = rep_registry().get("cube").complex;
    for (int t = 0; t < 100; ++t) {
        auto w = random_bichain(m, randint(rng, 1, 4), rng);
        CHECK(same(bichain_transpose(bichain_transpose(w)), w));
        auto lhs = bichain_boundary(bichain_transpose(w), m);
        auto rhs = bichain_transpose(bichain_boundary(w, m));
        REQUIRE(same(lhs, rhs));
    }
}

TEST_CASE("boundary of the diagonal edge pair on the edge representative") {
    const CellComplex& m = rep_registry().get("edge").complex;
    Bichain w;
    w.total_degree = 2;
    w.add(m.find("01"), m.find("01"), 1);
    auto b = bichain_boundary(w, m);
    // (delta 01, 01) + (-1)(01, delta 01) with delta 01 = 1 - 0
    Bichain expect;
    expect.total_degree = 1;
    expect.add(m.find("1"), m.find("01"), 1);
    expect.add(m.find("0"), m.find("01"), -1);
    expect.add(m.find("01"), m.find("1"), -1);
    expect.add(m.find("01"), m.find("0"), 1);
    CHECK(same(b, expect));
}

TEST_CASE("every builtin family satisfies the recursion exactly") {
    const CupCatalog& cat = builtin_catalog();
    struct Fam { const char* rep; int x, c; };
    const std::vector<Fam> fams = {
        {"edge", 0, 1},        {"edge", 1, 2},
        {"triangle", 0, 2},    {"triangle", 1, 3},    {"triangle", 2, 4},
        {"tetrahedron", 0, 3}, {"tetrahedron", 1, 4}, {"tetrahedron", 2, 5},
        {"square", 0, 2},      {"square", 1, 3},      {"square", 2, 4},
        {"cube", 0, 3},        {"cube", 1, 4},        {"cube", 2, 5},
        {"two_gon", 0, 2},     {"mod_cube", 0, 3},
    };
    for (auto f : fams) {
        CAPTURE(f.rep);
        CAPTURE(f.x);
        auto res = recursion_residual(cat, f.rep, f.x, f.c);
        REQUIRE(res.is_zero());
    }
}

TEST_CASE("steenrod closed formula matches the listed tetrahedron entries") {
    const CellComplex& m = rep_registry().get("tetrahedron").complex;
    CHECK(same(steenrod_simplex_formula(1, 2, 0), parse(m, 3, "01|123")));
    CHECK(same(steenrod_simplex_formula(0, 3, 0), parse(m, 3, "0|0123")));
    CHECK(same(steenrod_simplex_formula(2, 1, 0), parse(m, 3, "012|23")));
    CHECK(same(steenrod_simplex_formula(3, 0, 0), parse(m, 3, "0123|3")));
    CHECK(same(steenrod_simplex_formula(1, 3, 1), parse(m, 4, "03|0123")));
    CHECK(same(steenrod_simplex_formula(2, 2, 1), parse(m, 4, "-013|123 + 023|012")));
    CHECK(same(steenrod_simplex_formula(3, 1, 1), parse(m, 4, "0123|01 + 0123|12 + 0123|23")));
    CHECK(same(steenrod_simplex_formula(2, 3, 2), parse(m, 5, "012|0123 + 023|0123")));
    CHECK(same(steenrod_simplex_formula(3, 2, 2), parse(m, 5, "0123|013 + 0123|123")));
    const CellComplex& tri = rep_registry().get("triangle").complex;
    CHECK(same(steenrod_simplex_formula(1, 1, 0), parse(tri, 2, "01|12")));
    CHECK(same(steenrod_simplex_formula(1, 2, 1), parse(tri, 3, "-02|012")));
    CHECK(same(steenrod_simplex_formula(2, 1, 1), parse(tri, 3, "012|01 + 012|12")));
    CHECK(same(steenrod_simplex_formula(2, 2, 2), parse(tri, 4, "012|012")));
    const CellComplex& e = rep_registry().get("edge").complex;
    CHECK(same(steenrod_simplex_formula(0, 1, 0), parse(e, 1, "0|01")));
    CHECK(same(steenrod_simplex_formula(1, 0, 0), parse(e, 1, "01|1")));
    CHECK(same(steenrod_simplex_formula(1, 1, 1), parse(e, 2, "01|01")));
}

TEST_CASE("synthesizer reproduces valid families from scratch") {
    for (auto name : {"edge", "triangle", "tetrahedron", "square", "cube", "two_gon",
                      "mod_cube", "sheared_cube_tri"}) {
        CAPTURE(name);
        CupCatalog cat;
        synthesize_family(cat, "pt", 0, 0);
        const Representative& rep = rep_registry().get(name);
        int d = rep.top_degree;
        for (int x = 0; x <= 2; ++x) {
            REQUIRE_NOTHROW(synthesize_family(cat, name, x, d + x));
            REQUIRE(recursion_residual(cat, name, x, d + x).is_zero());
        }
    }
}

TEST_CASE("leibniz rule for the ordinary cup product") {
    // d(A cup B) = dA cup B + (-1)^a A cup dB on a simplicial 3-ball
    std::mt19937_64 rng(21);
    CupCatalog cat = builtin_catalog();
    for (int trial = 0; trial < 20; ++trial) {
        auto m = build_random_ball(rng, randint(rng, 0, 4));
        for (int a = 0; a <= 1; ++a) {
            int b = 2 - a;
            auto A = random_zchain(m, a, rng);
            auto B = random_zchain(m, b, rng);
            auto lhs = coboundary(eval_cup(A, B, 0, m, cat), m);
            auto r1 = eval_cup(coboundary(A, m), B, 0, m, cat);
            auto r2 = eval_cup(A, coboundary(B, m), 0, m, cat);
            ZChain rhs = r1;
            i64 sgn = a % 2 == 0 ? 1 : -1;
            for (auto& [k, v] : r2.vals) rhs.add(k, sgn * v);
            ZChain diff = lhs;
            for (auto& [k, v] : rhs.vals) diff.add(k, -v);
            REQUIRE(diff.is_zero());
        }
    }
}

TEST_CASE("full steenrod relation for higher cup products on the 3-simplex") {
    // d(A cup_x B) = dA cup_x B + (-1)^a A cup_x dB
    //              + (-1)^{a+b+x} A cup_{x-1} B + (-1)^{a+b+ab} B cup_{x-1} A
    std::mt19937_64 rng(22);
    CupCatalog cat = builtin_catalog();
    auto m = build_representative("tetrahedron");
    for (int trial = 0; trial < 50; ++trial) {
        for (int x = 1; x <= 2; ++x) {
            for (int a = 1; a <= 2; ++a) {
                int b = x + 2 - a;  // a+b-x = 2 so the result is a 2-chain
                if (b < 0 || b > 3) continue;
                auto A = random_zchain(m, a, rng);
                auto B = random_zchain(m, b, rng);
                auto lhs = coboundary(eval_cup(A, B, x, m, cat), m);
                ZChain rhs = eval_cup(safe_coboundary(A, m), B, x, m, cat);
                auto add_scaled = [&](const ZChain& z, i64 s) {
                    for (auto& [k, v] : z.vals) rhs.add(k, s * v);
                };
                add_scaled(eval_cup(A, safe_coboundary(B, m), x, m, cat), a % 2 ? -1 : 1);
                add_scaled(eval_cup(A, B, x - 1, m, cat), (a + b + x) % 2 ? -1 : 1);
                add_scaled(eval_cup(B, A, x - 1, m, cat), (a + b + a * b) % 2 ? -1 : 1);
                ZChain diff = lhs;
                for (auto& [k, v] : rhs.vals) diff.add(k, -v);
                REQUIRE(diff.is_zero());
            }
        }
    }
}

TEST_CASE("constant-1 0-cochain is a left unit for cup_0") {
    CupCatalog cat = builtin_catalog();
    std::mt19937_64 rng(23);
    for (auto kind : {"cubic", "sheared_cubic_plain"}) {
        auto m = build_lattice(kind, {2, 2, 2}, {true, true, true});
        ZChain one;
        one.degree = 0;
        for (int i = 0; i < m.count(0); ++i) one.vals[i] = 1;
        for (int b = 1; b <= 3; ++b) {
            auto B = random_zchain(m, b, rng);
            auto r = eval_cup(one, B, 0, m, cat);
            ZChain diff = r;
            for (auto& [k, v] : B.vals) diff.add(k, -v);
            REQUIRE(diff.is_zero());
        }
    }
}

TEST_CASE("bilinearity of eval_cup") {
    CupCatalog cat = builtin_catalog();
    std::mt19937_64 rng(24);
    auto m = build_cubic(2, 2, 2, {true, true, true});
    for (int trial = 0; trial < 10; ++trial) {
        auto A1 = random_zchain(m, 1, rng), A2 = random_zchain(m, 1, rng);
        auto B = random_zchain(m, 2, rng);
        i64 s = randint(rng, -3, 3), t = randint(rng, -3, 3);
        ZChain lin;
        lin.degree = 1;
        for (auto& [k, v] : A1.vals) lin.add(k, s * v);
        for (auto& [k, v] : A2.vals) lin.add(k, t * v);
        auto lhs = eval_cup(lin, B, 1, m, cat);
        auto r1 = eval_cup(A1, B, 1, m, cat);
        auto r2 = eval_cup(A2, B, 1, m, cat);
        ZChain diff = lhs;
        for (auto& [k, v] : r1.vals) diff.add(k, -s * v);
        for (auto& [k, v] : r2.vals) diff.add(k, -t * v);
        REQUIRE(diff.is_zero());
    }
}

TEST_CASE("catalog json round trip") {
    CupCatalog cat = builtin_catalog();
    auto text = catalog_to_json(cat);
    auto cat2 = catalog_from_json(text);
    CHECK(catalog_to_json(cat2) == text);
}

TEST_CASE("missing catalog entry names the representative") {
    CupCatalog cat;  // empty
    synthesize_family(cat, "pt", 0, 0);
    auto m = build_cubic(2, 2, 2, {true, true, true});
    ZChain A;
    A.degree = 1;
    A.vals[0] = 1;
    ZChain B;
    B.degree = 2;
    B.vals[0] = 1;
    try {
        eval_cup(A, B, 0, m, cat);
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("cube") != std::string::npos);
    }
}
