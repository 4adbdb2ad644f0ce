#include "tqdw/cup.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace tqdw {

namespace {

Bichain push_forward(const Bichain& w, const CellComplex& sub, const Cell& owner_cell) {
    Bichain out;
    out.total_degree = w.total_degree;
    for (auto& [key, v] : w.vals) {
        CellRef a = owner_cell.corr.at(repdetail::flat_index(sub, key.first));
        CellRef b = owner_cell.corr.at(repdetail::flat_index(sub, key.second));
        out.add(a, b, v);
    }
    return out;
}

Bichain parse_bichain(const CellComplex& m, int total_degree, const std::string& text) {
    Bichain w;
    w.total_degree = total_degree;
    std::istringstream is(text);
    std::string tok;
    i64 sign = 1;
    while (is >> tok) {
        if (tok == "+") { sign = 1; continue; }
        if (tok == "-") { sign = -1; continue; }
        if (tok[0] == '-') { sign = -1; tok = tok.substr(1); }
        auto bar = tok.find('|');
        CellRef a = m.find(tok.substr(0, bar));
        CellRef b = m.find(tok.substr(bar + 1));
        w.add(a, b, sign);
        sign = 1;
    }
    return w;
}

struct ChainSolver {
    ZSolver solver;
    std::vector<std::vector<i64>> kernel;
    explicit ChainSolver(const IMat& m) : solver(m), kernel(solver.kernel_basis()) {}
};

size_t support_size(const std::vector<i64>& v) {
    size_t n = 0;
    for (i64 x : v)
        if (x) ++n;
    return n;
}

bool lex_better(const std::vector<i64>& a, const std::vector<i64>& b) {
    size_t sa = support_size(a), sb = support_size(b);
    if (sa != sb) return sa < sb;
    return a < b;
}

// smallest-support solution of delta w = rhs, deterministic: particular
// solution reduced over the kernel lattice (exhaustive in a small box for
// low kernel rank, greedy descent otherwise)
std::optional<std::vector<i64>> solve_small(const ChainSolver& cs, const std::vector<i64>& rhs) {
    auto part = cs.solver.solve(rhs);
    if (!part) return std::nullopt;
    std::vector<i64> best = *part;
    int rank = (int)cs.kernel.size();
    auto add_mult = [&](std::vector<i64> v, int k, i64 f) {
        for (size_t i = 0; i < v.size(); ++i) v[i] += f * cs.kernel[k][i];
        return v;
    };
    if (rank > 0 && rank <= 6) {
        std::vector<i64> coef(rank, -2);
        while (true) {
            std::vector<i64> cand = *part;
            for (int k = 0; k < rank; ++k) cand = add_mult(cand, k, coef[k]);
            if (lex_better(cand, best)) best = cand;
            int k = 0;
            while (k < rank && ++coef[k] > 2) coef[k++] = -2;
            if (k == rank) break;
        }
    } else {
        bool improved = true;
        while (improved) {
            improved = false;
            for (int k = 0; k < rank; ++k)
                for (i64 f : {-2, -1, 1, 2}) {
                    auto cand = add_mult(best, k, f);
                    if (lex_better(cand, best)) { best = cand; improved = true; }
                }
        }
    }
    return best;
}

Bichain facet_family(const CupCatalog& cat, const CellComplex& m, CellRef facet, int x,
                     int c) {
    const Cell& fc = m.cells[facet.degree][facet.index];
    if (facet.degree == 0) {
        Bichain f = cat.family("pt", x, c);
        Bichain out;
        out.total_degree = c;
        for (auto& [k, v] : f.vals) {
            (void)k;
            out.add(facet, facet, v);
        }
        return out;
    }
    auto& reg = rep_registry();
    const Representative& r = reg.get(fc.rep);
    return push_forward(cat.family(r.name, x, c), r.complex, fc);
}

} // namespace

bool CupCatalog::has_family(const std::string& rep, int x, int c) const {
    if (x < 0 || c < x) return true;  // structurally zero
    return complete_.count({rep, x, c}) > 0;
}

Bichain CupCatalog::family(const std::string& rep, int x, int c) const {
    Bichain out;
    out.total_degree = c;
    if (x < 0 || c < x) return out;
    if (!has_family(rep, x, c))
        throw std::runtime_error("missing cup catalog family: representative " + rep + ", x=" +
                                 std::to_string(x) + ", c=" + std::to_string(c));
    for (int a = 0; a <= c; ++a) {
        auto* e = find(rep, x, a, c - a);
        if (e) out += e->w;
    }
    return out;
}

Bichain recursion_residual(const CupCatalog& cat, const std::string& rep_name, int x, int c) {
    auto& reg = rep_registry();
    const Representative& rep = reg.get(rep_name);
    const CellComplex& m = rep.complex;
    Bichain lhs = bichain_boundary(cat.family(rep_name, x, c), m);
    Bichain rhs;
    rhs.total_degree = c - 1;
    int d = rep.top_degree;
    for (auto& [facet, coef] : m.incidence[d][rep.top().index])
        rhs += facet_family(cat, m, {d - 1, facet}, x, c - 1).scaled(coef);
    Bichain prev = cat.family(rep_name, x - 1, c - 1);
    i64 s1 = ((c + x) % 2 == 0) ? 1 : -1;
    i64 s2 = (c % 2 == 0) ? 1 : -1;
    rhs += prev.scaled(s1);
    rhs += bichain_transpose(prev).scaled(s2);
    for (auto& [k, v] : rhs.vals) lhs.add(k.first, k.second, -v);
    return lhs;
}

void synthesize_family(CupCatalog& cat, const std::string& rep_name, int x, int c) {
    if (x < 0 || c < x) return;
    if (cat.has_family(rep_name, x, c)) return;
    auto& reg = rep_registry();
    const Representative& rep = reg.get(rep_name);
    const CellComplex& m = rep.complex;
    int d = rep.top_degree;
    if (d != c - x)
        throw std::invalid_argument("cup synthesis: representative " + rep_name +
                                    " has degree " + std::to_string(d) + ", expected " +
                                    std::to_string(c - x));
    if (rep_name == "pt") {
        if (x == 0 && c == 0) {
            CupEntry e{rep_name, 0, 0, 0, {}, false};
            e.w.total_degree = 0;
            e.w.add(rep.top(), rep.top(), 1);
            cat.put(std::move(e));
        }
        cat.mark_complete(rep_name, x, c);
        return;
    }
    // dependencies
    synthesize_family(cat, rep_name, x - 1, c - 1);
    for (auto& [facet, coef] : m.incidence[d][rep.top().index]) {
        (void)coef;
        int frep = m.cells[d - 1][facet].rep;
        synthesize_family(cat, frep < 0 ? "pt" : reg.get(frep).name, x, c - 1);
    }

    // right-hand side of the defining recursion, a (c-1)-bichain on m
    Bichain u;
    u.total_degree = c - 1;
    for (auto& [facet, coef] : m.incidence[d][rep.top().index])
        u += facet_family(cat, m, {d - 1, facet}, x, c - 1).scaled(coef);
    Bichain prev = cat.family(rep_name, x - 1, c - 1);
    u += prev.scaled(((c + x) % 2 == 0) ? 1 : -1);
    u += bichain_transpose(prev).scaled((c % 2 == 0) ? 1 : -1);

    // staircase: components (k, i) with k = c-i, solved for i from d down
    std::map<int, std::unique_ptr<ChainSolver>> solvers;
    auto solver_for = [&](int k) -> ChainSolver& {
        auto it = solvers.find(k);
        if (it == solvers.end())
            it = solvers.emplace(k, std::make_unique<ChainSolver>(m.boundary_matrix(k))).first;
        return *it->second;
    };
    // W components, seeded from entries already present in the catalog
    std::map<int, Bichain> W;  // by second degree i
    int ilo = std::max(0, c - d), ihi = std::min(d, c);
    for (int i = ilo; i <= ihi; ++i) {
        W[i].total_degree = c;
        if (auto* e = cat.find(rep_name, x, c - i, i)) W[i] = e->w;
    }
    auto seeded = [&](int i) { return cat.find(rep_name, x, c - i, i) != nullptr; };

    for (int i = ihi; i >= ilo; --i) {
        if (seeded(i)) continue;
        int k = c - i;
        if (k == 0) {
            // x = 0, i = c: the 0-homology seed is a single chosen vertex
            CellRef v0{0, 0};
            for (int vi = 0; vi < m.count(0); ++vi)
                if (m.cells[0][vi].id < m.cells[0][v0.index].id) v0 = {0, vi};
            W[i].add(v0, rep.top(), 1);
            continue;
        }
        ChainSolver& cs = solver_for(k);
        for (int li = 0; li < m.count(i); ++li) {
            CellRef lambda{i, li};
            // rhs chain over (k-1)-cells
            std::vector<i64> rhs(m.count(k - 1), 0);
            for (auto& [key, v] : u.vals)
                if (key.first.degree == k - 1 && key.second == lambda) rhs[key.first.index] += v;
            if (W.count(i + 1)) {
                i64 sgn = (k % 2 == 0) ? 1 : -1;
                for (auto& [key, v] : W[i + 1].vals) {
                    if (key.first.degree != k - 1) continue;
                    // coefficient of lambda in the coboundary row of key.second
                    for (auto& [sub, coef] : m.incidence[i + 1][key.second.index])
                        if (sub == li) rhs[key.first.index] += sgn * coef * v;
                }
            }
            auto w = solve_small(cs, rhs);
            if (!w)
                throw std::runtime_error("no solution: cup synthesis on " + rep_name +
                                         " x=" + std::to_string(x) + " c=" + std::to_string(c) +
                                         " at cell " + m.cells[i][li].id);
            for (int a = 0; a < m.count(k); ++a)
                if ((*w)[a]) W[i].add({k, a}, lambda, (*w)[a]);
        }
    }
    for (int i = ilo; i <= ihi; ++i) {
        if (seeded(i)) continue;
        CupEntry e{rep_name, x, c - i, i, std::move(W[i]), true};
        cat.put(std::move(e));
    }
    cat.mark_complete(rep_name, x, c);
    // defining equation re-checked post-solve
    Bichain res = recursion_residual(cat, rep_name, x, c);
    if (!res.is_zero())
        throw std::runtime_error("cup synthesis inconsistent on " + rep_name);
}

Bichain steenrod_simplex_formula(int a, int b, int x) {
    int c = a + b, n = c - x;
    if (n < 0 || x < 0) throw std::invalid_argument("steenrod: bad degrees");
    static const char* sn[4] = {"pt", "edge", "triangle", "tetrahedron"};
    if (n > 3) throw std::invalid_argument("steenrod: only simplices up to dimension 3 here");
    const CellComplex& m = rep_registry().get(sn[n]).complex;
    Bichain out;
    out.total_degree = c;
    // sequences 0 <= e0 < e1 < ... < e_x <= n, with e_{x+1} := n
    std::vector<int> e(x + 1);
    std::function<void(int, int)> rec = [&](int pos, int lo) {
        if (pos == x + 1) {
            // intervals I_0=[0,e0], I_j=[e_{j-1},e_j], I_{x+1}=[e_x,n]
            std::vector<std::pair<int, int>> iv;
            iv.push_back({0, e[0]});
            for (int j = 1; j <= x; ++j) iv.push_back({e[j - 1], e[j]});
            iv.push_back({e[x], n});
            std::string s0, s1;
            std::vector<int> order;  // interval indices in concatenation order
            for (int j = 0; j < (int)iv.size(); j += 2) {
                for (int v = iv[j].first; v <= iv[j].second; ++v) s0 += (char)('0' + v);
                order.push_back(j);
            }
            for (int j = 1; j < (int)iv.size(); j += 2) {
                for (int v = iv[j].first; v <= iv[j].second; ++v) s1 += (char)('0' + v);
                order.push_back(j);
            }
            // consecutive even (odd) intervals cannot share endpoints, so
            // s0 and s1 are genuine simplices of the stated sizes
            if ((int)s0.size() - 1 != a || (int)s1.size() - 1 != b) return;
            // sign: block permutation parity weighted by interval sizes
            i64 inv = 0;
            for (size_t p = 0; p < order.size(); ++p)
                for (size_t q = p + 1; q < order.size(); ++q)
                    if (order[p] > order[q])
                        inv += (i64)(iv[order[p]].second - iv[order[p]].first + 1) *
                               (iv[order[q]].second - iv[order[q]].first + 1);
            out.add(m.find(s0), m.find(s1), inv % 2 == 0 ? 1 : -1);
            return;
        }
        for (int v = lo; v <= n; ++v) { e[pos] = v; rec(pos + 1, v + 1); }
    };
    rec(0, 0);
    return out;
}

namespace {

void put_parsed(CupCatalog& cat, const std::string& rep, int x, int a, int b,
                const std::string& text) {
    const CellComplex& m = rep_registry().get(rep).complex;
    CupEntry e{rep, x, a, b, parse_bichain(m, a + b, text), false};
    cat.put(std::move(e));
}

void put_steenrod(CupCatalog& cat, const std::string& rep, int x, int c) {
    int n = c - x;
    for (int a = std::max(0, c - n); a <= std::min(n, c); ++a) {
        Bichain w = steenrod_simplex_formula(a, c - a, x);
        CupEntry e{rep, x, a, c - a, std::move(w), false};
        cat.put(std::move(e));
    }
    cat.mark_complete(rep, x, c);
}

} // namespace

const CupCatalog& builtin_catalog() {
    static CupCatalog cat = [] {
        CupCatalog c;
        // point
        synthesize_family(c, "pt", 0, 0);
        for (int x = 1; x <= 3; ++x) c.mark_complete("pt", x, x);
        // simplices via the closed formula (agrees with the listed entries)
        put_steenrod(c, "edge", 0, 1);
        put_steenrod(c, "edge", 1, 2);
        c.mark_complete("edge", 2, 3);
        c.mark_complete("edge", 3, 4);
        put_steenrod(c, "triangle", 0, 2);
        put_steenrod(c, "triangle", 1, 3);
        put_steenrod(c, "triangle", 2, 4);
        c.mark_complete("triangle", 3, 5);
        put_steenrod(c, "tetrahedron", 0, 3);
        put_steenrod(c, "tetrahedron", 1, 4);
        put_steenrod(c, "tetrahedron", 2, 5);
        // hypercubes, transcribed
        put_parsed(c, "square", 0, 0, 2, "00|xx");
        put_parsed(c, "square", 0, 1, 1, "x0|1x - 0x|x1");
        put_parsed(c, "square", 0, 2, 0, "xx|11");
        c.mark_complete("square", 0, 2);
        put_parsed(c, "square", 1, 1, 2, "-0x|xx - x1|xx");
        put_parsed(c, "square", 1, 2, 1, "xx|x0 + xx|1x");
        c.mark_complete("square", 1, 3);
        put_parsed(c, "square", 2, 2, 2, "xx|xx");
        c.mark_complete("square", 2, 4);
        put_parsed(c, "cube", 0, 0, 3, "000|xxx");
        put_parsed(c, "cube", 0, 1, 2, "x00|1xx - 0x0|x1x + 00x|xx1");
        put_parsed(c, "cube", 0, 2, 1, "xx0|11x - x0x|1x1 + 0xx|x11");
        put_parsed(c, "cube", 0, 3, 0, "xxx|111");
        c.mark_complete("cube", 0, 3);
        put_parsed(c, "cube", 1, 1, 3, "00x|xxx + 0x1|xxx + x11|xxx");
        put_parsed(c, "cube", 1, 2, 2,
                   "-xx1|x0x - x0x|1xx - xx1|1xx + 0xx|x1x + 0xx|xx0 + x1x|xx0");
        put_parsed(c, "cube", 1, 3, 1, "xxx|11x + xxx|1x0 + xxx|x00");
        c.mark_complete("cube", 1, 4);
        put_parsed(c, "cube", 2, 2, 3, "0xx|xxx + x1x|xxx + xx0|xxx");
        put_parsed(c, "cube", 2, 3, 2, "xxx|x0x + xxx|1xx + xxx|xx1");
        c.mark_complete("cube", 2, 5);
        // 2-gon
        put_parsed(c, "two_gon", 0, 0, 2, "0|f");
        put_parsed(c, "two_gon", 0, 2, 0, "f|1");
        c.mark_complete("two_gon", 0, 2);
        // modified cube: seed the vertex|volume component, staircase the rest
        put_parsed(c, "mod_cube", 0, 0, 3, "000|cc");
        synthesize_family(c, "mod_cube", 0, 3);
        return c;
    }();
    return cat;
}

void ensure_for_complex(CupCatalog& cat, const CellComplex& m, int x, int a, int b) {
    int d = a + b - x;
    auto& reg = rep_registry();
    if (d > m.dimension || d < 0) return;
    for (int i = 0; i < m.count(d); ++i) {
        const Cell& cell = m.cells[d][i];
        if (cell.rep < 0) throw std::runtime_error("cell without representative: " + cell.id);
        synthesize_family(cat, reg.get(cell.rep).name, x, a + b);
    }
}

void eval_cup_terms(int x, int a, int b, const CellComplex& m, const CupCatalog& cat,
                    const std::function<void(CellRef, CellRef, i64, CellRef)>& f) {
    int d = a + b - x;
    auto& reg = rep_registry();
    if (d > m.dimension || d < 0) return;
    for (int i = 0; i < m.count(d); ++i) {
        const Cell& cell = m.cells[d][i];
        const std::string& rn = reg.get(cell.rep).name;
        if (!cat.has_family(rn, x, a + b))
            throw std::runtime_error("missing cup catalog family: representative " + rn);
        auto* e = cat.find(rn, x, a, b);
        if (!e) continue;
        const CellComplex& sub = reg.get(cell.rep).complex;
        for (auto& [key, v] : e->w.vals) {
            CellRef ca = cell.corr.at(repdetail::flat_index(sub, key.first));
            CellRef cb = cell.corr.at(repdetail::flat_index(sub, key.second));
            f(ca, cb, v, {d, i});
        }
    }
}

ZChain eval_cup(const ZChain& A, const ZChain& B, int x, const CellComplex& m,
                const CupCatalog& cat) {
    // degrees inferred from the chain objects
    ZChain out;
    out.degree = A.degree + B.degree - x;
    eval_cup_terms(x, A.degree, B.degree, m, cat,
                   [&](CellRef a, CellRef b, i64 coef, CellRef g) {
                       if (a.degree != A.degree || b.degree != B.degree) return;
                       i64 va = A.get(a.index), vb = B.get(b.index);
                       if (va && vb) out.add(g.index, coef * va * vb);
                   });
    return out;
}

std::string catalog_to_json(const CupCatalog& cat) {
    nlohmann::json j = nlohmann::json::array();
    auto& reg = rep_registry();
    for (auto& [key, e] : cat.entries) {
        nlohmann::json je;
        je["representative"] = e.rep;
        je["x"] = e.x;
        je["degrees"] = {e.a, e.b};
        je["provenance"] = e.synthesized ? "synthesized" : "paper_formula";
        auto terms = nlohmann::json::array();
        const CellComplex& m = reg.get(e.rep).complex;
        for (auto& [k, v] : e.w.vals) {
            nlohmann::json t;
            t["first_cell"] = m.cell(k.first).id;
            t["second_cell"] = m.cell(k.second).id;
            t["coefficient"] = v;
            terms.push_back(t);
        }
        je["terms"] = terms;
        j.push_back(je);
    }
    nlohmann::json root;
    root["schema_version"] = 1;
    root["entries"] = j;
    return root.dump(1);
}

CupCatalog catalog_from_json(const std::string& text) {
    nlohmann::json root = nlohmann::json::parse(text);
    CupCatalog cat;
    auto& reg = rep_registry();
    std::set<std::tuple<std::string, int, int>> fams;
    for (auto& je : root.at("entries")) {
        CupEntry e;
        e.rep = je.at("representative").get<std::string>();
        e.x = je.at("x").get<int>();
        e.a = je.at("degrees")[0].get<int>();
        e.b = je.at("degrees")[1].get<int>();
        e.synthesized = je.value("provenance", "paper_formula") == std::string("synthesized");
        e.w.total_degree = e.a + e.b;
        const CellComplex& m = reg.get(e.rep).complex;
        for (auto& t : je.at("terms"))
            e.w.add(m.find(t.at("first_cell").get<std::string>()),
                    m.find(t.at("second_cell").get<std::string>()),
                    t.at("coefficient").get<i64>());
        fams.insert({e.rep, e.x, e.a + e.b});
        cat.put(std::move(e));
    }
    for (auto& [r, x, c] : fams) cat.mark_complete(r, x, c);
    return cat;
}

} // namespace tqdw
