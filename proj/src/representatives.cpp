#include "tqdw/cellcomplex.hpp"

#include <algorithm>
#include <functional>

namespace tqdw {

namespace {

// Finalize a representative complex: the top cell's incidence row (its
// orientation sigma) is supplied explicitly; everything below derives from
// previously registered representatives.
void finalize_rep(Representative& rep, const RepRegistry& reg,
                  const std::vector<std::pair<std::string, i64>>& top_row) {
    CellComplex& c = rep.complex;
    c.dimension = rep.top_degree;
    c.incidence.assign(c.cells.size(), {});
    for (int d = 1; d < (int)c.cells.size(); ++d) c.incidence[d].resize(c.cells[d].size());

    for (int d = 1; d < rep.top_degree; ++d) {
        for (int i = 0; i < (int)c.cells[d].size(); ++i) {
            const Cell& cell = c.cells[d][i];
            const Representative& sub = reg.get(cell.rep);
            std::map<int, i64> row;
            for (auto& [s, coef] : sub.complex.incidence[d][sub.top().index]) {
                CellRef here = cell.corr.at(repdetail::flat_index(sub.complex, CellRef{d - 1, s}));
                row[here.index] += coef;
            }
            for (auto& [idx, coef] : row)
                if (coef) c.incidence[d][i].push_back({idx, coef});
        }
    }
    std::map<int, i64> top;
    for (auto& [id, coef] : top_row) top[c.find(id).index] += coef;
    for (auto& [idx, coef] : top)
        if (coef) c.incidence[rep.top_degree][0].push_back({idx, coef});

    c.cofaces.assign(c.cells.size(), {});
    for (int d = 0; d + 1 < (int)c.cells.size(); ++d) c.cofaces[d].resize(c.cells[d].size());
    for (int d = 1; d < (int)c.cells.size(); ++d)
        for (int i = 0; i < (int)c.cells[d].size(); ++i)
            for (auto& [sub, coef] : c.incidence[d][i]) c.cofaces[d - 1][sub].push_back({i, coef});
    c.top_orientation.assign(1, 1);

    for (int d = 2; d < (int)c.cells.size(); ++d)
        for (int i = 0; i < (int)c.cells[d].size(); ++i) {
            std::map<int, i64> acc;
            for (auto& [sub, coef] : c.incidence[d][i])
                for (auto& [s2, c2] : c.incidence[d - 1][sub]) acc[s2] += coef * c2;
            for (auto& [k, v] : acc)
                if (v) throw std::logic_error("rep " + rep.name + ": delta^2 != 0 at " +
                                              c.cells[d][i].id);
        }
}

// corr vector sized for the sub-representative, filled by id lookup
std::vector<CellRef> corr_by_ids(const CellComplex& owner, const Representative& sub,
                                 const std::vector<std::string>& ids) {
    auto flat = repdetail::flat_cells(sub.complex);
    if (flat.size() != ids.size())
        throw std::logic_error("corr size mismatch for rep " + sub.name);
    std::vector<CellRef> out;
    for (auto& id : ids) out.push_back(owner.find(id));
    return out;
}

// -------- simplices --------
// cells are ordered vertex strings like "013"; orientation of the facet
// dropping vertex i is (-1)^i

std::vector<std::string> subsets_of(const std::string& verts, int size) {
    std::vector<std::string> out;
    int n = (int)verts.size();
    std::function<void(int, std::string)> go = [&](int i, std::string cur) {
        if ((int)cur.size() == size) { out.push_back(cur); return; }
        if (i >= n) return;
        go(i + 1, cur + verts[i]);
        go(i + 1, cur);
    };
    go(0, "");
    return out;
}

Representative make_simplex_rep(const RepRegistry& reg, int d, const std::string& name) {
    Representative rep;
    rep.name = name;
    rep.top_degree = d;
    CellComplex& c = rep.complex;
    std::string all;
    for (int i = 0; i <= d; ++i) all += (char)('0' + i);
    for (int k = 0; k <= d; ++k)
        for (auto& s : subsets_of(all, k + 1)) {
            Cell cell;
            cell.id = s;
            cell.role = "s" + std::to_string(k);
            c.add_cell(k, std::move(cell));
        }
    static const char* subnames[4] = {"pt", "edge", "triangle", "tetrahedron"};
    for (int k = 1; k <= d; ++k) {
        bool top = (k == d);
        for (auto& cellmut : c.cells[k]) {
            if (top) { cellmut.rep = -2; continue; }  // patched after registration
            const std::string s = cellmut.id;
            const Representative& sub = reg.get(subnames[k]);
            // rep subcells are position subsets; map position digits to vertices of s
            std::vector<std::string> ids;
            for (auto ref : repdetail::flat_cells(sub.complex)) {
                std::string posid = sub.complex.cell(ref).id;
                std::string mapped;
                for (char p : posid) mapped += s[p - '0'];
                ids.push_back(mapped);
            }
            cellmut.rep = reg.by_name.at(subnames[k]);
            cellmut.corr = corr_by_ids(c, sub, ids);
        }
    }
    std::vector<std::pair<std::string, i64>> top_row;
    for (int i = 0; i <= d; ++i) {
        std::string facet = all;
        facet.erase(facet.begin() + i);
        top_row.push_back({facet, (i % 2 == 0) ? 1 : -1});
    }
    finalize_rep(rep, reg, top_row);
    return rep;
}

// -------- hypercubes --------
// cells are strings over {0,1,x}^d; sigma(x^i j x^(d-i-1)) = i+1+j mod 2

std::vector<std::string> cube_labels(int d, int degree) {
    std::vector<std::string> out;
    std::function<void(std::string, int)> go = [&](std::string cur, int nx) {
        if ((int)cur.size() == d) {
            if (nx == degree) out.push_back(cur);
            return;
        }
        go(cur + '0', nx);
        go(cur + '1', nx);
        go(cur + 'x', nx + 1);
    };
    go("", 0);
    return out;
}

Representative make_cube_rep(const RepRegistry& reg, int d, const std::string& name) {
    Representative rep;
    rep.name = name;
    rep.top_degree = d;
    CellComplex& c = rep.complex;
    for (int k = 0; k <= d; ++k)
        for (auto& s : cube_labels(d, k)) {
            Cell cell;
            cell.id = s;
            cell.role = "q" + std::to_string(k);
            c.add_cell(k, std::move(cell));
        }
    static const char* subnames[4] = {"pt", "edge", "square", "cube"};
    for (int k = 1; k <= d; ++k) {
        bool top = (k == d);
        for (auto& cellmut : c.cells[k]) {
            const std::string s = cellmut.id;
            if (top) { cellmut.rep = -2; continue; }
            const Representative& sub = reg.get(subnames[k]);
            std::vector<std::string> ids;
            for (auto ref : repdetail::flat_cells(sub.complex)) {
                // sub-rep labels over {0,1,x}^k; the shared edge rep uses
                // simplex ids, so its top cell reads "x"
                std::string sublabel = sub.complex.cell(ref).id;
                if (k == 1 && ref.degree == 1) sublabel = "x";
                std::string mapped = s;
                int xi = 0;
                for (auto& ch : mapped)
                    if (ch == 'x') ch = sublabel[xi++];
                ids.push_back(mapped);
            }
            cellmut.rep = reg.by_name.at(subnames[k]);
            cellmut.corr = corr_by_ids(c, sub, ids);
        }
    }
    std::vector<std::pair<std::string, i64>> top_row;
    std::string allx(d, 'x');
    for (int i = 0; i < d; ++i)
        for (int j = 0; j <= 1; ++j) {
            std::string facet = allx;
            facet[i] = (char)('0' + j);
            int sigma = (i + 1 + j) % 2;
            top_row.push_back({facet, sigma == 0 ? 1 : -1});
        }
    finalize_rep(rep, reg, top_row);
    return rep;
}

Representative make_point_rep() {
    Representative rep;
    rep.name = "pt";
    rep.top_degree = 0;
    Cell v;
    v.id = "0";
    v.role = "v";
    rep.complex.add_cell(0, std::move(v));
    rep.complex.dimension = 0;
    rep.complex.incidence.assign(1, {});
    rep.complex.cofaces.assign(1, {{}});
    rep.complex.top_orientation.assign(1, 1);
    return rep;
}

Representative make_edge_rep(const RepRegistry& reg) {
    Representative rep;
    rep.name = "edge";
    rep.top_degree = 1;
    CellComplex& c = rep.complex;
    for (auto id : {"0", "1"}) {
        Cell v;
        v.id = id;
        v.role = "v";
        c.add_cell(0, std::move(v));
    }
    Cell e;
    e.id = "01";
    e.role = "e";
    e.rep = -2;
    c.add_cell(1, std::move(e));
    finalize_rep(rep, reg, {{"1", 1}, {"0", -1}});
    return rep;
}

// 2-gon: two vertices, two parallel edges "e-" and "e+", one face.
// The "-" edge is positively oriented inside the face.
Representative make_two_gon_rep(const RepRegistry& reg) {
    Representative rep;
    rep.name = "two_gon";
    rep.top_degree = 2;
    CellComplex& c = rep.complex;
    for (auto id : {"0", "1"}) {
        Cell v;
        v.id = id;
        v.role = "v";
        c.add_cell(0, std::move(v));
    }
    const Representative& edge = reg.get("edge");
    for (auto id : {"e-", "e+"}) {
        Cell e;
        e.id = id;
        e.role = "e";
        e.rep = reg.by_name.at("edge");
        c.add_cell(1, std::move(e));
    }
    for (auto id : {"e-", "e+"})
        c.cells[1][c.find(id).index].corr = corr_by_ids(c, edge, {"0", "1", id});
    Cell f;
    f.id = "f";
    f.role = "f";
    f.rep = -2;
    c.add_cell(2, std::move(f));
    finalize_rep(rep, reg, {{"e+", 1}, {"e-", -1}});
    return rep;
}

// Modified cube (Floquet lattice 3-cell): vertices {0,1}^3 over axes
// x,y,z; the six edges at 000 and 111 are doubled with a 2-gon between the
// copies, the other six have a single copy; faces are three squares at the
// origin corner and three at the far corner plus the six 2-gons.
//
// Copy conventions per axis a with cyclic next(x)=y, next(y)=z, next(z)=x:
//   face in plane (a, next(a)) based at v contains  a+ @ v,  a+ @ v+next,
//   next- @ v, next+ @ v+a.  Single-copy edges inside the cube follow the
//   same rule. Orientations are Z3 symmetric around the 111 axis.
struct MC {
    static int axis_next(int a) { return (a + 1) % 3; }

    static std::string vid(int x, int y, int z) {
        return std::string() + (char)('0' + x) + (char)('0' + y) + (char)('0' + z);
    }
    static std::array<int, 3> unit(int a) {
        std::array<int, 3> u{0, 0, 0};
        u[a] = 1;
        return u;
    }
    // edge id: axis a, base v, copy c in {'-','+'} or 's' for single
    static std::string eid(int a, std::array<int, 3> v, char copy) {
        static const char* an = "xyz";
        return std::string("e") + an[a] + copy + vid(v[0], v[1], v[2]);
    }
    static std::string gid(int a, std::array<int, 3> v) {
        static const char* an = "xyz";
        return std::string("g") + an[a] + vid(v[0], v[1], v[2]);
    }
    static std::string fid(int a, std::array<int, 3> v) {
        static const char* an = "xyz";
        return std::string("f") + an[a] + vid(v[0], v[1], v[2]);  // plane (a, next(a))
    }
};

Representative make_mod_cube_rep(const RepRegistry& reg) {
    Representative rep;
    rep.name = "mod_cube";
    rep.top_degree = 3;
    CellComplex& c = rep.complex;
    for (int x = 0; x <= 1; ++x)
        for (int y = 0; y <= 1; ++y)
            for (int z = 0; z <= 1; ++z) {
                Cell v;
                v.id = MC::vid(x, y, z);
                v.role = "v";
                c.add_cell(0, std::move(v));
            }
    const Representative& edge = reg.get("edge");
    int edge_rep = reg.by_name.at("edge");
    // which copies exist in the cube: both at 000 and at the three edges
    // adjacent to 111; single copies elsewhere, sign set by the rule:
    // displaced along next(a): '+', displaced along prev(a): '-'
    auto add_edge = [&](int a, std::array<int, 3> v, char copy) {
        std::array<int, 3> w = v;
        w[a] += 1;
        Cell e;
        e.id = MC::eid(a, v, copy);
        e.role = "e";
        e.rep = edge_rep;
        std::string id = e.id;
        c.add_cell(1, std::move(e));
        c.cells[1][c.find(id).index].corr = corr_by_ids(
            c, edge, {MC::vid(v[0], v[1], v[2]), MC::vid(w[0], w[1], w[2]), id});
    };
    for (int a = 0; a < 3; ++a) {
        std::array<int, 3> o{0, 0, 0};
        add_edge(a, o, '-');
        add_edge(a, o, '+');
        std::array<int, 3> far{1, 1, 1};
        far[a] = 0;  // base of the doubled edge ending at 111
        add_edge(a, far, '-');
        add_edge(a, far, '+');
        // single copies: displaced by next(a) -> '+', by prev(a) -> '-'
        std::array<int, 3> dn = MC::unit(MC::axis_next(a));
        std::array<int, 3> dp = MC::unit(MC::axis_next(MC::axis_next(a)));
        add_edge(a, dn, '+');
        add_edge(a, dp, '-');
    }
    // 2-gons on the six doubled edges
    const Representative& tg = reg.get("two_gon");
    int tg_rep = reg.by_name.at("two_gon");
    auto add_gon = [&](int a, std::array<int, 3> v) {
        std::array<int, 3> w = v;
        w[a] += 1;
        Cell g;
        g.id = MC::gid(a, v);
        g.role = "g";
        g.rep = tg_rep;
        std::string id = g.id;
        c.add_cell(2, std::move(g));
        c.cells[2][c.find(id).index].corr = corr_by_ids(
            c, tg, {MC::vid(v[0], v[1], v[2]), MC::vid(w[0], w[1], w[2]), MC::eid(a, v, '-'),
                    MC::eid(a, v, '+'), id});
    };
    for (int a = 0; a < 3; ++a) {
        std::array<int, 3> o{0, 0, 0};
        add_gon(a, o);
        std::array<int, 3> far{1, 1, 1};
        far[a] = 0;
        add_gon(a, far);
    }
    // squares in plane (a, b=next(a)) at the origin corner and far corner
    const Representative& sq = reg.get("square");
    int sq_rep = reg.by_name.at("square");
    // slot copies making delta^2 vanish together with delta(2-gon) = e+ - e-:
    //   x0: a- @ v    x1: a+ @ v+b    0x: b+ @ v    1x: b- @ v+a
    auto edge_copy_in_face = [&](int a, int b, std::array<int, 3> base,
                                 bool a_axis, int offset) -> std::string {
        int ax = a_axis ? a : b;
        std::array<int, 3> v = base;
        if (offset) v[a_axis ? b : a] += 1;
        char copy;
        if (a_axis)
            copy = offset == 0 ? '-' : '+';
        else
            copy = offset == 0 ? '+' : '-';
        return MC::eid(ax, v, copy);
    };
    auto add_face = [&](int a, std::array<int, 3> base) {
        int b = MC::axis_next(a);
        std::array<int, 3> va = base, vb = base, vab = base;
        va[a] += 1;
        vb[b] += 1;
        vab[a] += 1;
        vab[b] += 1;
        // square rep flat order: 00, 01, 10, 11, 0x, 1x, x0, x1, xx
        // with label positions (x0,x1) = (a,b)
        Cell f;
        f.id = MC::fid(a, base);
        f.role = "f";
        f.rep = sq_rep;
        std::string id = f.id;
        c.add_cell(2, std::move(f));
        std::vector<std::string> ids = {
            MC::vid(base[0], base[1], base[2]), MC::vid(vb[0], vb[1], vb[2]),
            MC::vid(va[0], va[1], va[2]), MC::vid(vab[0], vab[1], vab[2]),
            edge_copy_in_face(a, b, base, false, 0),  // 0x: b edge at a=0
            edge_copy_in_face(a, b, base, false, 1),  // 1x: b edge at a=1
            edge_copy_in_face(a, b, base, true, 0),   // x0: a edge at b=0
            edge_copy_in_face(a, b, base, true, 1),   // x1: a edge at b=1
            id};
        c.cells[2][c.find(id).index].corr = corr_by_ids(c, sq, ids);
    };
    for (int a = 0; a < 3; ++a) {
        std::array<int, 3> o{0, 0, 0};
        add_face(a, o);
        std::array<int, 3> far = o;
        far[MC::axis_next(MC::axis_next(a))] = 1;  // opposite face along prev axis
        add_face(a, far);
    }
    Cell top;
    top.id = "cc";
    top.role = "cc";
    top.rep = -2;
    c.add_cell(3, std::move(top));
    std::vector<std::pair<std::string, i64>> row;
    for (int a = 0; a < 3; ++a) {
        std::array<int, 3> o{0, 0, 0};
        std::array<int, 3> farf = o;
        farf[MC::axis_next(MC::axis_next(a))] = 1;
        row.push_back({MC::fid(a, o), 1});
        row.push_back({MC::fid(a, farf), -1});
        std::array<int, 3> farg{1, 1, 1};
        farg[a] = 0;
        row.push_back({MC::gid(a, o), 1});
        row.push_back({MC::gid(a, farg), -1});
    }
    finalize_rep(rep, reg, row);
    return rep;
}

// Triangulated sheared cube: the plain cube with the four t-like quads
// split by diagonal edges. Vertex labels {0,1}^3 over the sheared axes.
Representative make_sheared_cube_tri_rep(const RepRegistry& reg) {
    Representative rep;
    rep.name = "sheared_cube_tri";
    rep.top_degree = 3;
    CellComplex& c = rep.complex;
    for (auto& s : cube_labels(3, 0)) {
        Cell v;
        v.id = s;
        v.role = "v";
        c.add_cell(0, std::move(v));
    }
    const Representative& edge = reg.get("edge");
    int edge_rep = reg.by_name.at("edge");
    auto add_edge = [&](const std::string& id, const std::string& v0, const std::string& v1) {
        Cell e;
        e.id = id;
        e.role = "e";
        e.rep = edge_rep;
        c.add_cell(1, std::move(e));
        c.cells[1][c.find(id).index].corr = corr_by_ids(c, edge, {v0, v1, id});
    };
    for (auto& s : cube_labels(3, 1)) {
        std::string v0 = s, v1 = s;
        for (auto& ch : v0)
            if (ch == 'x') ch = '0';
        for (auto& ch : v1)
            if (ch == 'x') ch = '1';
        add_edge(s, v0, v1);
    }
    // diagonals: dgx in the x0-x2 quads (from low corner to x0+x2), dgy in
    // the x1-x2 quads (from x2 corner to x1 corner)
    add_edge("dgx0", "000", "101");
    add_edge("dgx1", "010", "111");
    add_edge("dgy0", "001", "010");
    add_edge("dgy1", "101", "110");
    const Representative& tri = reg.get("triangle");
    const Representative& sq = reg.get("square");
    int tri_rep = reg.by_name.at("triangle");
    int sq_rep = reg.by_name.at("square");
    auto add_tri = [&](const std::string& id, std::array<std::string, 3> v,
                       std::array<std::string, 3> e01_02_12) {
        Cell f;
        f.id = id;
        f.role = "tri";
        f.rep = tri_rep;
        c.add_cell(2, std::move(f));
        c.cells[2][c.find(id).index].corr = corr_by_ids(
            c, tri, {v[0], v[1], v[2], e01_02_12[0], e01_02_12[1], e01_02_12[2], id});
    };
    // x0-x2 quad at x1=0 (facet "x0x"): lower tri (tri2 style) and upper (tri1 style)
    add_tri("xt0_lo", {"000", "001", "101"}, {"00x", "dgx0", "x01"});
    add_tri("xt0_hi", {"000", "100", "101"}, {"x00", "dgx0", "10x"});
    add_tri("xt1_lo", {"010", "011", "111"}, {"01x", "dgx1", "x11"});
    add_tri("xt1_hi", {"010", "110", "111"}, {"x10", "dgx1", "11x"});
    // x1-x2 quad at x0=0 (facet "0xx"): tri4 style {000,001,010}, tri3 {001,010,011}
    add_tri("yt0_lo", {"000", "001", "010"}, {"00x", "0x0", "dgy0"});
    add_tri("yt0_hi", {"001", "010", "011"}, {"dgy0", "0x1", "01x"});
    add_tri("yt1_lo", {"100", "101", "110"}, {"10x", "1x0", "dgy1"});
    add_tri("yt1_hi", {"101", "110", "111"}, {"dgy1", "1x1", "11x"});
    auto add_sq = [&](const std::string& id, std::vector<std::string> ids) {
        Cell f;
        f.id = id;
        f.role = "b";
        f.rep = sq_rep;
        c.add_cell(2, std::move(f));
        ids.push_back(id);
        c.cells[2][c.find(id).index].corr = corr_by_ids(c, sq, ids);
    };
    // b-quads: axes (x0,x1); "bq0" at x2=0, "bq1" at x2=1
    // square rep flat order: 00, 01, 10, 11, 0x, 1x, x0, x1
    add_sq("bq0", {"000", "010", "100", "110", "0x0", "1x0", "x00", "x10"});
    add_sq("bq1", {"001", "011", "101", "111", "0x1", "1x1", "x01", "x11"});
    Cell top;
    top.id = "cc";
    top.role = "cc";
    top.rep = -2;
    c.add_cell(3, std::move(top));
    // from the plain cube: +1xx -0xx +x0x -x1x -xx0 +xx1, quads split as
    // quad = (tri1-style) - (tri2-style)  resp.  (tri3) - (tri4)
    finalize_rep(rep, reg,
                 {{"yt1_hi", 1}, {"yt1_lo", -1},   // +1xx
                  {"yt0_hi", -1}, {"yt0_lo", 1},   // -0xx
                  {"xt0_hi", 1}, {"xt0_lo", -1},   // +x0x
                  {"xt1_hi", -1}, {"xt1_lo", 1},   // -x1x
                  {"bq0", -1}, {"bq1", 1}});
    return rep;
}

} // namespace

RepRegistry& rep_registry() {
    static RepRegistry reg = [] {
        RepRegistry r;
        r.add(make_point_rep());
        {
            Representative e = make_edge_rep(r);
            int id = r.add(std::move(e));
            r.reps[id].complex.cells[1][0].rep = id;
        }
        for (int d = 2; d <= 3; ++d) {
            static const char* sn[4] = {"", "", "triangle", "tetrahedron"};
            Representative s = make_simplex_rep(r, d, sn[d]);
            int id = r.add(std::move(s));
            r.reps[id].complex.cells[d][0].rep = id;
        }
        for (int d = 2; d <= 3; ++d) {
            static const char* cn[4] = {"", "", "square", "cube"};
            Representative s = make_cube_rep(r, d, cn[d]);
            int id = r.add(std::move(s));
            r.reps[id].complex.cells[d][0].rep = id;
        }
        {
            Representative g = make_two_gon_rep(r);
            int id = r.add(std::move(g));
            r.reps[id].complex.cells[2][0].rep = id;
        }
        {
            Representative m = make_mod_cube_rep(r);
            int id = r.add(std::move(m));
            r.reps[id].complex.cells[3][0].rep = id;
        }
        {
            Representative s = make_sheared_cube_tri_rep(r);
            int id = r.add(std::move(s));
            r.reps[id].complex.cells[3][0].rep = id;
        }
        return r;
    }();
    return reg;
}

} // namespace tqdw
