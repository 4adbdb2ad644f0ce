#include "tqdw/builders.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace tqdw {

namespace {

using V3 = std::array<int, 3>;

V3 operator+(V3 a, V3 b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
V3 operator-(V3 a, V3 b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

std::string coord_id(const std::string& role, V3 c) {
    std::ostringstream os;
    os << role << "(" << c[0] << "," << c[1] << "," << c[2] << ")";
    return os.str();
}

struct Grid {
    V3 sizes;
    std::array<bool, 3> periodic;

    V3 wrap(V3 c) const {
        for (int i = 0; i < 3; ++i)
            if (periodic[i]) {
                c[i] %= sizes[i];
                if (c[i] < 0) c[i] += sizes[i];
            }
        return c;
    }
    bool vertex_ok(V3 c) const {
        for (int i = 0; i < 3; ++i)
            if (!periodic[i] && (c[i] < 0 || c[i] > sizes[i])) return false;
        return true;
    }
    std::vector<V3> vertices() const {
        std::vector<V3> out;
        for (int x = 0; x <= (periodic[0] ? sizes[0] - 1 : sizes[0]); ++x)
            for (int y = 0; y <= (periodic[1] ? sizes[1] - 1 : sizes[1]); ++y)
                for (int z = 0; z <= (periodic[2] ? sizes[2] - 1 : sizes[2]); ++z)
                    out.push_back({x, y, z});
        return out;
    }
};

// Generic hypercubic lattice over representative axes axis_vec[0..2],
// grid coordinates are the paper's (x,y,t)-style coordinates.
struct HyperSpec {
    std::array<V3, 3> axis_vec;
    std::array<std::string, 3> edge_role;
    std::map<std::vector<int>, std::string> face_role;  // spanned axis set
    std::string cube_role;
    std::map<std::string, V3> label_offset;  // label = base - offset

    V3 offset_of(const std::string& role) const {
        auto it = label_offset.find(role);
        return it == label_offset.end() ? V3{0, 0, 0} : it->second;
    }
};

CellComplex build_hypercubic(const HyperSpec& spec, const Grid& grid) {
    auto& reg = rep_registry();
    CellComplex m;
    m.dimension = 3;
    auto add = [&](int degree, const std::string& role, V3 base, int rep,
                   std::vector<CellRef> corr) {
        Cell c;
        V3 lbl = grid.wrap(base - spec.offset_of(role));
        c.id = coord_id(role, lbl);
        c.role = role;
        c.at = lbl;
        c.rep = rep;
        c.corr = std::move(corr);
        m.add_cell(degree, std::move(c));
    };
    auto vid = [&](V3 c) { return coord_id("v", grid.wrap(c)); };

    for (V3 v : grid.vertices()) add(0, "v", v, -1, {});

    auto cell_ok = [&](V3 base, const std::vector<int>& span) {
        std::function<bool(V3, size_t)> go = [&](V3 v, size_t i) -> bool {
            if (!grid.vertex_ok(v)) return false;
            if (i == span.size()) return true;
            return go(v, i + 1) && go(v + spec.axis_vec[span[i]], i + 1);
        };
        return go(base, 0);
    };
    // corr for a sub-hypercube spanned by `span` (rep axes in order):
    // rep cells are {0,1,x}^k labels; map to lattice cells
    auto cube_corr = [&](V3 base, const std::vector<int>& span) {
        int k = (int)span.size();
        static const char* repname[4] = {"pt", "edge", "square", "cube"};
        const Representative& rep = reg.get(repname[k]);
        std::vector<CellRef> corr;
        for (auto ref : repdetail::flat_cells(rep.complex)) {
            std::string lab = k == 0 ? std::string("") : rep.complex.cell(ref).id;
            if (k == 1 && ref.degree == 0) lab = rep.complex.cell(ref).id;  // "0"/"1"
            if (k == 1 && ref.degree == 1) lab = "x";
            V3 pos = base;
            std::vector<int> subspan;
            for (int i = 0; i < k; ++i) {
                char ch = lab[i];
                if (ch == '1') pos = pos + spec.axis_vec[span[i]];
                if (ch == 'x') subspan.push_back(span[i]);
            }
            std::string role;
            if (subspan.empty())
                role = "v";
            else if (subspan.size() == 1)
                role = spec.edge_role[subspan[0]];
            else if (subspan.size() == 2)
                role = spec.face_role.at(subspan);
            else
                role = spec.cube_role;
            corr.push_back(m.find(coord_id(role, grid.wrap(pos - spec.offset_of(role)))));
        }
        return corr;
    };

    for (int a = 0; a < 3; ++a)
        for (V3 v : grid.vertices())
            if (cell_ok(v, {a}))
                add(1, spec.edge_role[a], v, reg.id("edge"), {});
    for (auto& [span, role] : spec.face_role)
        for (V3 v : grid.vertices())
            if (cell_ok(v, span)) add(2, role, v, reg.id("square"), {});
    for (V3 v : grid.vertices())
        if (cell_ok(v, {0, 1, 2})) add(3, spec.cube_role, v, reg.id("cube"), {});

    // second pass: correspondences (need all ids present)
    for (int a = 0; a < 3; ++a)
        for (V3 v : grid.vertices())
            if (cell_ok(v, {a})) {
                CellRef r = m.find(coord_id(spec.edge_role[a],
                                            grid.wrap(v - spec.offset_of(spec.edge_role[a]))));
                m.cells[1][r.index].corr = cube_corr(v, {a});
            }
    for (auto& [span, role] : spec.face_role)
        for (V3 v : grid.vertices())
            if (cell_ok(v, span)) {
                CellRef r = m.find(coord_id(role, grid.wrap(v - spec.offset_of(role))));
                m.cells[2][r.index].corr = cube_corr(v, span);
            }
    for (V3 v : grid.vertices())
        if (cell_ok(v, {0, 1, 2})) {
            CellRef r = m.find(coord_id(spec.cube_role,
                                        grid.wrap(v - spec.offset_of(spec.cube_role))));
            m.cells[3][r.index].corr = cube_corr(v, {0, 1, 2});
        }
    (void)vid;
    m.finalize(reg);
    return m;
}

} // namespace

CellComplex build_cubic(int lx, int ly, int lz, std::array<bool, 3> periodic) {
    HyperSpec spec;
    // representative axes in the order (x, z, y)
    spec.axis_vec = {V3{1, 0, 0}, V3{0, 0, 1}, V3{0, 1, 0}};
    spec.edge_role = {"ex", "ez", "ey"};
    spec.face_role[{0, 1}] = "by";  // spans x,z
    spec.face_role[{0, 2}] = "bz";  // spans x,y
    spec.face_role[{1, 2}] = "bx";  // spans z,y
    spec.cube_role = "cc";
    Grid grid{{lx, ly, lz}, periodic};
    CellComplex m = build_hypercubic(spec, grid);
    m.metadata["lattice"] = "cubic";
    m.metadata["axes"] = "x,z,y";
    return m;
}

CellComplex build_sheared_plain(int l, int lt, std::array<bool, 3> periodic) {
    HyperSpec spec;
    // x0 = t-x, x1 = y, x2 = -t on the (x,y,t) grid
    spec.axis_vec = {V3{-1, 0, 1}, V3{0, 1, 0}, V3{0, 0, -1}};
    spec.edge_role = {"dx", "y", "t"};
    spec.face_role[{0, 1}] = "b";
    spec.face_role[{0, 2}] = "fxt";
    spec.face_role[{1, 2}] = "fyt";
    spec.cube_role = "cc";
    spec.label_offset["dx"] = {1, 0, 0};
    spec.label_offset["t"] = {0, 0, 1};
    spec.label_offset["b"] = {1, 0, 0};
    spec.label_offset["fxt"] = {1, 0, 1};
    spec.label_offset["fyt"] = {0, 0, 1};
    spec.label_offset["cc"] = {1, 0, 1};
    Grid grid{{l, l, lt}, periodic};
    CellComplex m = build_hypercubic(spec, grid);
    m.metadata["lattice"] = "sheared_plain";
    m.metadata["axes"] = "t-x,y,-t";
    return m;
}

CellComplex build_sheared(int l, int lt, bool with_diagonals, std::array<bool, 3> periodic) {
    if (!with_diagonals) return build_sheared_plain(l, lt, periodic);
    auto& reg = rep_registry();
    CellComplex m;
    m.dimension = 3;
    Grid grid{{l, l, lt}, periodic};
    auto vid = [&](V3 c) { return coord_id("v", grid.wrap(c)); };
    auto cid = [&](const std::string& role, V3 c) { return coord_id(role, grid.wrap(c)); };
    auto add = [&](int degree, const std::string& role, V3 label, int rep) {
        Cell c;
        c.id = cid(role, label);
        c.role = role;
        c.at = grid.wrap(label);
        c.rep = rep;
        m.add_cell(degree, std::move(c));
    };
    auto all_ok = [&](std::initializer_list<V3> vs) {
        for (auto v : vs)
            if (!grid.vertex_ok(v)) return false;
        return true;
    };

    for (V3 v : grid.vertices()) add(0, "v", v, -1);
    int edge_rep = reg.id("edge");
    int tri_rep = reg.id("triangle");
    int sq_rep = reg.id("square");
    int cube_rep = reg.id("sheared_cube_tri");

    // edge endpoints in (x,y,t); label (i,j,t)
    auto edge_ends = [&](const std::string& role, V3 c) -> std::pair<V3, V3> {
        int i = c[0], j = c[1], t = c[2];
        if (role == "dx") return {{i + 1, j, t}, {i, j, t + 1}};
        if (role == "y") return {{i, j, t}, {i, j + 1, t}};
        if (role == "t") return {{i, j, t + 1}, {i, j, t}};
        if (role == "x") return {{i + 1, j, t}, {i, j, t}};
        return {{i, j, t}, {i, j + 1, t + 1}};  // dy
    };
    for (auto role : {"dx", "y", "t", "x", "dy"})
        for (V3 v : grid.vertices()) {
            auto [a, b] = edge_ends(role, v);
            if (all_ok({a, b})) add(1, role, v, edge_rep);
        }
    for (auto role : {"dx", "y", "t", "x", "dy"})
        for (V3 v : grid.vertices()) {
            auto [a, b] = edge_ends(role, v);
            if (!all_ok({a, b})) continue;
            auto& cell = m.cells[1][m.find(cid(role, v)).index];
            cell.corr = {m.find(vid(a)), m.find(vid(b)), m.find(cell.id)};
        }

    // triangles tri1..tri4 and b-faces, labels per unit cell (i,j,t)
    struct TriDef {
        const char* role;
        std::array<V3, 3> verts;                       // relative to (i,j,t)
        std::array<std::pair<const char*, V3>, 3> edges;  // e01, e02, e12 with labels
    };
    const std::vector<TriDef> tris = {
        {"tri1", {V3{1, 0, 0}, V3{0, 0, 1}, V3{0, 0, 0}},
         {{{"dx", {0, 0, 0}}, {"x", {0, 0, 0}}, {"t", {0, 0, 0}}}}},
        {"tri2", {V3{1, 0, 1}, V3{1, 0, 0}, V3{0, 0, 1}},
         {{{"t", {1, 0, 0}}, {"x", {0, 0, 1}}, {"dx", {0, 0, 0}}}}},
        {"tri3", {V3{0, 0, 0}, V3{0, 1, 1}, V3{0, 1, 0}},
         {{{"dy", {0, 0, 0}}, {"y", {0, 0, 0}}, {"t", {0, 1, 0}}}}},
        {"tri4", {V3{0, 0, 1}, V3{0, 0, 0}, V3{0, 1, 1}},
         {{{"t", {0, 0, 0}}, {"y", {0, 0, 1}}, {"dy", {0, 0, 0}}}}},
    };
    for (auto& td : tris)
        for (V3 v : grid.vertices()) {
            V3 a = v + td.verts[0], b = v + td.verts[1], c = v + td.verts[2];
            if (all_ok({a, b, c})) add(2, td.role, v, tri_rep);
        }
    for (auto& td : tris)
        for (V3 v : grid.vertices()) {
            V3 a = v + td.verts[0], b = v + td.verts[1], c = v + td.verts[2];
            if (!all_ok({a, b, c})) continue;
            auto& cell = m.cells[2][m.find(cid(td.role, v)).index];
            cell.corr = {m.find(vid(a)), m.find(vid(b)), m.find(vid(c)),
                         m.find(cid(td.edges[0].first, v + td.edges[0].second)),
                         m.find(cid(td.edges[1].first, v + td.edges[1].second)),
                         m.find(cid(td.edges[2].first, v + td.edges[2].second)),
                         m.find(cell.id)};
        }
    // b faces: square rep over axes (x0,x1); vertices (i+1,j,t)+{0,1}x0+{0,1}x1
    for (V3 v : grid.vertices()) {
        int i = v[0], j = v[1], t = v[2];
        V3 v00{i + 1, j, t}, v01{i + 1, j + 1, t}, v10{i, j, t + 1}, v11{i, j + 1, t + 1};
        if (all_ok({v00, v01, v10, v11})) add(2, "b", v, sq_rep);
    }
    for (V3 v : grid.vertices()) {
        int i = v[0], j = v[1], t = v[2];
        V3 v00{i + 1, j, t}, v01{i + 1, j + 1, t}, v10{i, j, t + 1}, v11{i, j + 1, t + 1};
        if (!all_ok({v00, v01, v10, v11})) continue;
        auto& cell = m.cells[2][m.find(cid("b", v)).index];
        // flat order 00,01,10,11, 0x,1x, x0,x1
        cell.corr = {m.find(vid(v00)), m.find(vid(v01)), m.find(vid(v10)), m.find(vid(v11)),
                     m.find(cid("y", {i + 1, j, t})), m.find(cid("y", {i, j, t + 1})),
                     m.find(cid("dx", {i, j, t})), m.find(cid("dx", {i, j + 1, t})),
                     m.find(cell.id)};
    }
    // cubes: rep sheared_cube_tri; label (i,j,t) has origin (i+1,j,t+1)
    const Representative& screp = reg.get(cube_rep);
    auto sc_translate = [&](const std::string& repid, V3 lbl) -> std::string {
        int i = lbl[0], j = lbl[1], t = lbl[2];
        auto up = [&](int a, int b, int cc) { return V3{i + 1 - a, j + b, t + 1 + a - cc}; };
        bool is_vertex = repid.size() == 3;
        for (char ch : repid)
            if (ch != '0' && ch != '1') is_vertex = false;
        if (is_vertex) {
            // vertex "abc" over axes x0,x1,x2 from origin (i+1,j,t+1)
            int a = repid[0] - '0', b = repid[1] - '0', cc = repid[2] - '0';
            return vid(up(a, b, cc));
        }
        if (repid == "cc") return cid("cc", lbl);
        // cube-label edges
        auto E = [&](const char* role, V3 l2) { return cid(role, l2); };
        if (repid == "x00") return E("dx", {i, j, t + 1});
        if (repid == "x10") return E("dx", {i, j + 1, t + 1});
        if (repid == "x01") return E("dx", {i, j, t});
        if (repid == "x11") return E("dx", {i, j + 1, t});
        if (repid == "0x0") return E("y", {i + 1, j, t + 1});
        if (repid == "1x0") return E("y", {i, j, t + 2});
        if (repid == "0x1") return E("y", {i + 1, j, t});
        if (repid == "1x1") return E("y", {i, j, t + 1});
        if (repid == "00x") return E("t", {i + 1, j, t});
        if (repid == "10x") return E("t", {i, j, t + 1});
        if (repid == "01x") return E("t", {i + 1, j + 1, t});
        if (repid == "11x") return E("t", {i, j + 1, t + 1});
        if (repid == "dgx0") return E("x", {i, j, t + 1});
        if (repid == "dgx1") return E("x", {i, j + 1, t + 1});
        if (repid == "dgy0") return E("dy", {i + 1, j, t});
        if (repid == "dgy1") return E("dy", {i, j, t + 1});
        if (repid == "xt0_lo") return cid("tri2", {i, j, t});
        if (repid == "xt0_hi") return cid("tri1", {i, j, t + 1});
        if (repid == "xt1_lo") return cid("tri2", {i, j + 1, t});
        if (repid == "xt1_hi") return cid("tri1", {i, j + 1, t + 1});
        if (repid == "yt0_lo") return cid("tri4", {i + 1, j, t});
        if (repid == "yt0_hi") return cid("tri3", {i + 1, j, t});
        if (repid == "yt1_lo") return cid("tri4", {i, j, t + 1});
        if (repid == "yt1_hi") return cid("tri3", {i, j, t + 1});
        if (repid == "bq0") return cid("b", {i, j, t + 1});
        if (repid == "bq1") return cid("b", {i, j, t});
        throw std::logic_error("sheared cube rep cell " + repid);
    };
    for (V3 v : grid.vertices()) {
        int i = v[0], j = v[1], t = v[2];
        bool ok = true;
        for (int a = 0; a <= 1 && ok; ++a)
            for (int b = 0; b <= 1 && ok; ++b)
                for (int cc = 0; cc <= 1 && ok; ++cc)
                    ok = grid.vertex_ok({i + 1 - a, j + b, t + 1 + a - cc});
        if (ok) add(3, "cc", v, cube_rep);
    }
    for (V3 v : grid.vertices()) {
        if (!m.has(cid("cc", v))) continue;
        auto& cell = m.cells[3][m.find(cid("cc", v)).index];
        if (!cell.corr.empty()) continue;
        std::vector<CellRef> corr;
        for (auto ref : repdetail::flat_cells(screp.complex))
            corr.push_back(m.find(sc_translate(screp.complex.cell(ref).id, v)));
        cell.corr = std::move(corr);
    }
    m.finalize(reg);
    m.metadata["lattice"] = "sheared";
    m.metadata["axes"] = "t-x,y,-t";
    return m;
}

CellComplex build_modified_cubic(int lx, int ly, int lz, bool with_diagonals,
                                 std::array<bool, 3> periodic) {
    auto& reg = rep_registry();
    CellComplex m;
    m.dimension = 3;
    Grid grid{{lx, ly, lz}, periodic};
    auto vid = [&](V3 c) { return coord_id("v", grid.wrap(c)); };
    auto cid = [&](const std::string& role, V3 c) { return coord_id(role, grid.wrap(c)); };
    auto unit = [](int a) { V3 u{0, 0, 0}; u[a] = 1; return u; };
    auto nxt = [](int a) { return (a + 1) % 3; };
    static const char* an = "xyz";

    for (V3 v : grid.vertices()) {
        Cell c;
        c.id = vid(v);
        c.role = "v";
        c.at = grid.wrap(v);
        m.add_cell(0, std::move(c));
    }
    int edge_rep = reg.id("edge"), tg_rep = reg.id("two_gon"), sq_rep = reg.id("square");
    int mc_rep = reg.id("mod_cube");
    auto add_plain = [&](int degree, const std::string& role, V3 label, int rep) {
        Cell c;
        c.id = cid(role, label);
        c.role = role;
        c.at = grid.wrap(label);
        c.rep = rep;
        m.add_cell(degree, std::move(c));
    };
    for (int a = 0; a < 3; ++a)
        for (V3 v : grid.vertices())
            if (grid.vertex_ok(v) && grid.vertex_ok(v + unit(a))) {
                add_plain(1, std::string("e") + an[a] + "+", v, edge_rep);
                add_plain(1, std::string("e") + an[a] + "-", v, edge_rep);
            }
    if (with_diagonals)
        for (int a = 0; a < 3; ++a)
            for (V3 v : grid.vertices()) {
                V3 w = v + unit(nxt(a)) + unit(nxt(nxt(a)));
                if (grid.vertex_ok(v) && grid.vertex_ok(w))
                    add_plain(1, std::string("dg") + an[a], v, edge_rep);
            }
    for (int d1 = 1; d1 <= 1; ++d1)
        for (int a = 0; a < 3; ++a)
            for (V3 v : grid.vertices()) {
                if (!(grid.vertex_ok(v) && grid.vertex_ok(v + unit(a)))) continue;
                for (auto sgn : {"+", "-"}) {
                    auto& cell = m.cells[1][m.find(cid(std::string("e") + an[a] + sgn, v)).index];
                    cell.corr = {m.find(vid(v)), m.find(vid(v + unit(a))), m.find(cell.id)};
                }
            }
    if (with_diagonals)
        for (int a = 0; a < 3; ++a)
            for (V3 v : grid.vertices()) {
                V3 w = v + unit(nxt(a)) + unit(nxt(nxt(a)));
                if (!(grid.vertex_ok(v) && grid.vertex_ok(w))) continue;
                auto& cell = m.cells[1][m.find(cid(std::string("dg") + an[a], v)).index];
                cell.corr = {m.find(vid(v)), m.find(vid(w)), m.find(cell.id)};
            }
    // 2-gons
    const Representative& tg = reg.get(tg_rep);
    for (int a = 0; a < 3; ++a)
        for (V3 v : grid.vertices())
            if (grid.vertex_ok(v) && grid.vertex_ok(v + unit(a)))
                add_plain(2, std::string("g") + an[a], v, tg_rep);
    for (int a = 0; a < 3; ++a)
        for (V3 v : grid.vertices()) {
            if (!(grid.vertex_ok(v) && grid.vertex_ok(v + unit(a)))) continue;
            auto& cell = m.cells[2][m.find(cid(std::string("g") + an[a], v)).index];
            cell.corr = {m.find(vid(v)), m.find(vid(v + unit(a))),
                         m.find(cid(std::string("e") + an[a] + "-", v)),
                         m.find(cid(std::string("e") + an[a] + "+", v)), m.find(cell.id)};
        }
    (void)tg;
    // squares in plane (a, next(a)) based at v; slot copies per mod_cube rule
    auto slot_edge = [&](int a, int b, V3 base, bool a_axis, int offset) {
        int ax = a_axis ? a : b;
        V3 v = base;
        if (offset) v = v + unit(a_axis ? b : a);
        char copy = a_axis ? (offset == 0 ? '-' : '+') : (offset == 0 ? '+' : '-');
        return cid(std::string("e") + an[ax] + copy, v);
    };
    for (int a = 0; a < 3; ++a)
        for (V3 v : grid.vertices()) {
            int b = nxt(a);
            if (grid.vertex_ok(v) && grid.vertex_ok(v + unit(a)) && grid.vertex_ok(v + unit(b)) &&
                grid.vertex_ok(v + unit(a) + unit(b)))
                add_plain(2, std::string("f") + an[a], v, sq_rep);
        }
    for (int a = 0; a < 3; ++a)
        for (V3 v : grid.vertices()) {
            int b = nxt(a);
            if (!(grid.vertex_ok(v) && grid.vertex_ok(v + unit(a)) && grid.vertex_ok(v + unit(b)) &&
                  grid.vertex_ok(v + unit(a) + unit(b))))
                continue;
            auto& cell = m.cells[2][m.find(cid(std::string("f") + an[a], v)).index];
            cell.corr = {m.find(vid(v)), m.find(vid(v + unit(b))), m.find(vid(v + unit(a))),
                         m.find(vid(v + unit(a) + unit(b))),
                         m.find(slot_edge(a, b, v, false, 0)), m.find(slot_edge(a, b, v, false, 1)),
                         m.find(slot_edge(a, b, v, true, 0)), m.find(slot_edge(a, b, v, true, 1)),
                         m.find(cell.id)};
        }
    // cubes
    const Representative& mc = reg.get(mc_rep);
    auto mc_translate = [&](const std::string& repid, V3 base) -> std::string {
        if (repid == "cc") return cid("cc", base);
        if (repid.size() == 3 && repid[0] != 'e' && repid[0] != 'g' && repid[0] != 'f') {
            V3 off{repid[0] - '0', repid[1] - '0', repid[2] - '0'};
            return vid(base + off);
        }
        char kind = repid[0];
        int a = (int)(std::string(an).find(repid[1]));
        if (kind == 'e') {
            char copy = repid[2];
            V3 off{repid[3] - '0', repid[4] - '0', repid[5] - '0'};
            return cid(std::string("e") + an[a] + copy, base + off);
        }
        V3 off{repid[2] - '0', repid[3] - '0', repid[4] - '0'};
        return cid(std::string(1, kind) + an[a], base + off);
    };
    for (V3 v : grid.vertices()) {
        bool ok = true;
        for (int dx = 0; dx <= 1 && ok; ++dx)
            for (int dy = 0; dy <= 1 && ok; ++dy)
                for (int dz = 0; dz <= 1 && ok; ++dz) ok = grid.vertex_ok(v + V3{dx, dy, dz});
        if (ok) add_plain(3, "cc", v, mc_rep);
    }
    for (V3 v : grid.vertices()) {
        if (!m.has(cid("cc", v))) continue;
        auto& cell = m.cells[3][m.find(cid("cc", v)).index];
        if (!cell.corr.empty()) continue;
        std::vector<CellRef> corr;
        for (auto ref : repdetail::flat_cells(mc.complex))
            corr.push_back(m.find(mc_translate(mc.complex.cell(ref).id, v)));
        cell.corr = std::move(corr);
    }
    m.finalize(reg);
    m.metadata["lattice"] = "modified_cubic";
    return m;
}

CellComplex build_representative(const std::string& name) {
    CellComplex c = rep_registry().get(name).complex;
    // the top cell corresponds to itself
    auto& top = c.cells[c.dimension][0];
    if (top.corr.empty())
        for (auto ref : repdetail::flat_cells(c)) top.corr.push_back(ref);
    c.metadata["lattice"] = "representative:" + name;
    return c;
}

CellComplex build_random_ball(std::mt19937_64& rng, int moves) {
    // tetrahedra carry a coherent orientation sign relative to the sorted
    // (branching) vertex order
    std::vector<std::pair<std::array<int, 4>, i64>> tets = {{{0, 1, 2, 3}, 1}};
    int next = 4;
    for (int mv = 0; mv < moves; ++mv) {
        size_t pick = rng() % tets.size();
        auto [t, sign] = tets[pick];
        tets.erase(tets.begin() + pick);
        int v = next++;
        for (int drop = 0; drop < 4; ++drop) {
            std::array<int, 4> nt{};
            int k = 0;
            for (int i = 0; i < 4; ++i)
                if (i != drop) nt[k++] = t[i];
            nt[3] = v;  // v is largest, sorted order preserved
            // moving v from slot `drop` to the end costs 3-drop transpositions
            i64 childsign = sign * (((3 - drop) % 2 == 0) ? 1 : -1);
            tets.push_back({nt, childsign});
        }
    }
    auto& reg = rep_registry();
    CellComplex m;
    m.dimension = 3;
    std::set<std::vector<int>> cells;
    std::map<std::vector<int>, i64> tet_sign;
    for (auto& [t, sign] : tets) {
        std::vector<int> vs(t.begin(), t.end());
        tet_sign[vs] = sign;
        for (int mask = 1; mask < 16; ++mask) {
            std::vector<int> sub;
            for (int i = 0; i < 4; ++i)
                if (mask & (1 << i)) sub.push_back(vs[i]);
            cells.insert(sub);
        }
    }
    auto sid = [](const std::vector<int>& vs) {
        std::string s = "s";
        for (int v : vs) s += "," + std::to_string(v);
        return s;
    };
    static const char* repname[5] = {"", "pt", "edge", "triangle", "tetrahedron"};
    for (auto& vs : cells) {
        Cell c;
        c.id = sid(vs);
        c.role = "s" + std::to_string(vs.size() - 1);
        if (vs.size() >= 2) c.rep = reg.id(repname[vs.size()]);
        m.add_cell((int)vs.size() - 1, std::move(c));
    }
    for (auto& vs : cells) {
        if (vs.size() < 2) continue;
        auto ref = m.find(sid(vs));
        const Representative& rep = reg.get(repname[vs.size()]);
        std::vector<CellRef> corr;
        for (auto rc : repdetail::flat_cells(rep.complex)) {
            std::vector<int> mapped;
            for (char p : rep.complex.cell(rc).id) mapped.push_back(vs[p - '0']);
            corr.push_back(m.find(sid(mapped)));
        }
        m.cells[ref.degree][ref.index].corr = std::move(corr);
    }
    m.top_orientation.assign(m.count(3), 1);
    for (auto& [vs, sign] : tet_sign) m.top_orientation[m.find(sid(vs)).index] = sign;
    m.finalize(reg);
    // orientability: interior faces must cancel between their two cofaces
    auto bnd = boundary_cells(m);
    for (int i = 0; i < m.count(2); ++i) {
        if (bnd.count({2, i})) continue;
        i64 acc = 0;
        for (auto& [sup, coef] : m.cofaces[2][i]) acc += coef * m.top_orientation[sup];
        if (acc != 0) throw std::logic_error("random ball: incoherent orientation");
    }
    m.metadata["lattice"] = "random_ball";
    return m;
}

CellComplex build_lattice(const std::string& kind, std::vector<int> sizes,
                          std::array<bool, 3> periodic) {
    auto sz = [&](size_t i, int dflt) { return i < sizes.size() ? sizes[i] : dflt; };
    if (kind == "cubic") return build_cubic(sz(0, 2), sz(1, 2), sz(2, 2), periodic);
    if (kind == "sheared_cubic") return build_sheared(sz(0, 2), sz(2, sz(1, 2)), true, periodic);
    if (kind == "sheared_cubic_plain")
        return build_sheared(sz(0, 2), sz(2, sz(1, 2)), false, periodic);
    if (kind == "modified_cubic")
        return build_modified_cubic(sz(0, 3), sz(1, 3), sz(2, 3), true, periodic);
    if (kind == "modified_cubic_plain")
        return build_modified_cubic(sz(0, 3), sz(1, 3), sz(2, 3), false, periodic);
    if (kind == "simplex") {
        static const char* sn[4] = {"pt", "edge", "triangle", "tetrahedron"};
        return build_representative(sn[std::min(3, sz(0, 3))]);
    }
    if (kind == "square" || kind == "cube" || kind == "two_gon")
        return build_representative(kind);
    if (kind == "mod_cube_rep") return build_representative("mod_cube");
    throw std::invalid_argument("unknown lattice kind " + kind);
}

SubcomplexSelection closed_star(const CellComplex& m, const std::vector<CellRef>& seeds) {
    SubcomplexSelection sel;
    std::set<CellRef> open_star;
    std::function<void(CellRef)> up = [&](CellRef c) {
        if (!open_star.insert(c).second) return;
        if (c.degree < m.dimension)
            for (auto& [sup, coef] : m.cofaces[c.degree][c.index]) {
                (void)coef;
                up({c.degree + 1, sup});
            }
    };
    for (auto s : seeds) up(s);
    std::function<void(CellRef)> down = [&](CellRef c) {
        if (!sel.cells.insert(c).second) return;
        if (c.degree > 0)
            for (auto& [sub, coef] : m.incidence[c.degree][c.index]) {
                (void)coef;
                down({c.degree - 1, sub});
            }
    };
    for (auto c : open_star) down(c);
    return sel;
}

SubcomplexSelection neighborhood(const CellComplex& m, const std::vector<CellRef>& seeds,
                                 int radius) {
    if (radius < 0) throw std::invalid_argument("radius must be >= 0");
    // vertex adjacency through edges
    std::vector<int> dist(m.count(0), -1);
    std::deque<int> q;
    auto seed_verts = [&](CellRef r) {
        if (r.degree == 0) return std::vector<int>{r.index};
        std::vector<int> out;
        std::function<void(CellRef)> down = [&](CellRef c) {
            if (c.degree == 0) { out.push_back(c.index); return; }
            for (auto& [sub, coef] : m.incidence[c.degree][c.index]) {
                (void)coef;
                down({c.degree - 1, sub});
            }
        };
        down(r);
        return out;
    };
    for (auto s : seeds)
        for (int v : seed_verts(s))
            if (dist[v] != 0) { dist[v] = 0; q.push_back(v); }
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (auto& [e, coef] : m.cofaces[0][v]) {
            (void)coef;
            for (auto& [w, c2] : m.incidence[1][e]) {
                (void)c2;
                if (dist[w] < 0) { dist[w] = dist[v] + 1; q.push_back(w); }
            }
        }
    }
    SubcomplexSelection sel;
    for (int d = 0; d <= m.dimension; ++d)
        for (int i = 0; i < m.count(d); ++i) {
            bool ok = true;
            std::function<void(CellRef)> down = [&](CellRef c) {
                if (!ok) return;
                if (c.degree == 0) {
                    if (dist[c.index] < 0 || dist[c.index] > radius) ok = false;
                    return;
                }
                for (auto& [sub, coef] : m.incidence[c.degree][c.index]) {
                    (void)coef;
                    down({c.degree - 1, sub});
                }
            };
            down({d, i});
            if (ok) sel.cells.insert({d, i});
        }
    return sel;
}

CellComplex restrict_complex(const CellComplex& m, const SubcomplexSelection& sel) {
    CellComplex out;
    out.dimension = m.dimension;
    out.cells.resize(m.dimension + 1);
    std::map<CellRef, CellRef> remap;
    for (int d = 0; d <= m.dimension; ++d)
        for (int i = 0; i < m.count(d); ++i)
            if (sel.contains({d, i})) {
                Cell c = m.cells[d][i];
                c.corr.clear();
                int idx = out.add_cell(d, std::move(c));
                remap[{d, i}] = {d, idx};
            }
    for (int d = 1; d <= m.dimension; ++d)
        for (int i = 0; i < m.count(d); ++i) {
            if (!sel.contains({d, i})) continue;
            CellRef here = remap.at({d, i});
            for (auto ref : m.cells[d][i].corr) {
                auto it = remap.find(ref);
                if (it == remap.end())
                    throw std::logic_error("selection not face-closed at " + m.cells[d][i].id);
                out.cells[here.degree][here.index].corr.push_back(it->second);
            }
        }
    out.metadata = m.metadata;
    out.metadata["restricted"] = "1";
    out.finalize(rep_registry());
    return out;
}

std::set<CellRef> boundary_cells(const CellComplex& m) {
    std::set<CellRef> out;
    int d = m.dimension;
    for (int i = 0; i < m.count(d - 1); ++i) {
        i64 uses = 0;
        for (auto& [sup, coef] : m.cofaces[d - 1][i]) {
            (void)sup;
            uses += coef < 0 ? -coef : coef;
        }
        if (uses <= 1) out.insert({d - 1, i});
    }
    // close downward
    std::function<void(CellRef)> down = [&](CellRef c) {
        if (c.degree == 0) return;
        for (auto& [sub, coef] : m.incidence[c.degree][c.index]) {
            (void)coef;
            CellRef s{c.degree - 1, sub};
            if (out.insert(s).second) down(s);
        }
    };
    auto top_facets = out;
    for (auto c : top_facets) down(c);
    return out;
}

std::set<int> interior_vertices(const CellComplex& m) {
    auto bnd = boundary_cells(m);
    std::set<int> out;
    for (int i = 0; i < m.count(0); ++i)
        if (!bnd.count({0, i})) out.insert(i);
    return out;
}

std::vector<std::set<CellRef>> boundary_components(const CellComplex& m) {
    auto bnd = boundary_cells(m);
    // union facets sharing any subcell
    std::vector<CellRef> facets;
    for (auto c : bnd)
        if (c.degree == m.dimension - 1) facets.push_back(c);
    std::map<CellRef, int> comp;
    int nc = 0;
    std::map<CellRef, std::vector<CellRef>> by_sub;
    for (auto f : facets)
        for (auto& [sub, coef] : m.incidence[f.degree][f.index]) {
            (void)coef;
            by_sub[{f.degree - 1, sub}].push_back(f);
        }
    for (auto f : facets) {
        if (comp.count(f)) continue;
        int id = nc++;
        std::deque<CellRef> q{f};
        comp[f] = id;
        while (!q.empty()) {
            CellRef cur = q.front();
            q.pop_front();
            for (auto& [sub, coef] : m.incidence[cur.degree][cur.index]) {
                (void)coef;
                for (auto g : by_sub[{cur.degree - 1, sub}])
                    if (!comp.count(g)) { comp[g] = id; q.push_back(g); }
            }
        }
    }
    std::vector<std::set<CellRef>> comps(nc);
    for (auto& [f, id] : comp) {
        comps[id].insert(f);
        std::function<void(CellRef)> down = [&](CellRef c) {
            if (c.degree == 0) return;
            for (auto& [sub, coef] : m.incidence[c.degree][c.index]) {
                (void)coef;
                CellRef s{c.degree - 1, sub};
                if (comps[id].insert(s).second) down(s);
            }
        };
        down(f);
    }
    return comps;
}

std::string complex_to_json(const CellComplex& m) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["dimension"] = m.dimension;
    auto cells = nlohmann::json::array();
    auto& reg = rep_registry();
    for (int d = 0; d <= m.dimension; ++d)
        for (int i = 0; i < m.count(d); ++i) {
            const Cell& c = m.cells[d][i];
            nlohmann::json jc;
            jc["id"] = c.id;
            jc["degree"] = d;
            if (c.rep >= 0) {
                jc["representative"] = reg.get(c.rep).name;
                auto corr = nlohmann::json::array();
                for (auto ref : c.corr) corr.push_back(m.cell(ref).id);
                jc["corr"] = corr;
            }
            if (d == m.dimension) jc["orientation"] = m.top_orientation[i];
            cells.push_back(jc);
        }
    j["cells"] = cells;
    auto inc = nlohmann::json::array();
    for (int d = 1; d <= m.dimension; ++d)
        for (int i = 0; i < m.count(d); ++i)
            for (auto& [sub, coef] : m.incidence[d][i]) {
                nlohmann::json e;
                e["from"] = m.cells[d][i].id;
                e["to"] = m.cells[d - 1][sub].id;
                e["coefficient"] = coef;
                inc.push_back(e);
            }
    j["incidence"] = inc;
    j["metadata"] = m.metadata;
    return j.dump(1);
}

CellComplex complex_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    CellComplex m;
    m.dimension = j.at("dimension").get<int>();
    auto& reg = rep_registry();
    for (auto& jc : j.at("cells")) {
        Cell c;
        c.id = jc.at("id").get<std::string>();
        int d = jc.at("degree").get<int>();
        if (jc.contains("representative")) c.rep = reg.id(jc["representative"].get<std::string>());
        int idx = m.add_cell(d, std::move(c));
        if (d == m.dimension) {
            if ((int)m.top_orientation.size() <= idx) m.top_orientation.resize(idx + 1, 1);
            m.top_orientation[idx] =
                jc.contains("orientation") ? jc["orientation"].get<i64>() : 1;
        }
    }
    for (auto& jc : j.at("cells")) {
        if (!jc.contains("corr")) continue;
        CellRef r = m.find(jc.at("id").get<std::string>());
        for (auto& cid : jc["corr"])
            m.cells[r.degree][r.index].corr.push_back(m.find(cid.get<std::string>()));
    }
    // explicit incidence (authoritative for loaded complexes)
    m.incidence.assign(m.cells.size(), {});
    for (int d = 1; d < (int)m.cells.size(); ++d) m.incidence[d].resize(m.cells[d].size());
    for (auto& e : j.at("incidence")) {
        CellRef from = m.find(e.at("from").get<std::string>());
        CellRef to = m.find(e.at("to").get<std::string>());
        m.incidence[from.degree][from.index].push_back({to.index, e.at("coefficient").get<i64>()});
    }
    m.cofaces.assign(m.cells.size(), {});
    for (int d = 0; d + 1 < (int)m.cells.size(); ++d) m.cofaces[d].resize(m.cells[d].size());
    for (int d = 1; d < (int)m.cells.size(); ++d)
        for (int i = 0; i < (int)m.cells[d].size(); ++i)
            for (auto& [sub, coef] : m.incidence[d][i]) m.cofaces[d - 1][sub].push_back({i, coef});
    if (j.contains("metadata"))
        for (auto& [k, v] : j["metadata"].items()) m.metadata[k] = v.get<std::string>();
    // validate delta^2 = 0
    for (int d = 2; d < (int)m.cells.size(); ++d)
        for (int i = 0; i < (int)m.cells[d].size(); ++i) {
            std::map<int, i64> acc;
            for (auto& [sub, coef] : m.incidence[d][i])
                for (auto& [s2, c2] : m.incidence[d - 1][sub]) acc[s2] += coef * c2;
            for (auto& [k, v] : acc)
                if (v) throw std::runtime_error("loaded complex: delta^2 != 0 at " +
                                                m.cells[d][i].id);
        }
    return m;
}

} // namespace tqdw
