#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tqdw/intlinalg.hpp"

namespace tqdw {

// Reference to a cell: degree + index within that degree.
struct CellRef {
    int degree = -1;
    int index = -1;
    bool operator==(const CellRef& o) const { return degree == o.degree && index == o.index; }
    bool operator<(const CellRef& o) const {
        return degree != o.degree ? degree < o.degree : index < o.index;
    }
};

struct Cell {
    std::string id;    // structured id, e.g. "dx(0,1,2)" or "012"
    std::string role;  // role tag within the unit cell, e.g. "dx", "b", "tri_xt0"
    std::array<int, 3> at{0, 0, 0};  // unit-cell coordinate where applicable
    int rep = -1;                    // representative registry index (degree >= 1)
    std::vector<CellRef> corr;       // rep subcell (flattened order) -> cell here
};

class RepRegistry;

// Finite cell complex with oriented incidence derived from cell
// representatives. Immutable once finalized.
class CellComplex {
  public:
    int dimension = 0;
    std::vector<std::vector<Cell>> cells;  // cells[d][i]
    // incidence[d][i]: signed multiplicities over (d-1)-cells
    std::vector<std::vector<std::vector<std::pair<int, i64>>>> incidence;
    // cofaces[d][i]: (d+1)-cells whose incidence row touches cell (d,i), with coeff
    std::vector<std::vector<std::vector<std::pair<int, i64>>>> cofaces;
    std::vector<i64> top_orientation;  // sigma[M] sign per top cell (+1/-1)
    std::map<std::string, std::string> metadata;

    std::unordered_map<std::string, CellRef> index_of;

    int add_cell(int degree, Cell c) {
        if ((int)cells.size() <= degree) cells.resize(degree + 1);
        cells[degree].push_back(std::move(c));
        int idx = (int)cells[degree].size() - 1;
        index_of[cells[degree][idx].id] = CellRef{degree, idx};
        return idx;
    }

    int count(int degree) const {
        return degree < (int)cells.size() ? (int)cells[degree].size() : 0;
    }
    const Cell& cell(CellRef r) const { return cells[r.degree][r.index]; }
    CellRef find(const std::string& id) const {
        auto it = index_of.find(id);
        if (it == index_of.end()) throw std::out_of_range("no cell with id " + id);
        return it->second;
    }
    bool has(const std::string& id) const { return index_of.count(id) > 0; }

    // Flattened ordering of rep subcells is by (degree, index).
    void finalize(const RepRegistry& reg);

    // Boundary matrix delta_d: rows = (d-1)-cells, cols = d-cells.
    IMat boundary_matrix(int d) const {
        IMat m(count(d - 1), count(d));
        for (int i = 0; i < count(d); ++i)
            for (auto& [sub, coef] : incidence[d][i]) m.at(sub, i) += coef;
        return m;
    }

    int euler_characteristic() const {
        int chi = 0, sign = 1;
        for (int d = 0; d <= dimension; ++d, sign = -sign) chi += sign * count(d);
        return chi;
    }
};

// A cell representative: a cell complex for the closed d-ball including the
// top cell itself, whose incidence row carries the orientation sigma.
struct Representative {
    std::string name;
    int top_degree = 0;
    CellComplex complex;     // contains the top cell as its single top-degree cell
    CellRef top() const { return CellRef{top_degree, 0}; }
};

class RepRegistry {
  public:
    std::vector<Representative> reps;
    std::unordered_map<std::string, int> by_name;

    int add(Representative r) {
        int id = (int)reps.size();
        by_name[r.name] = id;
        reps.push_back(std::move(r));
        return id;
    }
    const Representative& get(int id) const { return reps.at(id); }
    const Representative& get(const std::string& n) const { return reps.at(by_name.at(n)); }
    int id(const std::string& n) const {
        auto it = by_name.find(n);
        if (it == by_name.end()) throw std::out_of_range("unknown representative " + n);
        return it->second;
    }
    bool has(const std::string& n) const { return by_name.count(n) > 0; }
};

// Global registry holding the standard representatives (point, edge,
// simplices, hypercubes, 2-gon, modified cube, sheared cube variants).
RepRegistry& rep_registry();

namespace repdetail {
// flattened enumeration: all cells of a rep complex ordered by (degree, index)
inline std::vector<CellRef> flat_cells(const CellComplex& c) {
    std::vector<CellRef> out;
    for (int d = 0; d < (int)c.cells.size(); ++d)
        for (int i = 0; i < (int)c.cells[d].size(); ++i) out.push_back({d, i});
    return out;
}
inline int flat_index(const CellComplex& c, CellRef r) {
    int idx = 0;
    for (int d = 0; d < r.degree; ++d) idx += c.count(d);
    return idx + r.index;
}
} // namespace repdetail

inline void CellComplex::finalize(const RepRegistry& reg) {
    incidence.assign(cells.size(), {});
    for (int d = 1; d < (int)cells.size(); ++d) {
        incidence[d].resize(cells[d].size());
        for (int i = 0; i < (int)cells[d].size(); ++i) {
            const Cell& c = cells[d][i];
            if (c.rep < 0) throw std::logic_error("cell " + c.id + " has no representative");
            const Representative& rep = reg.get(c.rep);
            if (rep.top_degree != d)
                throw std::logic_error("representative degree mismatch at " + c.id);
            // push the rep top cell's incidence row through the correspondence
            std::map<int, i64> row;
            CellRef top = rep.top();
            for (auto& [sub, coef] : rep.complex.incidence[d][top.index]) {
                CellRef here = c.corr.at(repdetail::flat_index(rep.complex, CellRef{d - 1, sub}));
                if (here.degree != d - 1)
                    throw std::logic_error("correspondence degree mismatch at " + c.id);
                row[here.index] += coef;
            }
            for (auto& [idx, coef] : row)
                if (coef) incidence[d][i].push_back({idx, coef});
        }
    }
    cofaces.assign(cells.size(), {});
    for (int d = 0; d + 1 < (int)cells.size(); ++d) cofaces[d].resize(cells[d].size());
    for (int d = 1; d < (int)cells.size(); ++d)
        for (int i = 0; i < (int)cells[d].size(); ++i)
            for (auto& [sub, coef] : incidence[d][i]) cofaces[d - 1][sub].push_back({i, coef});
    if (top_orientation.empty()) top_orientation.assign(count(dimension), 1);

    // delta composed twice must vanish identically
    for (int d = 2; d < (int)cells.size(); ++d) {
        for (int i = 0; i < (int)cells[d].size(); ++i) {
            std::map<int, i64> acc;
            for (auto& [sub, coef] : incidence[d][i])
                for (auto& [sub2, coef2] : incidence[d - 1][sub]) acc[sub2] += coef * coef2;
            for (auto& [k, v] : acc)
                if (v != 0)
                    throw std::logic_error("boundary of boundary nonzero at " + cells[d][i].id);
        }
    }
}

// Sparse chain with values in V (i64 for Z, group elements for Z_f, Rat).
template <class V>
struct Chain {
    int degree = 0;
    std::map<int, V> vals;

    V get(int cell) const {
        auto it = vals.find(cell);
        return it == vals.end() ? V{} : it->second;
    }
    void add(int cell, const V& v) {
        auto it = vals.find(cell);
        if (it == vals.end()) {
            if (!(v == V{})) vals[cell] = v;
        } else {
            it->second = it->second + v;
            if (it->second == V{}) vals.erase(it);
        }
    }
    bool is_zero() const { return vals.empty(); }
};

using ZChain = Chain<i64>;

// boundary: degree a >= 1 -> a-1, with signed multiplicities
inline ZChain boundary(const ZChain& ch, const CellComplex& m) {
    if (ch.degree < 1) throw std::invalid_argument("no boundary below degree 0");
    ZChain out;
    out.degree = ch.degree - 1;
    for (auto& [cell, val] : ch.vals)
        for (auto& [sub, coef] : m.incidence[ch.degree][cell]) out.add(sub, coef * val);
    return out;
}

// coboundary: degree a <= dim-1 -> a+1
inline ZChain coboundary(const ZChain& ch, const CellComplex& m) {
    if (ch.degree >= m.dimension)
        throw std::invalid_argument("no coboundary at top degree");
    ZChain out;
    out.degree = ch.degree + 1;
    for (auto& [cell, val] : ch.vals)
        for (auto& [sup, coef] : m.cofaces[ch.degree][cell]) out.add(sup, coef * val);
    return out;
}

// Face-closed selection of cells with boundary tags for shell shapes.
struct SubcomplexSelection {
    std::set<CellRef> cells;
    std::set<CellRef> inside_boundary;
    std::set<CellRef> outside_boundary;
    bool degenerate = false;  // inside/outside share cells

    bool contains(CellRef r) const { return cells.count(r) > 0; }
};

} // namespace tqdw
