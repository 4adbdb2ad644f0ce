#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <optional>
#include <string>

#include "tqdw/cellcomplex.hpp"

namespace tqdw {

// Z-valued function on pairs of cells with fixed total degree; the
// coefficient tensor of a higher cup product.
struct Bichain {
    int total_degree = 0;
    std::map<std::pair<CellRef, CellRef>, i64> vals;

    void add(CellRef a, CellRef b, i64 v) {
        if (!v) return;
        auto key = std::make_pair(a, b);
        auto it = vals.find(key);
        if (it == vals.end())
            vals[key] = v;
        else {
            it->second += v;
            if (!it->second) vals.erase(it);
        }
    }
    i64 get(CellRef a, CellRef b) const {
        auto it = vals.find({a, b});
        return it == vals.end() ? 0 : it->second;
    }
    bool is_zero() const { return vals.empty(); }
    Bichain& operator+=(const Bichain& o) {
        for (auto& [k, v] : o.vals) add(k.first, k.second, v);
        return *this;
    }
    Bichain scaled(i64 f) const {
        Bichain out;
        out.total_degree = total_degree;
        if (f)
            for (auto& [k, v] : vals) out.vals[k] = v * f;
        return out;
    }
};

// delta(a,b) = (delta a, b) + (-1)^deg(a) (a, delta b), linearly extended.
Bichain bichain_boundary(const Bichain& w, const CellComplex& m);

// (a,b)^T = (-1)^{deg(a) deg(b)} (b,a)
Bichain bichain_transpose(const Bichain& w);

struct CupEntry {
    std::string rep;
    int x = 0, a = 0, b = 0;
    Bichain w;  // on the representative's complex (with interior)
    bool synthesized = false;
};

class CupCatalog {
  public:
    std::map<std::tuple<std::string, int, int, int>, CupEntry> entries;

    void put(CupEntry e) { entries[{e.rep, e.x, e.a, e.b}] = std::move(e); }
    void mark_complete(const std::string& rep, int x, int c) { complete_.insert({rep, x, c}); }
    const CupEntry* find(const std::string& rep, int x, int a, int b) const {
        auto it = entries.find({rep, x, a, b});
        return it == entries.end() ? nullptr : &it->second;
    }
    bool has_family(const std::string& rep, int x, int c) const;
    // sum of all (a,b) components with a+b=c, as a bichain on the rep complex
    Bichain family(const std::string& rep, int x, int c) const;

  private:
    std::set<std::tuple<std::string, int, int>> complete_;
};

// the paper's explicit formula tables (simplices via the closed formula,
// hypercubes, 2-gon and modified cube)
const CupCatalog& builtin_catalog();

// closed-form higher cup product on the (a+b-x)-simplex via interval
// alternation with block-permutation signs
Bichain steenrod_simplex_formula(int a, int b, int x);

// left-hand minus right-hand side of the defining recursion; zero iff the
// catalog family is consistent
Bichain recursion_residual(const CupCatalog& cat, const std::string& rep, int x, int c);

// Synthesize the family cup_x^c on the given representative by the staircase
// induction, reusing any components already in the catalog as seeds.
// Throws std::runtime_error("no solution ...") if the right-hand side is not
// a boundary.
void synthesize_family(CupCatalog& cat, const std::string& rep, int x, int c);

// ensure all families needed to evaluate cup_x on (a,b)-cochains over the
// complex exist, synthesizing where the builtins have no entry
void ensure_for_complex(CupCatalog& cat, const CellComplex& m, int x, int a, int b);

// (A cup_x B) for Z-valued cochains; bilinear
ZChain eval_cup(const ZChain& A, const ZChain& B, int x, const CellComplex& m,
                const CupCatalog& cat);

// generic accumulation over cup terms: f(alpha, beta, coef, gamma)
void eval_cup_terms(int x, int a, int b, const CellComplex& m, const CupCatalog& cat,
                    const std::function<void(CellRef, CellRef, i64, CellRef)>& f);

std::string catalog_to_json(const CupCatalog& cat);
CupCatalog catalog_from_json(const std::string& text);

} // namespace tqdw
