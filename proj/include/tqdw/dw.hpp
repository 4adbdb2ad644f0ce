#pragma once

#include <complex>
#include <map>
#include <optional>
#include <vector>

#include "tqdw/builders.hpp"
#include "tqdw/cup.hpp"
#include "tqdw/intlinalg.hpp"
#include "tqdw/rational.hpp"

namespace tqdw {

using IVec = std::vector<i64>;

// Z_f = Z^k / f Z^k for an integer matrix f invertible over the rationals.
// Canonical lifts live in the Hermite-normal-form fundamental domain.
struct GroupSpec {
    int k = 1;
    IMat f;
    IMat hnf;       // column-style HNF of f, lower triangular
    i64 order = 1;  // |det f|

    GroupSpec() : f(IMat::identity(1)), hnf(f) {}
    explicit GroupSpec(IMat fm);

    // canonical representative of v + f Z^k
    IVec canon(IVec v) const;
    IVec add(const IVec& a, const IVec& b) const;
    IVec neg(const IVec& a) const;
    bool is_zero(const IVec& a) const;
    IVec zero() const { return IVec(k, 0); }
    std::vector<IVec> elements() const;  // all canonical representatives
    i64 index_of(const IVec& canon_v) const;   // mixed-radix index over the domain
    IVec element_at(i64 idx) const;

    GroupSpec transposed() const { return GroupSpec(f.transposed()); }
};

// Twist data: k x k matrix of exact rationals; general abelian variant or
// the Z_2^3 type-III cocycle (Lagrangian (1/2) A0 A1 A2).
struct ActionSpec {
    enum class Variant { general, type3_z2cubed };
    Variant variant = Variant::general;
    std::vector<std::vector<Rat>> F;  // literal rational entries (real representative)

    ActionSpec() = default;
    ActionSpec(const GroupSpec& g, std::vector<std::vector<Rat>> Fm,
               Variant v = Variant::general);

    Rat Fdot(const IVec& a, const IVec& b) const {  // a^T F b
        Rat s;
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < b.size(); ++j)
                if (a[i] && b[j]) s += F[i][j] * Rat(a[i] * b[j]);
        return s;
    }
    Rat FplusFT(const IVec& a, const IVec& b) const {
        Rat s;
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < b.size(); ++j)
                if (a[i] && b[j]) s += (F[i][j] + F[j][i]) * Rat(a[i] * b[j]);
        return s;
    }
};

// Sparse Z_f-valued chain: canonical representatives, zero entries dropped.
struct ZfChain {
    int degree = 0;
    std::map<int, IVec> vals;

    const IVec* get(int cell) const {
        auto it = vals.find(cell);
        return it == vals.end() ? nullptr : &it->second;
    }
    void set(const GroupSpec& g, int cell, IVec v) {
        v = g.canon(std::move(v));
        if (g.is_zero(v))
            vals.erase(cell);
        else
            vals[cell] = std::move(v);
    }
    void add(const GroupSpec& g, int cell, const IVec& v) {
        IVec cur = vals.count(cell) ? vals[cell] : g.zero();
        set(g, cell, g.add(cur, v));
    }
};

// Z_f coboundary of a Z_f cochain
ZfChain zf_coboundary(const GroupSpec& g, const ZfChain& a, const CellComplex& m);
ZfChain zf_boundary(const GroupSpec& g, const ZfChain& a, const CellComplex& m);

// 1-form symmetry defects: flux 2-cochain b over Z_f, charge 1-chain c over
// Z_{f^T}; type3 additionally carries e with de = b.
struct DefectConfig {
    ZfChain b;  // degree 2
    ZfChain c;  // degree 1
    ZfChain e;  // degree 1 (type3 only)

    DefectConfig() {
        b.degree = 2;
        c.degree = 1;
        e.degree = 1;
    }
};

// right-hand side of the c-constraint at every vertex:
//   delta c = f^T \ (cup f^T (F+F^T) d lift(b))
ZfChain c_constraint_rhs(const GroupSpec& g, const ActionSpec& act, const DefectConfig& d,
                         const CellComplex& m, const CupCatalog& cat);

// checks db = 0 and the c-constraint on the given vertex set
bool defects_closed(const GroupSpec& g, const ActionSpec& act, const DefectConfig& d,
                    const CellComplex& m, const CupCatalog& cat,
                    const std::set<int>& vertices);

// S[A,b,c] evaluated exactly in R/Z; requires dA = b
RationalPhase dw_action(const GroupSpec& g, const ActionSpec& act, const ZfChain& A,
                        const DefectConfig& d, const CellComplex& m, const CupCatalog& cat);

// Exact sum of roots of unity sum_j coef[j] e^{2 pi i j / level}; zero is
// decided exactly against the cyclotomic polynomial.
struct CycloSum {
    i64 level = 1;
    std::vector<i64> coef{0};

    static CycloSum zero() { return CycloSum{}; }
    void add_phase(const Rat& q, i64 count = 1);
    bool is_zero() const;
    std::complex<double> value() const;
    bool equals(const CycloSum& other) const;
    // q with this == e^{2 pi i q} * other, if one exists
    std::optional<Rat> phase_ratio(const CycloSum& other) const;
};

struct PartitionValue {
    bool zero = true;
    CycloSum sum;       // sum over configurations of e^{2 pi i S}
    Rat normalization;  // 1 / |G|^{#interior vertices}
    double magnitude() const { return zero ? 0.0 : std::abs(sum.value()) * normalization.to_double(); }
    std::complex<double> value() const {
        return zero ? 0.0 : sum.value() * normalization.to_double();
    }
};

// Exact evaluation of Z[a] = |G|^{-V_int} sum_{A: dA=b, A|boundary = a} e^{2 pi i S}.
// The solver for {A} is built once per complex and reused across defect and
// boundary choices.
class PartitionEvaluator {
  public:
    PartitionEvaluator(const CellComplex& m, GroupSpec g, ActionSpec act,
                       const CupCatalog* cat, i64 enumeration_cap = (1 << 24));

    // boundary cochain given by values on boundary edges (canonical reps);
    // any interior edge present in `a` is an error
    PartitionValue evaluate(const DefectConfig& defects, const ZfChain& boundary_a) const;
    i64 solution_count(const DefectConfig& defects, const ZfChain& boundary_a) const;

    const std::vector<int>& boundary_edges() const { return boundary_edges_; }
    const std::vector<int>& interior_edges() const { return interior_edges_; }
    const CellComplex& complex() const { return m_; }
    const GroupSpec& group() const { return g_; }
    const ActionSpec& action() const { return act_; }
    const CupCatalog& catalog() const { return *cat_; }

  private:
    const CellComplex& m_;
    GroupSpec g_;
    ActionSpec act_;
    const CupCatalog* cat_;
    i64 cap_;
    std::vector<int> boundary_edges_, interior_edges_;
    int n_interior_vertices_ = 0;
    std::unique_ptr<ZSolver> solver_;
    std::vector<IVec> kernel_;  // kernel x-parts, one IVec of length k*E_int each
    int nvars_ = 0;             // k * E_int
    // flattened cup terms: (first cell, second cell, sigma * coef)
    std::vector<std::array<i64, 3>> t12_, t22_;
    std::vector<std::vector<Rat>> finvT_;
    mutable std::map<std::string, std::optional<std::vector<IVec>>> cache_;

    const std::optional<std::vector<IVec>>& raw_solutions(const DefectConfig& d,
                                                          const ZfChain& a) const;
};

struct CheckReport {
    bool ok = true;
    std::vector<std::string> failures;
    void fail(std::string s) {
        ok = false;
        failures.push_back(std::move(s));
    }
};

// random (f, F) with f^T F f = 0 mod 1, k <= 3, |det f| <= max_det
std::pair<GroupSpec, ActionSpec> random_group_action(std::mt19937_64& rng, int max_k,
                                                     i64 max_det);

// S[A + d alpha] - S[A] over random complexes/trials; exact
CheckReport check_gauge_invariance(const GroupSpec& g, const ActionSpec& act, int complexes,
                                   int trials, std::mt19937_64& rng);

// Conditions 1-4 of the 1-form symmetry definition on vertex-star,
// edge-star, and shell complexes.
CheckReport check_1form_conditions(const GroupSpec& g, const ActionSpec& act,
                                   std::mt19937_64& rng);

// JSON for group/action specs
std::string group_action_to_json(const GroupSpec& g, const ActionSpec& a);
std::pair<GroupSpec, ActionSpec> group_action_from_json(const std::string& text);
std::string defects_to_json(const DefectConfig& d, const CellComplex& m);
DefectConfig defects_from_json(const std::string& text, const CellComplex& m,
                               const GroupSpec& g);

} // namespace tqdw
