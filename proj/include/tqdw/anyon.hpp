#pragma once

#include "tqdw/dw.hpp"

namespace tqdw {

// Abelian anyon data of a twisted quantum double: fusion group presentation
// m, spin/braiding matrix M_< (literal rational entries), invariant factors
// of the fusion group.
struct AnyonData {
    IMat m;                                // 2k x 2k
    std::vector<std::vector<Rat>> M_less;  // 2k x 2k, literal representatives
    std::vector<i64> invariant_factors;    // nontrivial SNF diagonal of m

    GroupSpec fusion_group() const { return GroupSpec(m); }
    RationalPhase spin(const IVec& g) const;                   // q(g)
    RationalPhase braiding(const IVec& g, const IVec& h) const;  // b(g,h)
};

// m = [[f, 0], [f^T (F+F^T) f, f^T]],  M_< = [[-F, (f^-1)^T], [0, 0]]
AnyonData anyon_data(const GroupSpec& g, const ActionSpec& act);

// exact checks: m^T M_< m = 0 mod 1 and det(Mbar m) = +-1 with
// Mbar = M_< + M_<^T taken with the literal representatives
bool anyon_conditions_hold(const AnyonData& a);

// brute-force metric group isomorphism search (|K| <= 64): a bijective
// homomorphism matching spins (braidings follow from spins)
bool metric_groups_equivalent(const AnyonData& a, const AnyonData& b);

std::string anyon_report(const AnyonData& a);

} // namespace tqdw
