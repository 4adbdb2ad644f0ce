#include "tqdw/anyon.hpp"

#include <algorithm>
#include <sstream>

namespace tqdw {

RationalPhase AnyonData::spin(const IVec& g) const {
    Rat s;
    int n = m.rows;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (g[i] && g[j]) s += Rat(g[i]) * M_less[i][j] * Rat(g[j]);
    return RationalPhase(s);
}

RationalPhase AnyonData::braiding(const IVec& g, const IVec& h) const {
    Rat s;
    int n = m.rows;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (g[i] && h[j]) s += Rat(g[i]) * (M_less[i][j] + M_less[j][i]) * Rat(h[j]);
    return RationalPhase(s);
}

AnyonData anyon_data(const GroupSpec& g, const ActionSpec& act) {
    if (act.variant != ActionSpec::Variant::general)
        throw std::invalid_argument("anyon data is defined for the general variant");
    int k = g.k;
    AnyonData a;
    a.m = IMat(2 * k, 2 * k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            a.m.at(i, j) = g.f.at(i, j);
            a.m.at(k + i, k + j) = g.f.at(j, i);
            Rat s;
            for (int p = 0; p < k; ++p)
                for (int q = 0; q < k; ++q)
                    s += Rat(g.f.at(p, i)) * (act.F[p][q] + act.F[q][p]) * Rat(g.f.at(q, j));
            if (!s.is_integer()) throw std::logic_error("f^T(F+F^T)f not integer");
            a.m.at(k + i, j) = s.num;
        }
    a.M_less.assign(2 * k, std::vector<Rat>(2 * k));
    // (f^{-1})^T block
    i64 det = det_bareiss(g.f);
    auto minor_det = [&](int r, int c) {
        if (k == 1) return (i64)1;
        IMat sub(k - 1, k - 1);
        for (int i = 0, si = 0; i < k; ++i) {
            if (i == r) continue;
            for (int j = 0, sj = 0; j < k; ++j) {
                if (j == c) continue;
                sub.at(si, sj++) = g.f.at(i, j);
            }
            ++si;
        }
        return det_bareiss(sub);
    };
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            a.M_less[i][j] = -act.F[i][j];
            // ((f^{-1})^T)_{ij} = (f^{-1})_{ji} = cof_{ij}... adj_{ji} = cof_{ij}
            i64 cof = minor_det(i, j) * (((i + j) % 2 == 0) ? 1 : -1);
            a.M_less[i][k + j] = Rat(cof, det);
        }
    // invariant factors
    auto snf = smith_normal_form(a.m);
    for (int i = 0; i < snf.rank; ++i)
        if (snf.d.at(i, i) > 1) a.invariant_factors.push_back(snf.d.at(i, i));
    return a;
}

bool anyon_conditions_hold(const AnyonData& a) {
    int n = a.m.rows;
    // m^T M_< m = 0 mod 1
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Rat s;
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q)
                    s += Rat(a.m.at(p, i)) * a.M_less[p][q] * Rat(a.m.at(q, j));
            if (!RationalPhase(s).is_trivial()) return false;
        }
    // det(Mbar m) = +-1 with Mbar = M_< + M_<^T, literal representatives
    std::vector<std::vector<Rat>> mm(n, std::vector<Rat>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Rat s;
            for (int p = 0; p < n; ++p)
                s += (a.M_less[i][p] + a.M_less[p][i]) * Rat(a.m.at(p, j));
            mm[i][j] = s;
        }
    // exact rational determinant by elimination
    Rat det(1);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (!mm[r][c].is_zero()) { piv = r; break; }
        if (piv < 0) return false;
        if (piv != c) {
            std::swap(mm[piv], mm[c]);
            det = -det;
        }
        det = det * mm[c][c];
        for (int r = c + 1; r < n; ++r) {
            if (mm[r][c].is_zero()) continue;
            Rat fct = mm[r][c] / mm[c][c];
            for (int j = c; j < n; ++j) mm[r][j] -= fct * mm[c][j];
        }
    }
    return det == Rat(1) || det == Rat(-1);
}

bool metric_groups_equivalent(const AnyonData& a, const AnyonData& b) {
    GroupSpec ka = a.fusion_group(), kb = b.fusion_group();
    if (ka.order != kb.order || ka.order > 64) return false;
    auto ea = ka.elements(), eb = kb.elements();
    // precompute spins
    auto spin_of = [&](const AnyonData& data, const GroupSpec& grp, const IVec& v) {
        return data.spin(v).q;
    };
    // match by brute-force bijection generated by images of a generating set
    // (the unit vectors of the canonical domain generate)
    std::vector<IVec> gens;
    for (int i = 0; i < ka.k; ++i)
        if (ka.hnf.at(i, i) > 1) {
            IVec u(ka.k, 0);
            u[i] = 1;
            gens.push_back(ka.canon(u));
        }
    // candidate images: elements of kb with equal order and spin
    auto order_of = [&](const GroupSpec& grp, const IVec& v) {
        IVec cur = v;
        int n = 1;
        while (!grp.is_zero(cur)) {
            cur = grp.add(cur, v);
            ++n;
        }
        return n;
    };
    std::vector<int> img(gens.size(), -1);
    std::function<bool(size_t)> rec = [&](size_t gi) -> bool {
        if (gi == gens.size()) {
            // build the full map and verify homomorphism + spins + bijectivity
            std::map<IVec, IVec> phi;
            std::function<bool(IVec, IVec)> fill = [&](IVec src, IVec dst) { return true; };
            (void)fill;
            // enumerate all combinations of generator multiples
            std::vector<i64> mult(gens.size(), 0);
            std::set<IVec> image;
            bool ok = true;
            std::function<void(size_t, IVec, IVec)> walk = [&](size_t gj, IVec sa, IVec sb) {
                if (!ok) return;
                if (gj == gens.size()) {
                    auto it = phi.find(sa);
                    if (it != phi.end()) {
                        if (it->second != sb) ok = false;
                        return;
                    }
                    phi[sa] = sb;
                    image.insert(sb);
                    if (!(a.spin(sa) == b.spin(sb))) ok = false;
                    return;
                }
                IVec ca = sa, cb = sb;
                int n = order_of(ka, gens[gj]);
                for (int t = 0; t < n && ok; ++t) {
                    walk(gj + 1, ca, cb);
                    ca = ka.add(ca, gens[gj]);
                    cb = kb.add(cb, eb[img[gj]]);
                }
            };
            walk(0, ka.zero(), kb.zero());
            return ok && (i64)image.size() == kb.order && (i64)phi.size() == ka.order;
        }
        for (size_t cand = 0; cand < eb.size(); ++cand) {
            if (order_of(ka, gens[gi]) != order_of(kb, eb[cand])) continue;
            if (!(a.spin(gens[gi]) == b.spin(eb[cand]))) continue;
            img[gi] = (int)cand;
            if (rec(gi + 1)) return true;
        }
        return false;
    };
    (void)spin_of;
    return rec(0);
}

std::string anyon_report(const AnyonData& a) {
    std::ostringstream os;
    int n = a.m.rows;
    os << "m =\n";
    for (int i = 0; i < n; ++i) {
        os << "  [";
        for (int j = 0; j < n; ++j) os << (j ? ", " : " ") << a.m.at(i, j);
        os << " ]\n";
    }
    os << "M_< =\n";
    for (int i = 0; i < n; ++i) {
        os << "  [";
        for (int j = 0; j < n; ++j) os << (j ? ", " : " ") << a.M_less[i][j].str();
        os << " ]\n";
    }
    os << "K = ";
    if (a.invariant_factors.empty())
        os << "trivial";
    else
        for (size_t i = 0; i < a.invariant_factors.size(); ++i)
            os << (i ? " x " : "") << "Z_" << a.invariant_factors[i];
    os << "\n";
    os << "generator spins:";
    GroupSpec k = a.fusion_group();
    for (int i = 0; i < k.k; ++i) {
        if (k.hnf.at(i, i) <= 1) continue;
        IVec u(k.k, 0);
        u[i] = 1;
        os << " " << a.spin(k.canon(u)).str();
    }
    os << "\n";
    return os.str();
}

} // namespace tqdw
