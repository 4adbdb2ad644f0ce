#include "tqdw/cup.hpp"

namespace tqdw {

Bichain bichain_boundary(const Bichain& w, const CellComplex& m) {
    Bichain out;
    out.total_degree = w.total_degree - 1;
    for (auto& [key, v] : w.vals) {
        auto [a, b] = key;
        if (a.degree >= 1)
            for (auto& [sub, coef] : m.incidence[a.degree][a.index])
                out.add({a.degree - 1, sub}, b, coef * v);
        i64 sign = (a.degree % 2 == 0) ? 1 : -1;
        if (b.degree >= 1)
            for (auto& [sub, coef] : m.incidence[b.degree][b.index])
                out.add(a, {b.degree - 1, sub}, sign * coef * v);
    }
    return out;
}

Bichain bichain_transpose(const Bichain& w) {
    Bichain out;
    out.total_degree = w.total_degree;
    for (auto& [key, v] : w.vals) {
        auto [a, b] = key;
        i64 sign = (a.degree * b.degree) % 2 == 0 ? 1 : -1;
        out.add(b, a, sign * v);
    }
    return out;
}

} // namespace tqdw
