// Right-hand side of the hierarchy. Q = sigma_z is diagonal with signs
// s = (+1, -1), so every commutator is an elementwise scaling of the 2x2 block:
//   [Q, r]_ij       = (s_i - s_j) r_ij
//   [Q, [Q, r]]_ij  = (s_i - s_j)^2 r_ij
//   (c Q r - c* r Q)_ij = (c s_i - c* s_j) r_ij

#include "sbrc/heom.hpp"

namespace sbrc {

namespace {

inline void block_rhs(const HeomOperator& op, const cplx* in, cplx* out, std::size_t i) {
    const Hierarchy& h = *op.hierarchy;
    const int modes = h.modes();
    const cplx* r = in + 4 * i;
    const cplx* H = op.hs;

    // -i [H_S, r]
    cplx d00 = -I * (H[1] * r[2] - r[1] * H[2]);
    cplx d01 = -I * (H[0] * r[1] + H[1] * r[3] - r[0] * H[1] - r[1] * H[3]);
    cplx d10 = -I * (H[2] * r[0] + H[3] * r[2] - r[2] * H[0] - r[3] * H[2]);
    cplx d11 = -I * (H[2] * r[1] - r[2] * H[1]);

    const double decay = op.decay[i];
    d00 -= decay * r[0];
    d01 -= decay * r[1];
    d10 -= decay * r[2];
    d11 -= decay * r[3];

    // terminator: only off-diagonal elements of [Q,[Q,r]] survive, with weight 4
    const cplx term4 = 4.0 * op.expansion.terminator;
    d01 -= term4 * r[1];
    d10 -= term4 * r[2];

    for (int m = 0; m < modes; ++m) {
        const std::int64_t p = h.plus(i, m);
        if (p != Hierarchy::kAbsent) {
            const cplx* u = in + 4 * p;
            d01 += -2.0 * I * u[1];
            d10 += 2.0 * I * u[2];
        }
        const int nm = h.occupation(i, m);
        if (nm > 0) {
            const cplx* l = in + 4 * h.minus(i, m);
            const cplx c = op.expansion.c[m];
            const cplx cc = std::conj(c);
            const cplx f = -I * static_cast<double>(nm);
            d00 += f * (c - cc) * l[0];
            d01 += f * (c + cc) * l[1];
            d10 += f * (-c - cc) * l[2];
            d11 += f * (-c + cc) * l[3];
        }
    }
    cplx* o = out + 4 * i;
    o[0] = d00;
    o[1] = d01;
    o[2] = d10;
    o[3] = d11;
}

}  // namespace

void heom_rhs(const HeomOperator& op, const cplx* in, cplx* out) {
    const auto n = static_cast<std::int64_t>(op.hierarchy->size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) block_rhs(op, in, out, static_cast<std::size_t>(i));
}

void heom_rhs_serial(const HeomOperator& op, const cplx* in, cplx* out) {
    const std::size_t n = op.hierarchy->size();
    for (std::size_t i = 0; i < n; ++i) block_rhs(op, in, out, i);
}

}  // namespace sbrc
