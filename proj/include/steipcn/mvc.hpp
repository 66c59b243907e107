#pragma once

#include "steipcn/core.hpp"

namespace steipcn {

template <class Real>
struct MVCViewParams {
    Tensor<Real> w6, b6;  // time-collapsing conv [C, Cin, T_h], [C]
    Tensor<Real> w7, b7;  // GLU value path, pointwise C -> C
    Tensor<Real> w8, b8;  // GLU gate path
};

// Multi-view prediction head. Active views are listed in trunk order
// (original, local joint spatial-temporal, long-range temporal); ablations
// shrink the list and the fused dimensions follow.
template <class Real>
struct MVCParams {
    std::vector<MVCViewParams<Real>> views;
    Tensor<Real> fuse_w7, fuse_b7, fuse_w8, fuse_b8;  // pointwise VC -> VC
    Tensor<Real> head_w, head_b;                      // pointwise VC -> T_p
    Tensor<Real> direct_w, direct_b;                  // head-only variant: [T_p, C, T_h], [T_p]
};

// Collapses the full time axis: x [T, N, Cin], w [Cout, Cin, T] -> [N, Cout].
template <class Real>
Tensor<Real> view_compress(Tape<Real>& tape, const Tensor<Real>& x, const Tensor<Real>& w,
                           const Tensor<Real>& b);

// (w7 v + b7) (x) sigmoid(w8 v + b8) on [N, C] features.
template <class Real>
Tensor<Real> view_glu(Tape<Real>& tape, const Tensor<Real>& v, const MVCViewParams<Real>& p);

// Full head: per-view compress + GLU, concatenate, fused GLU, projection to
// the horizon axis. Returns [T_p, N, 1].
template <class Real>
Tensor<Real> fuse_predict(Tape<Real>& tape, const std::vector<Tensor<Real>>& views, const MVCParams<Real>& p,
                          int t_p);

// Head-only variant: one time-collapsing conv straight to the horizons.
template <class Real>
Tensor<Real> direct_predict(Tape<Real>& tape, const Tensor<Real>& trunk, const MVCParams<Real>& p, int t_p);

}  // namespace steipcn
