#pragma once

#include "steipcn/core.hpp"
#include "steipcn/encodings.hpp"
#include "steipcn/stei.hpp"

namespace steipcn {

// Parameters of the single local joint spatial-temporal layer. Under
// ablations some tensors are null or resized; shapes are authoritative in
// the tensors themselves.
template <class Real>
struct LocalLayerParams {
    Tensor<Real> w0, b0;  // raw traffic lift, 1 -> C (or C/2 when the gate unit is ablated)
    Tensor<Real> w1, b1;  // update, C -> 2C (enc -> C when the gate unit is ablated)
    Tensor<Real> w2, b2;  // spatial coordinate projection
    Tensor<Real> w3, b3;  // temporal coordinate projection
    Tensor<Real> w4, b4;  // gate pair (null when the gate unit is ablated)
    Tensor<Real> w5, b5;
};

// Per-entry affine lift of raw traffic values: [T_h, N, 1] -> [T_h, N, C].
template <class Real>
Tensor<Real> input_encode(Tape<Real>& tape, const Tensor<Real>& x_raw, const LocalLayerParams<Real>& p);

// Weighted sparse aggregation over the joint spatial-temporal edge set.
// Sources reaching before the window read a zero feature row; work is
// proportional to T_h * M * C.
template <class Real>
Tensor<Real> aggregate(Tape<Real>& tape, const Tensor<Real>& x_enc, const STWeights<Real>& weights);

// Channel-raising update: [T_h, N, C] -> [T_h, N, 2C].
template <class Real>
Tensor<Real> update(Tape<Real>& tape, const Tensor<Real>& x_agg, const LocalLayerParams<Real>& p);

// Gated activation with absolute coordinate guidance:
// h = x + W2*z_s + b2 + W3*z_t + b3, out = (W4*h + b4) (x) sigmoid(W5*h + b5).
// Guidance terms drop out when their encoding family is ablated.
template <class Real>
Tensor<Real> stpgau(Tape<Real>& tape, const Tensor<Real>& x_upd, const EmbeddingTables<Real>& tables,
                    const WindowCalendar& cal, const LocalLayerParams<Real>& p);

}  // namespace steipcn
