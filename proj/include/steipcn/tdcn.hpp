#pragma once

#include <random>

#include "steipcn/core.hpp"

namespace steipcn {

template <class Real>
struct TDCNLayer {
    Tensor<Real> w;       // [Cout, Cin, k]
    Tensor<Real> b;       // [Cout]
    Tensor<Real> proj_w;  // pointwise residual projection, null when Cin == Cout
    Tensor<Real> proj_b;
    int dilation = 1;
};

// Stacked dilated causal convolutions. Layer l has dilation 2^(l-1) and
// channel chain C -> C -> 2C -> 4C (doubling after the first layer), plus a
// pointwise output projection back to C channels.
template <class Real>
struct TDCNStack {
    std::vector<TDCNLayer<Real>> layers;
    Tensor<Real> out_w;  // [C, C_last]
    Tensor<Real> out_b;  // [C]
    int kernel = 3;

    // 1 + (k-1) * sum of dilations
    int receptive_field() const {
        int span = 0;
        for (const auto& l : layers) span += (kernel - 1) * l.dilation;
        return 1 + span;
    }
};

// Uniform +-1/sqrt(fan_in) weights, zero biases, drawn in layer order.
template <class Real>
TDCNStack<Real> init_tdcn(int channels, int n_layers, int kernel, std::mt19937_64& rng);

// y = ReLU(causal_dilated_conv(x)) + residual(x), per node.
template <class Real>
Tensor<Real> tdcn_layer(Tape<Real>& tape, const Tensor<Real>& x, const TDCNLayer<Real>& layer);

// All layers in sequence, then the channel-adjusting output projection.
template <class Real>
Tensor<Real> tdcn_forward(Tape<Real>& tape, const Tensor<Real>& x, const TDCNStack<Real>& stack);

// Shared initializer for affine/conv weights: uniform in +-1/sqrt(fan_in).
template <class Real>
Tensor<Real> uniform_init_tensor(Shape dims, int fan_in, std::mt19937_64& rng);

}  // namespace steipcn
