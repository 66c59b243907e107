#include "steipcn/tdcn.hpp"

#include <cmath>

#include "steipcn/errors.hpp"

namespace steipcn {

template <class Real>
Tensor<Real> uniform_init_tensor(Shape dims, int fan_in, std::mt19937_64& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    auto t = tensor<Real>(std::move(dims));
    for (auto& v : t->v) v = static_cast<Real>(dist(rng));
    return t;
}

template <class Real>
TDCNStack<Real> init_tdcn(int channels, int n_layers, int kernel, std::mt19937_64& rng) {
    if (channels < 1 || n_layers < 1 || kernel < 1) throw ContractError("init_tdcn: bad dimensions");
    TDCNStack<Real> s;
    s.kernel = kernel;
    int cin = channels;
    for (int l = 0; l < n_layers; ++l) {
        const int cout = l == 0 ? channels : cin * 2;
        TDCNLayer<Real> layer;
        layer.dilation = 1 << l;
        layer.w = uniform_init_tensor<Real>({cout, cin, kernel}, cin * kernel, rng);
        layer.b = tensor<Real>({cout});
        if (cin != cout) {
            layer.proj_w = uniform_init_tensor<Real>({cout, cin}, cin, rng);
            layer.proj_b = tensor<Real>({cout});
        }
        s.layers.push_back(std::move(layer));
        cin = cout;
    }
    s.out_w = uniform_init_tensor<Real>({channels, cin}, cin, rng);
    s.out_b = tensor<Real>({channels});
    return s;
}

template <class Real>
Tensor<Real> tdcn_layer(Tape<Real>& tape, const Tensor<Real>& x, const TDCNLayer<Real>& layer) {
    if (x->dims.back() != layer.w->dims[1])
        throw ContractError("tdcn_layer: " + std::to_string(x->dims.back()) + " input channels, kernel wants " +
                            std::to_string(layer.w->dims[1]));
    auto conv = relu(tape, causal_dilated_conv1d(tape, x, layer.w, layer.b, layer.dilation));
    auto residual = layer.proj_w ? linear(tape, x, layer.proj_w, layer.proj_b) : x;
    return add(tape, conv, residual);
}

template <class Real>
Tensor<Real> tdcn_forward(Tape<Real>& tape, const Tensor<Real>& x, const TDCNStack<Real>& stack) {
    Tensor<Real> h = x;
    for (const auto& layer : stack.layers) h = tdcn_layer(tape, h, layer);
    return linear(tape, h, stack.out_w, stack.out_b);
}

#define STEIPCN_INSTANTIATE(Real)                                                                    \
    template Tensor<Real> uniform_init_tensor<Real>(Shape, int, std::mt19937_64&);                   \
    template TDCNStack<Real> init_tdcn<Real>(int, int, int, std::mt19937_64&);                       \
    template Tensor<Real> tdcn_layer<Real>(Tape<Real>&, const Tensor<Real>&, const TDCNLayer<Real>&); \
    template Tensor<Real> tdcn_forward<Real>(Tape<Real>&, const Tensor<Real>&, const TDCNStack<Real>&);

STEIPCN_INSTANTIATE(float)
STEIPCN_INSTANTIATE(double)

#undef STEIPCN_INSTANTIATE

}  // namespace steipcn
