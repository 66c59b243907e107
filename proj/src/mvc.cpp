#include "steipcn/mvc.hpp"

#include "steipcn/errors.hpp"

namespace steipcn {

template <class Real>
Tensor<Real> view_compress(Tape<Real>& tape, const Tensor<Real>& x, const Tensor<Real>& w,
                           const Tensor<Real>& b) {
    if (x->dims.size() != 3 || w->dims.size() != 3 || x->dims[2] != w->dims[1] || x->dims[0] != w->dims[2])
        throw ContractError("view_compress: x " + shape_str(x->dims) + " incompatible with w " +
                            shape_str(w->dims));
    const int T = x->dims[0];
    const int n = x->dims[1];
    const int cin = x->dims[2];
    const int cout = w->dims[0];
    if (b->dims != Shape{cout}) throw ContractError("view_compress: bad bias shape");

    auto out = tensor<Real>({n, cout});
    out->from_op = true;
    const Real* xv = x->v.data();
    const Real* wv = w->v.data();
    for (int i = 0; i < n; ++i) {
        Real* orow = out->v.data() + static_cast<int64_t>(i) * cout;
        for (int co = 0; co < cout; ++co) orow[co] = b->v[co];
        for (int t = 0; t < T; ++t) {
            const Real* xr = xv + (static_cast<int64_t>(t) * n + i) * cin;
            for (int co = 0; co < cout; ++co) {
                const Real* wr = wv + (static_cast<int64_t>(co) * cin) * T + t;
                Real acc = 0;
                for (int ci = 0; ci < cin; ++ci) acc += wr[static_cast<int64_t>(ci) * T] * xr[ci];
                orow[co] += acc;
            }
        }
    }

    tape.record([x, w, b, out, T, n, cin, cout] {
        if (!out->has_grad()) return;
        const Real* go = out->g.data();
        const bool tx = x->tracked();
        const bool tw = w->tracked();
        if (tx) x->ensure_grad();
        if (tw) w->ensure_grad();
        for (int i = 0; i < n; ++i) {
            const Real* gr = go + static_cast<int64_t>(i) * cout;
            for (int t = 0; t < T; ++t) {
                const int64_t xoff = (static_cast<int64_t>(t) * n + i) * cin;
                for (int co = 0; co < cout; ++co) {
                    const Real g = gr[co];
                    const int64_t woff = (static_cast<int64_t>(co) * cin) * T + t;
                    if (tx) {
                        Real* gx = x->g.data() + xoff;
                        for (int ci = 0; ci < cin; ++ci) gx[ci] += g * w->v[woff + static_cast<int64_t>(ci) * T];
                    }
                    if (tw) {
                        const Real* xr = x->v.data() + xoff;
                        for (int ci = 0; ci < cin; ++ci)
                            w->g[woff + static_cast<int64_t>(ci) * T] += g * xr[ci];
                    }
                }
            }
        }
        if (b->tracked()) {
            b->ensure_grad();
            for (int i = 0; i < n; ++i)
                for (int co = 0; co < cout; ++co) b->g[co] += go[static_cast<int64_t>(i) * cout + co];
        }
    });
    return out;
}

template <class Real>
Tensor<Real> view_glu(Tape<Real>& tape, const Tensor<Real>& v, const MVCViewParams<Real>& p) {
    auto value = linear(tape, v, p.w7, p.b7);
    auto gate = sigmoid(tape, linear(tape, v, p.w8, p.b8));
    return elementwise_mul(tape, value, gate);
}

template <class Real>
Tensor<Real> fuse_predict(Tape<Real>& tape, const std::vector<Tensor<Real>>& views, const MVCParams<Real>& p,
                          int t_p) {
    if (views.empty() || views.size() != p.views.size())
        throw ContractError("fuse_predict: " + std::to_string(views.size()) + " views for " +
                            std::to_string(p.views.size()) + " parameter sets");
    std::vector<Tensor<Real>> activated;
    activated.reserve(views.size());
    for (size_t i = 0; i < views.size(); ++i) {
        auto compressed = view_compress(tape, views[i], p.views[i].w6, p.views[i].b6);
        activated.push_back(view_glu(tape, compressed, p.views[i]));
    }
    auto fused = views.size() == 1 ? activated[0] : concat(tape, activated, 1);  // [N, VC]
    auto value = linear(tape, fused, p.fuse_w7, p.fuse_b7);
    auto gate = sigmoid(tape, linear(tape, fused, p.fuse_w8, p.fuse_b8));
    auto gated = elementwise_mul(tape, value, gate);
    auto horizons = linear(tape, gated, p.head_w, p.head_b);  // [N, T_p]
    auto flipped = transpose2d(tape, horizons);               // [T_p, N]
    const int n = flipped->dims[1];
    return reshape(tape, flipped, {t_p, n, 1});
}

template <class Real>
Tensor<Real> direct_predict(Tape<Real>& tape, const Tensor<Real>& trunk, const MVCParams<Real>& p, int t_p) {
    if (!p.direct_w) throw ContractError("direct_predict: head-only parameters absent");
    auto horizons = view_compress(tape, trunk, p.direct_w, p.direct_b);  // [N, T_p]
    auto flipped = transpose2d(tape, horizons);
    const int n = flipped->dims[1];
    return reshape(tape, flipped, {t_p, n, 1});
}

#define STEIPCN_INSTANTIATE(Real)                                                                          \
    template Tensor<Real> view_compress<Real>(Tape<Real>&, const Tensor<Real>&, const Tensor<Real>&,       \
                                              const Tensor<Real>&);                                        \
    template Tensor<Real> view_glu<Real>(Tape<Real>&, const Tensor<Real>&, const MVCViewParams<Real>&);    \
    template Tensor<Real> fuse_predict<Real>(Tape<Real>&, const std::vector<Tensor<Real>>&,                \
                                             const MVCParams<Real>&, int);                                 \
    template Tensor<Real> direct_predict<Real>(Tape<Real>&, const Tensor<Real>&, const MVCParams<Real>&, int);

STEIPCN_INSTANTIATE(float)
STEIPCN_INSTANTIATE(double)

#undef STEIPCN_INSTANTIATE

}  // namespace steipcn
