#include "steipcn/stgcn.hpp"

#include "steipcn/errors.hpp"

namespace steipcn {

namespace {

// Broadcast index vectors over the flattened [T_h, N] grid.
std::vector<int> node_of_flat(int t_h, int n) {
    std::vector<int> idx(static_cast<size_t>(t_h) * n);
    for (int t = 0; t < t_h; ++t)
        for (int i = 0; i < n; ++i) idx[static_cast<size_t>(t) * n + i] = i;
    return idx;
}

std::vector<int> time_of_flat(int t_h, int n) {
    std::vector<int> idx(static_cast<size_t>(t_h) * n);
    for (int t = 0; t < t_h; ++t)
        for (int i = 0; i < n; ++i) idx[static_cast<size_t>(t) * n + i] = t;
    return idx;
}

}  // namespace

template <class Real>
Tensor<Real> input_encode(Tape<Real>& tape, const Tensor<Real>& x_raw, const LocalLayerParams<Real>& p) {
    if (x_raw->dims.size() != 3 || x_raw->dims[2] != 1)
        throw ContractError("input_encode: expected [T_h, N, 1], got " + shape_str(x_raw->dims));
    return linear(tape, x_raw, p.w0, p.b0);
}

template <class Real>
Tensor<Real> aggregate(Tape<Real>& tape, const Tensor<Real>& x_enc, const STWeights<Real>& weights) {
    const STIndexPlan& plan = *weights.plan;
    if (x_enc->dims.size() != 3 || x_enc->dims[0] != plan.t_h || x_enc->dims[1] != plan.n_nodes)
        throw ContractError("aggregate: features " + shape_str(x_enc->dims) + " do not match plan [" +
                            std::to_string(plan.t_h) + "," + std::to_string(plan.n_nodes) + ",C]");
    if (weights.s->dims != Shape{static_cast<int>(plan.entries)})
        throw ContractError("aggregate: weights not aligned with plan");
    const int c = x_enc->dims[2];
    const int rows = plan.t_h * plan.n_nodes;

    auto flat = reshape(tape, x_enc, {rows, c});
    auto zero_row = tensor<Real>({1, c});  // features before the window
    auto padded = concat(tape, std::vector<Tensor<Real>>{flat, zero_row}, 0);
    auto gathered = gather_rows(tape, padded, plan.agg_source_row);
    auto summed = scatter_add_weighted(tape, gathered, weights.s, plan.agg_target_row, rows);
    return reshape(tape, summed, {plan.t_h, plan.n_nodes, c});
}

template <class Real>
Tensor<Real> update(Tape<Real>& tape, const Tensor<Real>& x_agg, const LocalLayerParams<Real>& p) {
    return linear(tape, x_agg, p.w1, p.b1);
}

template <class Real>
Tensor<Real> stpgau(Tape<Real>& tape, const Tensor<Real>& x_upd, const EmbeddingTables<Real>& tables,
                    const WindowCalendar& cal, const LocalLayerParams<Real>& p) {
    if (!p.w4 || !p.w5) throw ContractError("stpgau: gate parameters absent");
    const int t_h = x_upd->dims[0];
    const int n = x_upd->dims[1];
    const int width = x_upd->dims[2];

    auto h = reshape(tape, x_upd, {t_h * n, width});
    if (p.w2 && tables.z_s) {
        auto proj_s = linear(tape, tables.z_s, p.w2, p.b2);  // [N, width]
        h = add(tape, h, gather_rows(tape, proj_s, node_of_flat(t_h, n)));
    }
    if (p.w3 && tables.z_d) {
        if (static_cast<int>(cal.slot.size()) < t_h + cal.beta)
            throw ContractError("stpgau: calendar shorter than window");
        std::vector<int> slots(t_h), dows(t_h);
        for (int t = 0; t < t_h; ++t) {
            slots[t] = cal.slot[t + cal.beta];
            dows[t] = cal.dow[t + cal.beta];
        }
        auto zt = temporal_encoding_rows(tape, tables, slots, dows);  // [T_h, d]
        auto proj_t = linear(tape, zt, p.w3, p.b3);                   // [T_h, width]
        h = add(tape, h, gather_rows(tape, proj_t, time_of_flat(t_h, n)));
    }

    auto value = linear(tape, h, p.w4, p.b4);
    auto gate = sigmoid(tape, linear(tape, h, p.w5, p.b5));
    auto out = elementwise_mul(tape, value, gate);
    return reshape(tape, out, {t_h, n, p.w4->dims[0]});
}

#define STEIPCN_INSTANTIATE(Real)                                                                          \
    template Tensor<Real> input_encode<Real>(Tape<Real>&, const Tensor<Real>&,                             \
                                             const LocalLayerParams<Real>&);                               \
    template Tensor<Real> aggregate<Real>(Tape<Real>&, const Tensor<Real>&, const STWeights<Real>&);       \
    template Tensor<Real> update<Real>(Tape<Real>&, const Tensor<Real>&, const LocalLayerParams<Real>&);   \
    template Tensor<Real> stpgau<Real>(Tape<Real>&, const Tensor<Real>&, const EmbeddingTables<Real>&,     \
                                       const WindowCalendar&, const LocalLayerParams<Real>&);

STEIPCN_INSTANTIATE(float)
STEIPCN_INSTANTIATE(double)

#undef STEIPCN_INSTANTIATE

}  // namespace steipcn
