#include "steipcn/encodings.hpp"

#include "steipcn/errors.hpp"

namespace steipcn {

template <class Real>
Tensor<Real> normal_init_tensor(Shape dims, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 0.1);
    auto t = tensor<Real>(std::move(dims));
    for (auto& v : t->v) v = static_cast<Real>(dist(rng));
    return t;
}

template <class Real>
EmbeddingTables<Real> init_tables(int n_nodes, int t_d, int alpha, int beta, int d, std::mt19937_64& rng,
                                  const TableMask& mask) {
    if (n_nodes < 1 || t_d < 1 || alpha < 0 || beta < 0 || d < 1)
        throw ContractError("init_tables: dimensions must be positive");
    EmbeddingTables<Real> t;
    t.dim = d;
    if (mask.spatial) t.z_s = normal_init_tensor<Real>({n_nodes, d}, rng);
    if (mask.temporal) {
        t.z_d = normal_init_tensor<Real>({t_d, d}, rng);
        t.z_w = normal_init_tensor<Real>({7, d}, rng);
    }
    if (mask.spatial_dist) t.z_sd = normal_init_tensor<Real>({alpha + 1, d}, rng);
    if (mask.temporal_dist) t.z_td = normal_init_tensor<Real>({beta + 1, d}, rng);
    return t;
}

template <class Real>
Tensor<Real> temporal_encoding(Tape<Real>& tape, const EmbeddingTables<Real>& tables, int slot, int dow) {
    auto rows = temporal_encoding_rows(tape, tables, {slot}, {dow});
    return reshape(tape, rows, {tables.dim});
}

template <class Real>
Tensor<Real> temporal_encoding_rows(Tape<Real>& tape, const EmbeddingTables<Real>& tables,
                                    const std::vector<int>& slots, const std::vector<int>& dows) {
    if (!tables.z_d || !tables.z_w) throw ContractError("temporal_encoding: temporal tables ablated");
    if (slots.size() != dows.size()) throw ContractError("temporal_encoding: slot/dow count mismatch");
    auto day = gather_rows(tape, tables.z_d, slots);
    auto week = gather_rows(tape, tables.z_w, dows);
    return add(tape, day, week);
}

#define STEIPCN_INSTANTIATE(Real)                                                                       \
    template Tensor<Real> normal_init_tensor<Real>(Shape, std::mt19937_64&);                            \
    template EmbeddingTables<Real> init_tables<Real>(int, int, int, int, int, std::mt19937_64&,         \
                                                     const TableMask&);                                 \
    template Tensor<Real> temporal_encoding<Real>(Tape<Real>&, const EmbeddingTables<Real>&, int, int); \
    template Tensor<Real> temporal_encoding_rows<Real>(Tape<Real>&, const EmbeddingTables<Real>&,       \
                                                       const std::vector<int>&, const std::vector<int>&);

STEIPCN_INSTANTIATE(float)
STEIPCN_INSTANTIATE(double)

#undef STEIPCN_INSTANTIATE

}  // namespace steipcn
