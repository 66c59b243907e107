#pragma once

#include <random>

#include "steipcn/core.hpp"

namespace steipcn {

// Which encoding families exist; ablation variants null out entries.
struct TableMask {
    bool spatial = true;        // z_s
    bool temporal = true;       // z_d + z_w
    bool spatial_dist = true;   // z_sd
    bool temporal_dist = true;  // z_td
};

// The four trainable encoding families. Null tensors mark ablated families.
template <class Real>
struct EmbeddingTables {
    Tensor<Real> z_s;   // [N, d]        absolute spatial coordinate
    Tensor<Real> z_d;   // [T_d, d]      time-of-day
    Tensor<Real> z_w;   // [7, d]        day-of-week
    Tensor<Real> z_sd;  // [alpha+1, d]  relative spatial distance
    Tensor<Real> z_td;  // [beta+1, d]   relative temporal distance
    int dim = 0;
};

// Every present entry drawn i.i.d. Normal(0, 0.1^2) from rng, in declaration
// order (z_s, z_d, z_w, z_sd, z_td).
template <class Real>
EmbeddingTables<Real> init_tables(int n_nodes, int t_d, int alpha, int beta, int d, std::mt19937_64& rng,
                                  const TableMask& mask = {});

// z_d[slot] + z_w[dow] as a [d] tensor; gradients reach exactly those rows.
template <class Real>
Tensor<Real> temporal_encoding(Tape<Real>& tape, const EmbeddingTables<Real>& tables, int slot, int dow);

// Row-batched variant: [count, d] for parallel (slot, dow) index vectors.
template <class Real>
Tensor<Real> temporal_encoding_rows(Tape<Real>& tape, const EmbeddingTables<Real>& tables,
                                    const std::vector<int>& slots, const std::vector<int>& dows);

// Shared initializer for embedding-style tensors: Normal(0, 0.1^2).
template <class Real>
Tensor<Real> normal_init_tensor(Shape dims, std::mt19937_64& rng);

}  // namespace steipcn
