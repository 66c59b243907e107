#pragma once

#include <array>
#include <random>

#include "steipcn/core.hpp"
#include "steipcn/encodings.hpp"
#include "steipcn/graph.hpp"

namespace steipcn {

// The six trainable inference centers (6d parameters total). Ablated center
// slots stay null alongside their encoding family.
template <class Real>
struct PolyCenters {
    std::array<Tensor<Real>, 6> mu{};  // mu[k-1] pairs with poly_k
    int dim = 0;
};

template <class Real>
PolyCenters<Real> init_centers(int d, std::mt19937_64& rng, bool sce = true, bool tce = true, bool sde = true,
                               bool tde = true);

// Calendar slice covering the window and its temporal reach-back: index p
// holds (slot, dow) of window-relative time tau = p - beta, p in
// [0, t_h + beta).
struct WindowCalendar {
    std::vector<int> slot;
    std::vector<int> dow;
    int beta = 0;
};

// Flattened enumeration of all spatial-temporal edge instances for one
// window: t-major, then spatial pair order, then offset b. Precomputed once
// per (edge set, t_h) and shared by weight inference and aggregation.
struct STIndexPlan {
    int t_h = 0;
    int beta = 0;
    int n_nodes = 0;
    int64_t entries = 0;  // t_h * m_spatial * (beta+1) == t_h * M

    std::vector<int> target_node;  // i
    std::vector<int> source_node;  // j
    std::vector<int> target_time;  // t in [0, t_h)
    std::vector<int> source_time;  // (t-b) + beta, index into the calendar slice
    std::vector<int> hop;          // a = SDist(i,j)
    std::vector<int> offset;       // b = t - tau
    std::vector<int> pattern;      // pair_index*(beta+1) + b (adaptive-table lookup)

    std::vector<int> agg_target_row;  // t*N + i
    std::vector<int> agg_source_row;  // (t-b)*N + j, or zero_row when t-b < 0
    int zero_row = 0;                 // t_h*N: index of the zero-filled feature row
};

STIndexPlan build_index_plan(const STEdgeSet& edges, int t_h);

// Dynamic edge weights aligned with an STIndexPlan entry enumeration.
template <class Real>
struct STWeights {
    Tensor<Real> s;  // [entries]
    const STIndexPlan* plan = nullptr;
};

// poly_k(z) = -||z - mu_k||, as a [1] tensor.
template <class Real>
Tensor<Real> poly(Tape<Real>& tape, const Tensor<Real>& z, const Tensor<Real>& mu);

// Reference path: evaluates all six exp(poly) terms once per edge instance
// (6*T_h*M poly evaluations). Ablated encoding families drop out of the sum.
template <class Real>
STWeights<Real> infer_weights(Tape<Real>& tape, const EmbeddingTables<Real>& tables,
                              const PolyCenters<Real>& centers, const STIndexPlan& plan,
                              const WindowCalendar& cal);

// Production path: evaluates each distinct index once (N + N + T_h +
// (T_h+beta) + (alpha+1) + (beta+1) poly evaluations) and assembles per-edge
// sums by gathering. Bitwise identical to infer_weights.
template <class Real>
STWeights<Real> factored_infer_weights(Tape<Real>& tape, const EmbeddingTables<Real>& tables,
                                       const PolyCenters<Real>& centers, const STIndexPlan& plan,
                                       const WindowCalendar& cal);

}  // namespace steipcn
