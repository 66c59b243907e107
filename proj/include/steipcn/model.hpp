#pragma once

#include <string>

#include "steipcn/core.hpp"
#include "steipcn/data.hpp"
#include "steipcn/encodings.hpp"
#include "steipcn/graph.hpp"
#include "steipcn/mvc.hpp"
#include "steipcn/stei.hpp"
#include "steipcn/stgcn.hpp"
#include "steipcn/tdcn.hpp"

namespace steipcn {

// Component toggles matching the ablation variants; all independent.
struct AblationFlags {
    bool no_sce = false;     // drop spatial absolute-coordinate encoding
    bool no_tce = false;     // drop temporal absolute-coordinate encoding
    bool no_sde = false;     // drop spatial relative-distance encoding
    bool no_tde = false;     // drop temporal relative-distance encoding
    bool no_stei = false;    // free adaptive edge weights instead of inference
    bool no_stpgau = false;  // fold coordinate encodings into input encoding
    bool no_gcn = false;     // bypass the joint spatial-temporal layer
    bool no_tdcn = false;    // drop the long-range temporal stack
    bool no_mvc = false;     // single head conv instead of multi-view fusion
};

struct ModelConfig {
    int alpha = 4;
    int beta = 2;
    int d = 6;
    int channels = 64;
    int t_h = 12;
    int t_p = 12;
    int tdcn_layers = 3;
    uint64_t seed = 42;
    AblationFlags ab;

    void validate() const;

    // Derived component presence.
    bool has_gcn() const { return !ab.no_gcn; }
    bool has_stei() const { return has_gcn() && !ab.no_stei; }
    bool has_stpgau() const { return has_gcn() && !ab.no_stpgau; }
    bool has_tdcn() const { return !ab.no_tdcn; }
    bool use_sce() const { return has_gcn() && !ab.no_sce; }
    bool use_tce() const { return has_gcn() && !ab.no_tce; }
    bool use_sde() const { return has_stei() && !ab.no_sde; }
    bool use_tde() const { return has_stei() && !ab.no_tde; }
};

// All trainable state plus the frozen graph-derived plumbing for one node
// geometry. Parameters are registered in a fixed order; forward() reads them
// through the module structs.
template <class Real>
struct ModelState {
    ModelConfig cfg;
    int n_nodes = 0;
    int t_d = 0;

    STEdgeSet edges;
    STIndexPlan plan;

    EmbeddingTables<Real> tables;
    PolyCenters<Real> centers;
    Tensor<Real> adaptive;  // [m_spatial*(beta+1)] when no_stei
    LocalLayerParams<Real> local;
    TDCNStack<Real> tdcn;
    MVCParams<Real> mvc;

    double norm_mean = 0;
    double norm_std = 1;

    ParamRegistry<Real> params;

    int encode_channels() const;  // channels of the input encoding (view 1)
};

template <class Real>
ModelState<Real> build_model(const ModelConfig& cfg, const STEdgeSet& edges, int t_d);

// Intermediate activations exposed for the causality and view probes.
template <class Real>
struct ForwardTrace {
    Tensor<Real> x_enc, x_agg, x_upd, view2, view3;
    std::vector<Tensor<Real>> views;
    Tensor<Real> prediction;  // [T_p, N, 1]
};

template <class Real>
ForwardTrace<Real> forward_trace(Tape<Real>& tape, ModelState<Real>& state, const WindowSample& window);

template <class Real>
Tensor<Real> forward(Tape<Real>& tape, ModelState<Real>& state, const WindowSample& window);

template <class Real>
int64_t param_count(const ModelState<Real>& state) {
    return state.params.total_elements();
}

// "STPC" container: config echo, normalization stats, then every parameter
// as name + dims + 32-bit values.
template <class Real>
void save_checkpoint(const ModelState<Real>& state, const std::string& path);

template <class Real>
ModelState<Real> load_checkpoint(const std::string& path, const RoadGraph& graph);

}  // namespace steipcn
