#include "steipcn/stei.hpp"

#include "steipcn/errors.hpp"

namespace steipcn {

namespace {

// One exp(poly_k) evaluation; the single code path both inference routes go
// through, which is what makes them bitwise comparable.
template <class Real>
Tensor<Real> exp_poly(Tape<Real>& tape, const Tensor<Real>& z_row, const Tensor<Real>& mu) {
    ++op_counters().poly_evals;
    return expop(tape, scale(tape, euclid_dist(tape, z_row, mu), Real(-1)));
}

template <class Real>
Tensor<Real> row_of(Tape<Real>& tape, const Tensor<Real>& table, int r, int d) {
    return reshape(tape, gather_rows(tape, table, {r}), {d});
}

// exp(-||row - mu||) per row of a [R, d] matrix -> [R].
template <class Real>
Tensor<Real> exp_poly_rows(Tape<Real>& tape, const Tensor<Real>& rows, const Tensor<Real>& mu) {
    const int r_count = rows->dims[0];
    const int d = rows->dims[1];
    std::vector<Tensor<Real>> terms;
    terms.reserve(r_count);
    for (int r = 0; r < r_count; ++r) terms.push_back(exp_poly(tape, row_of(tape, rows, r, d), mu));
    return concat(tape, terms, 0);
}

template <class Real>
void check_inputs(const EmbeddingTables<Real>& tables, const PolyCenters<Real>& centers,
                  const STIndexPlan& plan, const WindowCalendar& cal) {
    const size_t need = static_cast<size_t>(plan.t_h + plan.beta);
    if (cal.slot.size() < need || cal.dow.size() < need)
        throw ContractError("infer_weights: calendar covers " + std::to_string(cal.slot.size()) +
                            " positions, need " + std::to_string(need));
    const bool sce = static_cast<bool>(tables.z_s);
    const bool tce = static_cast<bool>(tables.z_d);
    if (sce && (!centers.mu[0] || !centers.mu[1])) throw ContractError("infer_weights: missing mu1/mu2");
    if (tce && (!centers.mu[2] || !centers.mu[3])) throw ContractError("infer_weights: missing mu3/mu4");
    if (tables.z_sd && !centers.mu[4]) throw ContractError("infer_weights: missing mu5");
    if (tables.z_td && !centers.mu[5]) throw ContractError("infer_weights: missing mu6");
}

// Temporal coordinate encodings for every calendar position: [t_h+beta, d].
template <class Real>
Tensor<Real> window_temporal_rows(Tape<Real>& tape, const EmbeddingTables<Real>& tables,
                                  const STIndexPlan& plan, const WindowCalendar& cal) {
    std::vector<int> slots(cal.slot.begin(), cal.slot.begin() + plan.t_h + plan.beta);
    std::vector<int> dows(cal.dow.begin(), cal.dow.begin() + plan.t_h + plan.beta);
    return temporal_encoding_rows(tape, tables, slots, dows);
}

}  // namespace

template <class Real>
PolyCenters<Real> init_centers(int d, std::mt19937_64& rng, bool sce, bool tce, bool sde, bool tde) {
    PolyCenters<Real> c;
    c.dim = d;
    if (sce) {
        c.mu[0] = normal_init_tensor<Real>({d}, rng);
        c.mu[1] = normal_init_tensor<Real>({d}, rng);
    }
    if (tce) {
        c.mu[2] = normal_init_tensor<Real>({d}, rng);
        c.mu[3] = normal_init_tensor<Real>({d}, rng);
    }
    if (sde) c.mu[4] = normal_init_tensor<Real>({d}, rng);
    if (tde) c.mu[5] = normal_init_tensor<Real>({d}, rng);
    return c;
}

STIndexPlan build_index_plan(const STEdgeSet& edges, int t_h) {
    if (t_h < 1) throw ContractError("build_index_plan: t_h must be >= 1");
    STIndexPlan p;
    p.t_h = t_h;
    p.beta = edges.beta;
    p.n_nodes = edges.n_nodes;
    p.entries = static_cast<int64_t>(t_h) * edges.m_total();
    p.zero_row = t_h * edges.n_nodes;

    const size_t n = static_cast<size_t>(p.entries);
    p.target_node.reserve(n);
    p.source_node.reserve(n);
    p.target_time.reserve(n);
    p.source_time.reserve(n);
    p.hop.reserve(n);
    p.offset.reserve(n);
    p.pattern.reserve(n);
    p.agg_target_row.reserve(n);
    p.agg_source_row.reserve(n);

    for (int t = 0; t < t_h; ++t) {
        for (size_t pair = 0; pair < edges.spatial_pairs.size(); ++pair) {
            const STEdge& e = edges.spatial_pairs[pair];
            for (int b = 0; b <= edges.beta; ++b) {
                p.target_node.push_back(e.i);
                p.source_node.push_back(e.j);
                p.target_time.push_back(t);
                p.source_time.push_back(t - b + edges.beta);
                p.hop.push_back(e.hop);
                p.offset.push_back(b);
                p.pattern.push_back(static_cast<int>(pair) * (edges.beta + 1) + b);
                p.agg_target_row.push_back(t * edges.n_nodes + e.i);
                p.agg_source_row.push_back(t - b >= 0 ? (t - b) * edges.n_nodes + e.j : p.zero_row);
            }
        }
    }
    return p;
}

template <class Real>
Tensor<Real> poly(Tape<Real>& tape, const Tensor<Real>& z, const Tensor<Real>& mu) {
    return scale(tape, euclid_dist(tape, z, mu), Real(-1));
}

template <class Real>
STWeights<Real> infer_weights(Tape<Real>& tape, const EmbeddingTables<Real>& tables,
                              const PolyCenters<Real>& centers, const STIndexPlan& plan,
                              const WindowCalendar& cal) {
    check_inputs(tables, centers, plan, cal);
    const int d = tables.dim;
    const bool sce = static_cast<bool>(tables.z_s);
    const bool tce = static_cast<bool>(tables.z_d);
    const bool sde = static_cast<bool>(tables.z_sd);
    const bool tde = static_cast<bool>(tables.z_td);

    Tensor<Real> zt;
    if (tce) zt = window_temporal_rows(tape, tables, plan, cal);

    std::vector<Tensor<Real>> entry_weights;
    entry_weights.reserve(static_cast<size_t>(plan.entries));
    for (int64_t e = 0; e < plan.entries; ++e) {
        std::vector<Tensor<Real>> terms;
        if (sce) {
            terms.push_back(exp_poly(tape, row_of(tape, tables.z_s, plan.target_node[e], d), centers.mu[0]));
            terms.push_back(exp_poly(tape, row_of(tape, tables.z_s, plan.source_node[e], d), centers.mu[1]));
        }
        if (tce) {
            terms.push_back(exp_poly(tape, row_of(tape, zt, plan.target_time[e] + plan.beta, d), centers.mu[2]));
            terms.push_back(exp_poly(tape, row_of(tape, zt, plan.source_time[e], d), centers.mu[3]));
        }
        if (sde) terms.push_back(exp_poly(tape, row_of(tape, tables.z_sd, plan.hop[e], d), centers.mu[4]));
        if (tde) terms.push_back(exp_poly(tape, row_of(tape, tables.z_td, plan.offset[e], d), centers.mu[5]));

        if (terms.empty()) {
            entry_weights.push_back(tensor<Real>({1}));
        } else {
            Tensor<Real> w = terms[0];
            for (size_t k = 1; k < terms.size(); ++k) w = add(tape, w, terms[k]);
            entry_weights.push_back(w);
        }
    }
    STWeights<Real> out;
    out.s = concat(tape, entry_weights, 0);
    out.plan = &plan;
    return out;
}

template <class Real>
STWeights<Real> factored_infer_weights(Tape<Real>& tape, const EmbeddingTables<Real>& tables,
                                       const PolyCenters<Real>& centers, const STIndexPlan& plan,
                                       const WindowCalendar& cal) {
    check_inputs(tables, centers, plan, cal);
    const bool sce = static_cast<bool>(tables.z_s);
    const bool tce = static_cast<bool>(tables.z_d);
    const bool sde = static_cast<bool>(tables.z_sd);
    const bool tde = static_cast<bool>(tables.z_td);

    std::vector<Tensor<Real>> terms;
    if (sce) {
        auto c1 = exp_poly_rows(tape, tables.z_s, centers.mu[0]);  // N evaluations
        auto c2 = exp_poly_rows(tape, tables.z_s, centers.mu[1]);  // N
        terms.push_back(gather_rows(tape, c1, plan.target_node));
        terms.push_back(gather_rows(tape, c2, plan.source_node));
    }
    if (tce) {
        auto zt = window_temporal_rows(tape, tables, plan, cal);  // [t_h+beta, d]
        std::vector<int> window_rows(plan.t_h);
        for (int t = 0; t < plan.t_h; ++t) window_rows[t] = t + plan.beta;
        auto zt_targets = gather_rows(tape, zt, window_rows);
        auto c3 = exp_poly_rows(tape, zt_targets, centers.mu[2]);  // T_h
        auto c4 = exp_poly_rows(tape, zt, centers.mu[3]);          // T_h + beta
        terms.push_back(gather_rows(tape, c3, plan.target_time));
        terms.push_back(gather_rows(tape, c4, plan.source_time));
    }
    if (sde) {
        auto c5 = exp_poly_rows(tape, tables.z_sd, centers.mu[4]);  // alpha+1
        terms.push_back(gather_rows(tape, c5, plan.hop));
    }
    if (tde) {
        auto c6 = exp_poly_rows(tape, tables.z_td, centers.mu[5]);  // beta+1
        terms.push_back(gather_rows(tape, c6, plan.offset));
    }

    STWeights<Real> out;
    if (terms.empty()) {
        out.s = tensor<Real>({static_cast<int>(plan.entries)});
    } else {
        Tensor<Real> s = terms[0];
        for (size_t k = 1; k < terms.size(); ++k) s = add(tape, s, terms[k]);
        out.s = s;
    }
    out.plan = &plan;
    return out;
}

#define STEIPCN_INSTANTIATE(Real)                                                                             \
    template PolyCenters<Real> init_centers<Real>(int, std::mt19937_64&, bool, bool, bool, bool);             \
    template Tensor<Real> poly<Real>(Tape<Real>&, const Tensor<Real>&, const Tensor<Real>&);                  \
    template STWeights<Real> infer_weights<Real>(Tape<Real>&, const EmbeddingTables<Real>&,                   \
                                                 const PolyCenters<Real>&, const STIndexPlan&,                \
                                                 const WindowCalendar&);                                      \
    template STWeights<Real> factored_infer_weights<Real>(Tape<Real>&, const EmbeddingTables<Real>&,          \
                                                          const PolyCenters<Real>&, const STIndexPlan&,       \
                                                          const WindowCalendar&);

STEIPCN_INSTANTIATE(float)
STEIPCN_INSTANTIATE(double)

#undef STEIPCN_INSTANTIATE

}  // namespace steipcn
