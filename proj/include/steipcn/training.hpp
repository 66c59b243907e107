#pragma once

#include "steipcn/data.hpp"
#include "steipcn/model.hpp"

namespace steipcn {

struct TrainConfig {
    double lr = 0.002;
    int batch_size = 32;
    int max_epochs = 200;
    int patience = 15;
    double mape_epsilon = 1.0;  // |target| below this is excluded from MAPE
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    uint64_t seed = 42;

    // Optional convergence stop for smoke runs: finish the epoch and stop
    // once the denormalized training MAE drops below this. 0 disables.
    double target_train_mae = 0;
};

// First/second moments aligned with the registry's parameter order.
template <class Real>
struct AdamState {
    std::vector<std::vector<Real>> m, v;
    int64_t step = 0;
};

template <class Real>
AdamState<Real> init_adam(const ParamRegistry<Real>& params);

// One bias-corrected Adam update from the accumulated gradients; gradients
// are zeroed afterwards.
template <class Real>
void adam_step(ParamRegistry<Real>& params, AdamState<Real>& adam, const TrainConfig& cfg);

struct HorizonMetrics {
    double mae = 0;
    double rmse = 0;
    double mape = 0;  // percent
};

// Metric kernels over flat arrays (NaN targets are skipped, near-
// zero targets are skipped for MAPE only).
HorizonMetrics compute_metrics(const std::vector<double>& pred, const std::vector<double>& target,
                               double mape_epsilon);

struct EvalReport {
    std::vector<HorizonMetrics> per_horizon;  // index h-1
    HorizonMetrics aggregate;
    int64_t windows = 0;
};

template <class Real>
EvalReport evaluate(ModelState<Real>& model, const TrafficSeries& series, IndexRange range,
                    double mape_epsilon);

struct EpochStats {
    int epoch = 0;         // 1-based
    double train_mae = 0;  // denormalized
    double val_mae = 0;
    double val_rmse = 0;
    double val_mape = 0;
};

struct TrainResult {
    std::vector<EpochStats> history;
    int best_epoch = 0;  // 1-based
    double best_val_mae = 0;
};

// MAE-loss optimization with shuffled mini-batches, per-epoch validation and
// early stopping; the model is left holding the best-validation parameters.
template <class Real>
TrainResult train(ModelState<Real>& model, const TrafficSeries& series, const SplitSpec& split_spec,
                  const TrainConfig& cfg);

// Denormalized predictions for every window of a range, for export:
// (window_start, horizon 1-based, node, value).
struct PredictionRow {
    int window_start = 0;
    int horizon = 0;
    int node = 0;
    double value = 0;
};
template <class Real>
std::vector<PredictionRow> predict_range(ModelState<Real>& model, const TrafficSeries& series,
                                         IndexRange range);

}  // namespace steipcn
