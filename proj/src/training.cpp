#include "steipcn/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "steipcn/errors.hpp"

namespace steipcn {

template <class Real>
AdamState<Real> init_adam(const ParamRegistry<Real>& params) {
    AdamState<Real> a;
    a.m.reserve(params.count());
    a.v.reserve(params.count());
    for (const auto& [_, t] : params.items()) {
        a.m.emplace_back(t->v.size(), Real(0));
        a.v.emplace_back(t->v.size(), Real(0));
    }
    return a;
}

template <class Real>
void adam_step(ParamRegistry<Real>& params, AdamState<Real>& adam, const TrainConfig& cfg) {
    if (adam.m.size() != params.count()) throw ContractError("adam_step: state not aligned with registry");
    ++adam.step;
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(adam.step));
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(adam.step));
    const Real b1 = static_cast<Real>(cfg.adam_beta1);
    const Real b2 = static_cast<Real>(cfg.adam_beta2);
    const Real lr = static_cast<Real>(cfg.lr);
    const Real eps = static_cast<Real>(cfg.adam_eps);
    size_t k = 0;
    for (auto& [_, t] : params.items()) {
        auto& m = adam.m[k];
        auto& v = adam.v[k];
        for (size_t i = 0; i < t->v.size(); ++i) {
            const Real g = t->g[i];
            m[i] = b1 * m[i] + (Real(1) - b1) * g;
            v[i] = b2 * v[i] + (Real(1) - b2) * g * g;
            const Real m_hat = m[i] / static_cast<Real>(bc1);
            const Real v_hat = v[i] / static_cast<Real>(bc2);
            t->v[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
        }
        ++k;
    }
    params.zero_grads();
}

HorizonMetrics compute_metrics(const std::vector<double>& pred, const std::vector<double>& target,
                               double mape_epsilon) {
    if (pred.size() != target.size()) throw ContractError("compute_metrics: size mismatch");
    double abs_sum = 0, sq_sum = 0, ape_sum = 0;
    int64_t n = 0, n_mape = 0;
    for (size_t i = 0; i < pred.size(); ++i) {
        if (std::isnan(target[i])) continue;  // missing ground truth
        const double e = pred[i] - target[i];
        abs_sum += std::abs(e);
        sq_sum += e * e;
        ++n;
        if (std::abs(target[i]) >= mape_epsilon) {
            ape_sum += std::abs(e / target[i]);
            ++n_mape;
        }
    }
    HorizonMetrics m;
    if (n > 0) {
        m.mae = abs_sum / static_cast<double>(n);
        m.rmse = std::sqrt(sq_sum / static_cast<double>(n));
    }
    if (n_mape > 0) m.mape = 100.0 * ape_sum / static_cast<double>(n_mape);
    return m;
}

namespace {

// Per-horizon error accumulation shared by evaluate() and validation.
struct MetricAccum {
    struct Bucket {
        double abs_sum = 0, sq_sum = 0, ape_sum = 0;
        int64_t n = 0, n_mape = 0;
    };
    std::vector<Bucket> horizon;
    Bucket all;
    double mape_epsilon;

    explicit MetricAccum(int t_p, double eps) : horizon(t_p), mape_epsilon(eps) {}

    void add(int h, double pred, double target) {
        if (std::isnan(target)) return;
        const double e = pred - target;
        for (Bucket* b : {&horizon[h], &all}) {
            b->abs_sum += std::abs(e);
            b->sq_sum += e * e;
            ++b->n;
            if (std::abs(target) >= mape_epsilon) {
                b->ape_sum += std::abs(e / target);
                ++b->n_mape;
            }
        }
    }

    static HorizonMetrics finish(const Bucket& b) {
        HorizonMetrics m;
        if (b.n > 0) {
            m.mae = b.abs_sum / static_cast<double>(b.n);
            m.rmse = std::sqrt(b.sq_sum / static_cast<double>(b.n));
        }
        if (b.n_mape > 0) m.mape = 100.0 * b.ape_sum / static_cast<double>(b.n_mape);
        return m;
    }
};

template <class Real>
void check_series(const ModelState<Real>& model, const TrafficSeries& series) {
    if (series.n_nodes != model.n_nodes)
        throw ContractError("series has " + std::to_string(series.n_nodes) + " nodes, model wants " +
                            std::to_string(model.n_nodes));
    if (series.steps_per_day != model.t_d)
        throw ContractError("series has " + std::to_string(series.steps_per_day) +
                            " steps per day, model was built for " + std::to_string(model.t_d));
}

template <class Real>
EvalReport eval_starts(ModelState<Real>& model, const TrafficSeries& series, const std::vector<int>& starts,
                       double mape_epsilon) {
    check_series(model, series);
    const ModelConfig& cfg = model.cfg;
    Normalizer norm{model.norm_mean, model.norm_std};
    MetricAccum accum(cfg.t_p, mape_epsilon);
    for (int start : starts) {
        auto window = make_window(series, norm, start, cfg.t_h, cfg.t_p, cfg.beta);
        Tape<Real> tape;
        auto pred = forward(tape, model, window);
        for (int h = 0; h < cfg.t_p; ++h)
            for (int i = 0; i < model.n_nodes; ++i) {
                const size_t at = static_cast<size_t>(h) * model.n_nodes + i;
                accum.add(h, norm.invert(pred->v[at]), window.target[at]);
            }
    }
    EvalReport report;
    report.windows = static_cast<int64_t>(starts.size());
    for (const auto& b : accum.horizon) report.per_horizon.push_back(MetricAccum::finish(b));
    report.aggregate = MetricAccum::finish(accum.all);
    return report;
}

}  // namespace

template <class Real>
EvalReport evaluate(ModelState<Real>& model, const TrafficSeries& series, IndexRange range,
                    double mape_epsilon) {
    auto starts = window_starts(range, model.cfg.t_h, model.cfg.t_p);
    return eval_starts(model, series, starts, mape_epsilon);
}

template <class Real>
TrainResult train(ModelState<Real>& model, const TrafficSeries& series, const SplitSpec& split_spec,
                  const TrainConfig& cfg) {
    const ModelConfig& mc = model.cfg;
    check_series(model, series);
    if (cfg.lr < 0) throw ContractError("train: lr must not be negative");
    if (cfg.patience < 1) throw ContractError("train: patience must be >= 1");
    if (cfg.batch_size < 1) throw ContractError("train: batch_size must be >= 1");

    const Splits splits = split(series.t_steps, split_spec);
    const Normalizer norm = fit_normalizer(series, splits.train);
    model.norm_mean = norm.mean;
    model.norm_std = norm.std;

    auto train_starts = window_starts(splits.train, mc.t_h, mc.t_p);
    auto val_starts = window_starts(splits.val, mc.t_h, mc.t_p);
    if (train_starts.empty()) throw ContractError("train: training range yields no windows");

    auto adam = init_adam(model.params);
    model.params.zero_grads();

    // Best-validation snapshot (parameter values only).
    std::vector<std::vector<Real>> best_values;
    TrainResult result;
    result.best_val_mae = std::numeric_limits<double>::infinity();
    int epochs_since_best = 0;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::mt19937_64 shuffle_rng(cfg.seed * 0x9E3779B97F4A7C15ULL + static_cast<uint64_t>(epoch));
        std::vector<int> order = train_starts;
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double loss_sum = 0;
        for (size_t at = 0; at < order.size(); at += static_cast<size_t>(cfg.batch_size)) {
            const size_t batch_end = std::min(order.size(), at + static_cast<size_t>(cfg.batch_size));
            const Real inv_batch = Real(1) / static_cast<Real>(batch_end - at);
            for (size_t w = at; w < batch_end; ++w) {
                auto window = make_window(series, norm, order[w], mc.t_h, mc.t_p, mc.beta);
                std::vector<Real> target_norm(window.target.size());
                for (size_t i = 0; i < window.target.size(); ++i) {
                    const double t = window.target[i];
                    // Missing targets sit at the train mean (0 normalized).
                    target_norm[i] = std::isnan(t) ? Real(0) : static_cast<Real>(norm.apply(t));
                }
                Tape<Real> tape;
                auto pred = forward(tape, model, window);
                auto target = tensor_of<Real>({mc.t_p, model.n_nodes, 1}, std::move(target_norm));
                auto loss = mean_abs_err(tape, pred, target);
                loss_sum += loss->v[0];
                tape.backward(loss, inv_batch);
            }
            adam_step(model.params, adam, cfg);
        }
        const double train_mae = norm.std * loss_sum / static_cast<double>(order.size());
        if (!std::isfinite(train_mae))
            throw ContractError("train: diverged at epoch " + std::to_string(epoch) +
                                " (non-finite training loss)");

        EvalReport val = eval_starts(model, series, val_starts, cfg.mape_epsilon);
        result.history.push_back(
            {epoch, train_mae, val.aggregate.mae, val.aggregate.rmse, val.aggregate.mape});

        if (val.aggregate.mae < result.best_val_mae) {
            result.best_val_mae = val.aggregate.mae;
            result.best_epoch = epoch;
            epochs_since_best = 0;
            best_values.clear();
            for (const auto& [_, t] : model.params.items()) best_values.push_back(t->v);
        } else {
            ++epochs_since_best;
        }

        if (cfg.target_train_mae > 0 && train_mae < cfg.target_train_mae) break;
        if (epochs_since_best >= cfg.patience) break;
    }

    if (!best_values.empty()) {
        size_t k = 0;
        for (auto& [_, t] : model.params.items()) t->v = best_values[k++];
    }
    return result;
}

template <class Real>
std::vector<PredictionRow> predict_range(ModelState<Real>& model, const TrafficSeries& series,
                                         IndexRange range) {
    check_series(model, series);
    const ModelConfig& cfg = model.cfg;
    Normalizer norm{model.norm_mean, model.norm_std};
    std::vector<PredictionRow> rows;
    for (int start : window_starts(range, cfg.t_h, cfg.t_p)) {
        auto window = make_window(series, norm, start, cfg.t_h, cfg.t_p, cfg.beta);
        Tape<Real> tape;
        auto pred = forward(tape, model, window);
        for (int h = 0; h < cfg.t_p; ++h)
            for (int i = 0; i < model.n_nodes; ++i)
                rows.push_back({start, h + 1, i,
                                norm.invert(pred->v[static_cast<size_t>(h) * model.n_nodes + i])});
    }
    return rows;
}

#define STEIPCN_INSTANTIATE(Real)                                                                      \
    template AdamState<Real> init_adam<Real>(const ParamRegistry<Real>&);                              \
    template void adam_step<Real>(ParamRegistry<Real>&, AdamState<Real>&, const TrainConfig&);         \
    template EvalReport evaluate<Real>(ModelState<Real>&, const TrafficSeries&, IndexRange, double);   \
    template TrainResult train<Real>(ModelState<Real>&, const TrafficSeries&, const SplitSpec&,        \
                                     const TrainConfig&);                                              \
    template std::vector<PredictionRow> predict_range<Real>(ModelState<Real>&, const TrafficSeries&,   \
                                                            IndexRange);

STEIPCN_INSTANTIATE(float)
STEIPCN_INSTANTIATE(double)

#undef STEIPCN_INSTANTIATE

}  // namespace steipcn
