#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace steipcn {

using Shape = std::vector<int>;

int64_t shape_size(const Shape& s);
std::string shape_str(const Shape& s);

// Dense row-major array with an optional same-shape gradient accumulator.
// Gradients accumulate additively across backward passes until zero_grad().
template <class Real>
struct TensorData {
    Shape dims;
    std::vector<Real> v;
    std::vector<Real> g;  // empty until first touched by backward
    bool requires_grad = false;
    bool from_op = false;  // produced by a taped op (gradient flows through)
    std::string name;      // registry name, empty for intermediates

    int64_t size() const { return static_cast<int64_t>(v.size()); }
    bool has_grad() const { return !g.empty(); }
    void ensure_grad() {
        if (g.empty()) g.assign(v.size(), Real(0));
    }
    void zero_grad() { std::fill(g.begin(), g.end(), Real(0)); }
    bool tracked() const { return requires_grad || from_op; }
};

template <class Real>
using Tensor = std::shared_ptr<TensorData<Real>>;

template <class Real>
Tensor<Real> tensor(Shape dims, Real fill = Real(0), bool requires_grad = false);

template <class Real>
Tensor<Real> tensor_of(Shape dims, std::vector<Real> values, bool requires_grad = false);

// Record of executed ops in execution order; backward() replays the recorded
// adjoint steps in exact reverse. One backward pass per recording.
template <class Real>
class Tape {
public:
    void record(std::function<void()> backward_step) { steps_.push_back(std::move(backward_step)); }

    // Seeds d(loss)/d(loss) = seed and propagates. loss must be a scalar.
    void backward(const Tensor<Real>& loss, Real seed = Real(1));

    void clear() { steps_.clear(); }
    size_t node_count() const { return steps_.size(); }

private:
    std::vector<std::function<void()>> steps_;
};

// Ordered map of named trainable tensors. Iteration order is construction
// order, which fixes the optimizer and checkpoint layout.
template <class Real>
class ParamRegistry {
public:
    Tensor<Real>& add(const std::string& name, Tensor<Real> t);
    Tensor<Real> find(const std::string& name) const;  // null if absent
    const std::vector<std::pair<std::string, Tensor<Real>>>& items() const { return items_; }
    size_t count() const { return items_.size(); }
    int64_t total_elements() const;
    void zero_grads();

private:
    std::vector<std::pair<std::string, Tensor<Real>>> items_;
};

// Instrumentation for the complexity properties: forward multiply-add count
// of the sparse aggregation kernel and the number of exp(poly) evaluations.
struct OpCounters {
    uint64_t scatter_macs = 0;
    uint64_t poly_evals = 0;
    void reset() { *this = OpCounters{}; }
};
OpCounters& op_counters();

// ---- op set -----------------------------------------------------------
// Every op computes eagerly and records its adjoint on the tape. Outputs are
// fresh tensors; inputs are never modified.

// x [..., Cin], W [Cout, Cin], b [Cout] -> [..., Cout]
template <class Real>
Tensor<Real> linear(Tape<Real>& t, const Tensor<Real>& x, const Tensor<Real>& W, const Tensor<Real>& b);

// x [T, Cin] or [T, B, Cin], W [Cout, Cin, k], b [Cout]. Left zero padding of
// (k-1)*dilation; out[t] never reads x beyond t. Tap 0 is the current step.
template <class Real>
Tensor<Real> causal_dilated_conv1d(Tape<Real>& t, const Tensor<Real>& x, const Tensor<Real>& W,
                                   const Tensor<Real>& b, int dilation);

template <class Real>
Tensor<Real> sigmoid(Tape<Real>& t, const Tensor<Real>& x);
template <class Real>
Tensor<Real> relu(Tape<Real>& t, const Tensor<Real>& x);
template <class Real>
Tensor<Real> expop(Tape<Real>& t, const Tensor<Real>& x);

template <class Real>
Tensor<Real> add(Tape<Real>& t, const Tensor<Real>& a, const Tensor<Real>& b);
template <class Real>
Tensor<Real> elementwise_mul(Tape<Real>& t, const Tensor<Real>& a, const Tensor<Real>& b);

// y = c * x for a fixed constant c.
template <class Real>
Tensor<Real> scale(Tape<Real>& t, const Tensor<Real>& x, Real c);

template <class Real>
Tensor<Real> concat(Tape<Real>& t, const std::vector<Tensor<Real>>& parts, int axis);

// x [R, ...] -> [n, ...] copying row idx[e]; grads scatter back additively.
template <class Real>
Tensor<Real> gather_rows(Tape<Real>& t, const Tensor<Real>& x, const std::vector<int>& idx);

// out[idx[e], :] += weights[e] * src[e, :] over an out_rows-row result.
// src [n, ...], weights [n]. Gradients flow to both src and weights.
template <class Real>
Tensor<Real> scatter_add_weighted(Tape<Real>& t, const Tensor<Real>& src, const Tensor<Real>& weights,
                                  const std::vector<int>& idx, int out_rows);

// ||z - mu||_2 as a [1] tensor; subgradient 0 at z == mu.
template <class Real>
Tensor<Real> euclid_dist(Tape<Real>& t, const Tensor<Real>& z, const Tensor<Real>& mu);

// Mean of |pred - target| over all entries; sign subgradient, 0 at ties.
template <class Real>
Tensor<Real> mean_abs_err(Tape<Real>& t, const Tensor<Real>& pred, const Tensor<Real>& target);

template <class Real>
Tensor<Real> sum_all(Tape<Real>& t, const Tensor<Real>& x);

template <class Real>
Tensor<Real> reshape(Tape<Real>& t, const Tensor<Real>& x, Shape dims);

// x [A, B] -> [B, A]
template <class Real>
Tensor<Real> transpose2d(Tape<Real>& t, const Tensor<Real>& x);

extern template struct TensorData<float>;
extern template struct TensorData<double>;
extern template class Tape<float>;
extern template class Tape<double>;
extern template class ParamRegistry<float>;
extern template class ParamRegistry<double>;

}  // namespace steipcn
