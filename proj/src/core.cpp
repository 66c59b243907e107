#include "steipcn/core.hpp"

#include <algorithm>
#include <cmath>

#include "steipcn/errors.hpp"

namespace steipcn {

int64_t shape_size(const Shape& s) {
    int64_t n = 1;
    for (int d : s) n *= d;
    return n;
}

std::string shape_str(const Shape& s) {
    std::string out = "[";
    for (size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out + "]";
}

OpCounters& op_counters() {
    static OpCounters c;
    return c;
}

namespace {

template <class Real>
void check_shape(const char* op, const Tensor<Real>& t, size_t min_rank) {
    if (!t) throw ContractError(std::string(op) + ": null tensor");
    if (t->dims.size() < min_rank)
        throw ContractError(std::string(op) + ": rank " + std::to_string(t->dims.size()) + " below " +
                            std::to_string(min_rank));
}

template <class Real>
void check_same_shape(const char* op, const Tensor<Real>& a, const Tensor<Real>& b) {
    if (a->dims != b->dims)
        throw ContractError(std::string(op) + ": shape mismatch " + shape_str(a->dims) + " vs " +
                            shape_str(b->dims));
}

}  // namespace

template <class Real>
Tensor<Real> tensor(Shape dims, Real fill, bool requires_grad) {
    auto t = std::make_shared<TensorData<Real>>();
    t->dims = std::move(dims);
    t->v.assign(static_cast<size_t>(shape_size(t->dims)), fill);
    t->requires_grad = requires_grad;
    if (requires_grad) t->ensure_grad();
    return t;
}

template <class Real>
Tensor<Real> tensor_of(Shape dims, std::vector<Real> values, bool requires_grad) {
    if (shape_size(dims) != static_cast<int64_t>(values.size()))
        throw ContractError("tensor_of: " + std::to_string(values.size()) + " values for shape " +
                            shape_str(dims));
    auto t = std::make_shared<TensorData<Real>>();
    t->dims = std::move(dims);
    t->v = std::move(values);
    t->requires_grad = requires_grad;
    if (requires_grad) t->ensure_grad();
    return t;
}

template <class Real>
void Tape<Real>::backward(const Tensor<Real>& loss, Real seed) {
    if (!loss || loss->size() != 1) throw ContractError("backward: loss must be a scalar tensor");
    loss->ensure_grad();
    loss->g[0] += seed;
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
}

template <class Real>
Tensor<Real>& ParamRegistry<Real>::add(const std::string& name, Tensor<Real> t) {
    if (find(name)) throw ContractError("registry: duplicate parameter name " + name);
    t->requires_grad = true;
    t->name = name;
    t->ensure_grad();
    items_.emplace_back(name, std::move(t));
    return items_.back().second;
}

template <class Real>
Tensor<Real> ParamRegistry<Real>::find(const std::string& name) const {
    for (const auto& [n, t] : items_)
        if (n == name) return t;
    return nullptr;
}

template <class Real>
int64_t ParamRegistry<Real>::total_elements() const {
    int64_t n = 0;
    for (const auto& [_, t] : items_) n += t->size();
    return n;
}

template <class Real>
void ParamRegistry<Real>::zero_grads() {
    for (auto& [_, t] : items_) t->zero_grad();
}

// ---- ops ---------------------------------------------------------------

template <class Real>
Tensor<Real> linear(Tape<Real>& tape, const Tensor<Real>& x, const Tensor<Real>& W, const Tensor<Real>& b) {
    check_shape("linear", x, 1);
    check_shape("linear", W, 2);
    check_shape("linear", b, 1);
    const int cin = x->dims.back();
    const int cout = W->dims[0];
    if (W->dims.size() != 2 || W->dims[1] != cin || b->dims != Shape{cout})
        throw ContractError("linear: x " + shape_str(x->dims) + " incompatible with W " + shape_str(W->dims) +
                            ", b " + shape_str(b->dims));
    const int64_t rows = x->size() / cin;

    Shape odims = x->dims;
    odims.back() = cout;
    auto out = tensor<Real>(odims);
    out->from_op = true;

    const Real* xv = x->v.data();
    const Real* wv = W->v.data();
    const Real* bv = b->v.data();
    Real* ov = out->v.data();
    for (int64_t r = 0; r < rows; ++r) {
        const Real* xr = xv + r * cin;
        Real* orow = ov + r * cout;
        for (int co = 0; co < cout; ++co) {
            const Real* wr = wv + static_cast<int64_t>(co) * cin;
            Real acc = bv[co];
            for (int ci = 0; ci < cin; ++ci) acc += wr[ci] * xr[ci];
            orow[co] = acc;
        }
    }

    tape.record([x, W, b, out, rows, cin, cout] {
        if (!out->has_grad()) return;
        const Real* go = out->g.data();
        if (x->tracked()) {
            x->ensure_grad();
            Real* gx = x->g.data();
            const Real* wv = W->v.data();
            for (int64_t r = 0; r < rows; ++r) {
                const Real* gr = go + r * cout;
                Real* gxr = gx + r * cin;
                for (int co = 0; co < cout; ++co) {
                    const Real g = gr[co];
                    const Real* wr = wv + static_cast<int64_t>(co) * cin;
                    for (int ci = 0; ci < cin; ++ci) gxr[ci] += g * wr[ci];
                }
            }
        }
        if (W->tracked()) {
            W->ensure_grad();
            Real* gw = W->g.data();
            const Real* xv = x->v.data();
            for (int64_t r = 0; r < rows; ++r) {
                const Real* gr = go + r * cout;
                const Real* xr = xv + r * cin;
                for (int co = 0; co < cout; ++co) {
                    const Real g = gr[co];
                    Real* gwr = gw + static_cast<int64_t>(co) * cin;
                    for (int ci = 0; ci < cin; ++ci) gwr[ci] += g * xr[ci];
                }
            }
        }
        if (b->tracked()) {
            b->ensure_grad();
            Real* gb = b->g.data();
            for (int64_t r = 0; r < rows; ++r) {
                const Real* gr = go + r * cout;
                for (int co = 0; co < cout; ++co) gb[co] += gr[co];
            }
        }
    });
    return out;
}

template <class Real>
Tensor<Real> causal_dilated_conv1d(Tape<Real>& tape, const Tensor<Real>& x, const Tensor<Real>& W,
                                   const Tensor<Real>& b, int dilation) {
    check_shape("causal_dilated_conv1d", x, 2);
    check_shape("causal_dilated_conv1d", W, 3);
    if (dilation < 1) throw ContractError("causal_dilated_conv1d: dilation must be >= 1");
    if (x->dims.size() > 3) throw ContractError("causal_dilated_conv1d: x rank must be 2 or 3");
    const int T = x->dims[0];
    const int B = x->dims.size() == 3 ? x->dims[1] : 1;
    const int cin = x->dims.back();
    const int cout = W->dims[0];
    const int k = W->dims[2];
    if (W->dims[1] != cin || k < 1 || b->dims != Shape{cout})
        throw ContractError("causal_dilated_conv1d: x " + shape_str(x->dims) + " incompatible with W " +
                            shape_str(W->dims));

    Shape odims = x->dims;
    odims.back() = cout;
    auto out = tensor<Real>(odims);
    out->from_op = true;

    const Real* xv = x->v.data();
    const Real* wv = W->v.data();
    const Real* bv = b->v.data();
    Real* ov = out->v.data();
    for (int t = 0; t < T; ++t) {
        for (int n = 0; n < B; ++n) {
            Real* orow = ov + (static_cast<int64_t>(t) * B + n) * cout;
            for (int co = 0; co < cout; ++co) orow[co] = bv[co];
            for (int r = 0; r < k; ++r) {
                const int tt = t - r * dilation;
                if (tt < 0) break;  // earlier taps read the zero padding
                const Real* xr = xv + (static_cast<int64_t>(tt) * B + n) * cin;
                for (int co = 0; co < cout; ++co) {
                    const Real* wr = wv + (static_cast<int64_t>(co) * cin) * k + r;
                    Real acc = 0;
                    for (int ci = 0; ci < cin; ++ci) acc += wr[static_cast<int64_t>(ci) * k] * xr[ci];
                    orow[co] += acc;
                }
            }
        }
    }

    tape.record([x, W, b, out, T, B, cin, cout, k, dilation] {
        if (!out->has_grad()) return;
        const Real* go = out->g.data();
        const Real* xv = x->v.data();
        const Real* wv = W->v.data();
        const bool track_x = x->tracked();
        const bool track_w = W->tracked();
        if (track_x) x->ensure_grad();
        if (track_w) W->ensure_grad();
        for (int t = 0; t < T; ++t) {
            for (int n = 0; n < B; ++n) {
                const Real* gr = go + (static_cast<int64_t>(t) * B + n) * cout;
                for (int r = 0; r < k; ++r) {
                    const int tt = t - r * dilation;
                    if (tt < 0) break;
                    const int64_t xoff = (static_cast<int64_t>(tt) * B + n) * cin;
                    for (int co = 0; co < cout; ++co) {
                        const Real g = gr[co];
                        const int64_t woff = (static_cast<int64_t>(co) * cin) * k + r;
                        if (track_x) {
                            Real* gxr = x->g.data() + xoff;
                            for (int ci = 0; ci < cin; ++ci)
                                gxr[ci] += g * wv[woff + static_cast<int64_t>(ci) * k];
                        }
                        if (track_w) {
                            Real* gw = W->g.data();
                            const Real* xr = xv + xoff;
                            for (int ci = 0; ci < cin; ++ci)
                                gw[woff + static_cast<int64_t>(ci) * k] += g * xr[ci];
                        }
                    }
                }
            }
        }
        if (b->tracked()) {
            b->ensure_grad();
            Real* gb = b->g.data();
            const int64_t rows = static_cast<int64_t>(T) * B;
            for (int64_t r = 0; r < rows; ++r)
                for (int co = 0; co < cout; ++co) gb[co] += go[r * cout + co];
        }
    });
    return out;
}

template <class Real>
Tensor<Real> sigmoid(Tape<Real>& tape, const Tensor<Real>& x) {
    check_shape("sigmoid", x, 0);
    auto out = tensor<Real>(x->dims);
    out->from_op = true;
    for (int64_t i = 0; i < x->size(); ++i) out->v[i] = Real(1) / (Real(1) + std::exp(-x->v[i]));
    tape.record([x, out] {
        if (!out->has_grad() || !x->tracked()) return;
        x->ensure_grad();
        for (int64_t i = 0; i < x->size(); ++i) {
            const Real y = out->v[i];
            x->g[i] += out->g[i] * y * (Real(1) - y);
        }
    });
    return out;
}

template <class Real>
Tensor<Real> relu(Tape<Real>& tape, const Tensor<Real>& x) {
    check_shape("relu", x, 0);
    auto out = tensor<Real>(x->dims);
    out->from_op = true;
    for (int64_t i = 0; i < x->size(); ++i) out->v[i] = x->v[i] > Real(0) ? x->v[i] : Real(0);
    tape.record([x, out] {
        if (!out->has_grad() || !x->tracked()) return;
        x->ensure_grad();
        for (int64_t i = 0; i < x->size(); ++i)
            if (x->v[i] > Real(0)) x->g[i] += out->g[i];
    });
    return out;
}

template <class Real>
Tensor<Real> expop(Tape<Real>& tape, const Tensor<Real>& x) {
    check_shape("exp", x, 0);
    auto out = tensor<Real>(x->dims);
    out->from_op = true;
    for (int64_t i = 0; i < x->size(); ++i) out->v[i] = std::exp(x->v[i]);
    tape.record([x, out] {
        if (!out->has_grad() || !x->tracked()) return;
        x->ensure_grad();
        for (int64_t i = 0; i < x->size(); ++i) x->g[i] += out->g[i] * out->v[i];
    });
    return out;
}

template <class Real>
Tensor<Real> add(Tape<Real>& tape, const Tensor<Real>& a, const Tensor<Real>& b) {
    check_same_shape("add", a, b);
    auto out = tensor<Real>(a->dims);
    out->from_op = true;
    for (int64_t i = 0; i < a->size(); ++i) out->v[i] = a->v[i] + b->v[i];
    tape.record([a, b, out] {
        if (!out->has_grad()) return;
        if (a->tracked()) {
            a->ensure_grad();
            for (int64_t i = 0; i < a->size(); ++i) a->g[i] += out->g[i];
        }
        if (b->tracked()) {
            b->ensure_grad();
            for (int64_t i = 0; i < b->size(); ++i) b->g[i] += out->g[i];
        }
    });
    return out;
}

template <class Real>
Tensor<Real> elementwise_mul(Tape<Real>& tape, const Tensor<Real>& a, const Tensor<Real>& b) {
    check_same_shape("elementwise_mul", a, b);
    auto out = tensor<Real>(a->dims);
    out->from_op = true;
    for (int64_t i = 0; i < a->size(); ++i) out->v[i] = a->v[i] * b->v[i];
    tape.record([a, b, out] {
        if (!out->has_grad()) return;
        if (a->tracked()) {
            a->ensure_grad();
            for (int64_t i = 0; i < a->size(); ++i) a->g[i] += out->g[i] * b->v[i];
        }
        if (b->tracked()) {
            b->ensure_grad();
            for (int64_t i = 0; i < b->size(); ++i) b->g[i] += out->g[i] * a->v[i];
        }
    });
    return out;
}

template <class Real>
Tensor<Real> scale(Tape<Real>& tape, const Tensor<Real>& x, Real c) {
    check_shape("scale", x, 0);
    auto out = tensor<Real>(x->dims);
    out->from_op = true;
    for (int64_t i = 0; i < x->size(); ++i) out->v[i] = c * x->v[i];
    tape.record([x, out, c] {
        if (!out->has_grad() || !x->tracked()) return;
        x->ensure_grad();
        for (int64_t i = 0; i < x->size(); ++i) x->g[i] += c * out->g[i];
    });
    return out;
}

template <class Real>
Tensor<Real> concat(Tape<Real>& tape, const std::vector<Tensor<Real>>& parts, int axis) {
    if (parts.empty()) throw ContractError("concat: no parts");
    const Shape& first = parts[0]->dims;
    if (axis < 0 || axis >= static_cast<int>(first.size())) throw ContractError("concat: bad axis");
    int cat_dim = 0;
    for (const auto& p : parts) {
        if (p->dims.size() != first.size()) throw ContractError("concat: rank mismatch");
        for (size_t d = 0; d < first.size(); ++d)
            if (static_cast<int>(d) != axis && p->dims[d] != first[d])
                throw ContractError("concat: shape mismatch " + shape_str(p->dims) + " vs " + shape_str(first));
        cat_dim += p->dims[axis];
    }
    Shape odims = first;
    odims[axis] = cat_dim;
    auto out = tensor<Real>(odims);
    out->from_op = true;

    int64_t outer = 1;
    for (int d = 0; d < axis; ++d) outer *= first[d];
    int64_t tail = 1;
    for (size_t d = axis + 1; d < first.size(); ++d) tail *= first[d];
    const int64_t out_stride = static_cast<int64_t>(cat_dim) * tail;

    int64_t off = 0;  // offset of this part inside each outer slice of out
    std::vector<int64_t> part_off(parts.size());
    for (size_t p = 0; p < parts.size(); ++p) {
        part_off[p] = off;
        const int64_t chunk = static_cast<int64_t>(parts[p]->dims[axis]) * tail;
        for (int64_t o = 0; o < outer; ++o)
            std::copy_n(parts[p]->v.data() + o * chunk, chunk, out->v.data() + o * out_stride + off);
        off += chunk;
    }

    tape.record([parts, out, part_off, outer, tail, out_stride] {
        if (!out->has_grad()) return;
        for (size_t p = 0; p < parts.size(); ++p) {
            if (!parts[p]->tracked()) continue;
            parts[p]->ensure_grad();
            const int64_t chunk = parts[p]->size() / (outer ? outer : 1);
            for (int64_t o = 0; o < outer; ++o) {
                const Real* go = out->g.data() + o * out_stride + part_off[p];
                Real* gp = parts[p]->g.data() + o * chunk;
                for (int64_t i = 0; i < chunk; ++i) gp[i] += go[i];
            }
        }
    });
    return out;
}

template <class Real>
Tensor<Real> gather_rows(Tape<Real>& tape, const Tensor<Real>& x, const std::vector<int>& idx) {
    check_shape("gather_rows", x, 1);
    const int rows = x->dims[0];
    const int64_t width = x->size() / rows;
    for (int i : idx)
        if (i < 0 || i >= rows)
            throw ContractError("gather_rows: index " + std::to_string(i) + " outside [0," +
                                std::to_string(rows) + ")");
    Shape odims = x->dims;
    odims[0] = static_cast<int>(idx.size());
    auto out = tensor<Real>(odims);
    out->from_op = true;
    for (size_t e = 0; e < idx.size(); ++e)
        std::copy_n(x->v.data() + static_cast<int64_t>(idx[e]) * width, width,
                    out->v.data() + static_cast<int64_t>(e) * width);

    tape.record([x, out, idx, width] {
        if (!out->has_grad() || !x->tracked()) return;
        x->ensure_grad();
        for (size_t e = 0; e < idx.size(); ++e) {
            const Real* go = out->g.data() + static_cast<int64_t>(e) * width;
            Real* gx = x->g.data() + static_cast<int64_t>(idx[e]) * width;
            for (int64_t i = 0; i < width; ++i) gx[i] += go[i];
        }
    });
    return out;
}

template <class Real>
Tensor<Real> scatter_add_weighted(Tape<Real>& tape, const Tensor<Real>& src, const Tensor<Real>& weights,
                                  const std::vector<int>& idx, int out_rows) {
    check_shape("scatter_add_weighted", src, 1);
    const int n = src->dims[0];
    const int64_t width = src->size() / (n ? n : 1);
    if (weights->dims != Shape{n})
        throw ContractError("scatter_add_weighted: weights " + shape_str(weights->dims) + " for " +
                            std::to_string(n) + " entries");
    if (static_cast<int>(idx.size()) != n) throw ContractError("scatter_add_weighted: index count mismatch");
    for (int i : idx)
        if (i < 0 || i >= out_rows)
            throw ContractError("scatter_add_weighted: index " + std::to_string(i) + " outside [0," +
                                std::to_string(out_rows) + ")");

    Shape odims = src->dims;
    odims[0] = out_rows;
    auto out = tensor<Real>(odims);
    out->from_op = true;
    for (int e = 0; e < n; ++e) {
        const Real w = weights->v[e];
        const Real* srow = src->v.data() + static_cast<int64_t>(e) * width;
        Real* orow = out->v.data() + static_cast<int64_t>(idx[e]) * width;
        for (int64_t f = 0; f < width; ++f) orow[f] += w * srow[f];
    }
    op_counters().scatter_macs += static_cast<uint64_t>(n) * width;

    tape.record([src, weights, out, idx, n, width] {
        if (!out->has_grad()) return;
        const bool track_src = src->tracked();
        const bool track_w = weights->tracked();
        if (track_src) src->ensure_grad();
        if (track_w) weights->ensure_grad();
        for (int e = 0; e < n; ++e) {
            const Real* go = out->g.data() + static_cast<int64_t>(idx[e]) * width;
            if (track_src) {
                const Real w = weights->v[e];
                Real* gs = src->g.data() + static_cast<int64_t>(e) * width;
                for (int64_t f = 0; f < width; ++f) gs[f] += w * go[f];
            }
            if (track_w) {
                const Real* srow = src->v.data() + static_cast<int64_t>(e) * width;
                Real acc = 0;
                for (int64_t f = 0; f < width; ++f) acc += go[f] * srow[f];
                weights->g[e] += acc;
            }
        }
    });
    return out;
}

template <class Real>
Tensor<Real> euclid_dist(Tape<Real>& tape, const Tensor<Real>& z, const Tensor<Real>& mu) {
    check_same_shape("euclid_dist", z, mu);
    Real acc = 0;
    for (int64_t i = 0; i < z->size(); ++i) {
        const Real d = z->v[i] - mu->v[i];
        acc += d * d;
    }
    auto out = tensor_of<Real>({1}, {std::sqrt(acc)});
    out->from_op = true;
    tape.record([z, mu, out] {
        if (!out->has_grad()) return;
        const Real dist = out->v[0];
        if (dist <= Real(0)) return;  // subgradient 0 at the kink
        const Real g = out->g[0] / dist;
        if (z->tracked()) {
            z->ensure_grad();
            for (int64_t i = 0; i < z->size(); ++i) z->g[i] += g * (z->v[i] - mu->v[i]);
        }
        if (mu->tracked()) {
            mu->ensure_grad();
            for (int64_t i = 0; i < mu->size(); ++i) mu->g[i] -= g * (z->v[i] - mu->v[i]);
        }
    });
    return out;
}

template <class Real>
Tensor<Real> mean_abs_err(Tape<Real>& tape, const Tensor<Real>& pred, const Tensor<Real>& target) {
    check_same_shape("mean_abs_err", pred, target);
    const int64_t n = pred->size();
    if (n == 0) throw ContractError("mean_abs_err: empty tensors");
    Real acc = 0;
    for (int64_t i = 0; i < n; ++i) acc += std::abs(pred->v[i] - target->v[i]);
    auto out = tensor_of<Real>({1}, {acc / static_cast<Real>(n)});
    out->from_op = true;
    tape.record([pred, target, out, n] {
        if (!out->has_grad()) return;
        const Real c = out->g[0] / static_cast<Real>(n);
        const bool tp = pred->tracked();
        const bool tt = target->tracked();
        if (tp) pred->ensure_grad();
        if (tt) target->ensure_grad();
        for (int64_t i = 0; i < n; ++i) {
            const Real d = pred->v[i] - target->v[i];
            const Real s = d > Real(0) ? Real(1) : (d < Real(0) ? Real(-1) : Real(0));
            if (tp) pred->g[i] += c * s;
            if (tt) target->g[i] -= c * s;
        }
    });
    return out;
}

template <class Real>
Tensor<Real> sum_all(Tape<Real>& tape, const Tensor<Real>& x) {
    check_shape("sum_all", x, 0);
    Real acc = 0;
    for (Real v : x->v) acc += v;
    auto out = tensor_of<Real>({1}, {acc});
    out->from_op = true;
    tape.record([x, out] {
        if (!out->has_grad() || !x->tracked()) return;
        x->ensure_grad();
        for (int64_t i = 0; i < x->size(); ++i) x->g[i] += out->g[0];
    });
    return out;
}

template <class Real>
Tensor<Real> reshape(Tape<Real>& tape, const Tensor<Real>& x, Shape dims) {
    if (shape_size(dims) != x->size())
        throw ContractError("reshape: " + shape_str(x->dims) + " to " + shape_str(dims));
    auto out = tensor<Real>(std::move(dims));
    out->from_op = true;
    out->v = x->v;
    tape.record([x, out] {
        if (!out->has_grad() || !x->tracked()) return;
        x->ensure_grad();
        for (int64_t i = 0; i < x->size(); ++i) x->g[i] += out->g[i];
    });
    return out;
}

template <class Real>
Tensor<Real> transpose2d(Tape<Real>& tape, const Tensor<Real>& x) {
    check_shape("transpose2d", x, 2);
    if (x->dims.size() != 2) throw ContractError("transpose2d: rank must be 2");
    const int a = x->dims[0], b = x->dims[1];
    auto out = tensor<Real>({b, a});
    out->from_op = true;
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < b; ++j) out->v[static_cast<int64_t>(j) * a + i] = x->v[static_cast<int64_t>(i) * b + j];
    tape.record([x, out, a, b] {
        if (!out->has_grad() || !x->tracked()) return;
        x->ensure_grad();
        for (int i = 0; i < a; ++i)
            for (int j = 0; j < b; ++j)
                x->g[static_cast<int64_t>(i) * b + j] += out->g[static_cast<int64_t>(j) * a + i];
    });
    return out;
}

// ---- explicit instantiations --------------------------------------------

template struct TensorData<float>;
template struct TensorData<double>;
template class Tape<float>;
template class Tape<double>;
template class ParamRegistry<float>;
template class ParamRegistry<double>;

#define STEIPCN_INSTANTIATE_OPS(Real)                                                                        \
    template Tensor<Real> tensor<Real>(Shape, Real, bool);                                                   \
    template Tensor<Real> tensor_of<Real>(Shape, std::vector<Real>, bool);                                   \
    template Tensor<Real> linear<Real>(Tape<Real>&, const Tensor<Real>&, const Tensor<Real>&,                \
                                       const Tensor<Real>&);                                                 \
    template Tensor<Real> causal_dilated_conv1d<Real>(Tape<Real>&, const Tensor<Real>&, const Tensor<Real>&, \
                                                      const Tensor<Real>&, int);                             \
    template Tensor<Real> sigmoid<Real>(Tape<Real>&, const Tensor<Real>&);                                   \
    template Tensor<Real> relu<Real>(Tape<Real>&, const Tensor<Real>&);                                      \
    template Tensor<Real> expop<Real>(Tape<Real>&, const Tensor<Real>&);                                     \
    template Tensor<Real> add<Real>(Tape<Real>&, const Tensor<Real>&, const Tensor<Real>&);                  \
    template Tensor<Real> elementwise_mul<Real>(Tape<Real>&, const Tensor<Real>&, const Tensor<Real>&);      \
    template Tensor<Real> scale<Real>(Tape<Real>&, const Tensor<Real>&, Real);                               \
    template Tensor<Real> concat<Real>(Tape<Real>&, const std::vector<Tensor<Real>>&, int);                  \
    template Tensor<Real> gather_rows<Real>(Tape<Real>&, const Tensor<Real>&, const std::vector<int>&);      \
    template Tensor<Real> scatter_add_weighted<Real>(Tape<Real>&, const Tensor<Real>&, const Tensor<Real>&,  \
                                                     const std::vector<int>&, int);                          \
    template Tensor<Real> euclid_dist<Real>(Tape<Real>&, const Tensor<Real>&, const Tensor<Real>&);          \
    template Tensor<Real> mean_abs_err<Real>(Tape<Real>&, const Tensor<Real>&, const Tensor<Real>&);         \
    template Tensor<Real> sum_all<Real>(Tape<Real>&, const Tensor<Real>&);                                   \
    template Tensor<Real> reshape<Real>(Tape<Real>&, const Tensor<Real>&, Shape);                            \
    template Tensor<Real> transpose2d<Real>(Tape<Real>&, const Tensor<Real>&);

STEIPCN_INSTANTIATE_OPS(float)
STEIPCN_INSTANTIATE_OPS(double)

#undef STEIPCN_INSTANTIATE_OPS

}  // namespace steipcn
