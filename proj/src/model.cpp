#include "steipcn/model.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "steipcn/errors.hpp"

namespace steipcn {

void ModelConfig::validate() const {
    if (alpha < 0 || beta < 0) throw ContractError("config: alpha and beta must be >= 0");
    if (d < 1 || channels < 1 || t_h < 1 || t_p < 1) throw ContractError("config: dimensions must be positive");
    if (tdcn_layers < 1 || tdcn_layers > 4) throw ContractError("config: tdcn_layers must be in 1..4");
    if (has_gcn() && ab.no_stpgau && channels % 4 != 0)
        throw ContractError("config: no_stpgau needs channels divisible by 4");
}

template <class Real>
int ModelState<Real>::encode_channels() const {
    const int c = cfg.channels;
    if (!cfg.has_gcn() || !cfg.ab.no_stpgau) return c;
    int ce = c / 2;
    if (cfg.use_sce()) ce += c / 4;
    if (cfg.use_tce()) ce += c / 4;
    return ce;
}

namespace {

// Affine parameter pair: uniform +-1/sqrt(fan_in) weights, zero bias. The
// bias name swaps the last 'w' of the weight name for 'b'.
template <class Real>
void make_affine(ModelState<Real>& m, const std::string& w_name, Tensor<Real>& w, Tensor<Real>& b,
                 Shape wdims, int fan_in, std::mt19937_64& rng) {
    std::string b_name = w_name;
    b_name[b_name.rfind('w')] = 'b';
    w = m.params.add(w_name, uniform_init_tensor<Real>(std::move(wdims), fan_in, rng));
    b = m.params.add(b_name, tensor<Real>({w->dims[0]}));
}

}  // namespace

template <class Real>
ModelState<Real> build_model(const ModelConfig& cfg, const STEdgeSet& edges, int t_d) {
    cfg.validate();
    if (edges.alpha != cfg.alpha || edges.beta != cfg.beta)
        throw ContractError("build_model: edge set built with alpha/beta " + std::to_string(edges.alpha) +
                            "/" + std::to_string(edges.beta) + ", config wants " + std::to_string(cfg.alpha) +
                            "/" + std::to_string(cfg.beta));
    if (t_d < 1) throw ContractError("build_model: t_d must be >= 1");

    ModelState<Real> m;
    m.cfg = cfg;
    m.n_nodes = edges.n_nodes;
    m.t_d = t_d;
    m.edges = edges;
    m.plan = build_index_plan(m.edges, cfg.t_h);

    std::mt19937_64 rng(cfg.seed);
    const int c = cfg.channels;
    const int d = cfg.d;

    // Encoding tables (draw order: z_s, z_d, z_w, z_sd, z_td).
    TableMask mask;
    mask.spatial = cfg.use_sce();
    mask.temporal = cfg.use_tce();
    mask.spatial_dist = cfg.use_sde();
    mask.temporal_dist = cfg.use_tde();
    m.tables = init_tables<Real>(m.n_nodes, t_d, cfg.alpha, cfg.beta, d, rng, mask);
    if (m.tables.z_s) m.params.add("enc.z_s", m.tables.z_s);
    if (m.tables.z_d) m.params.add("enc.z_d", m.tables.z_d);
    if (m.tables.z_w) m.params.add("enc.z_w", m.tables.z_w);
    if (m.tables.z_sd) m.params.add("enc.z_sd", m.tables.z_sd);
    if (m.tables.z_td) m.params.add("enc.z_td", m.tables.z_td);

    if (cfg.has_stei()) {
        m.centers = init_centers<Real>(d, rng, cfg.use_sce(), cfg.use_tce(), cfg.use_sde(), cfg.use_tde());
        for (int k = 0; k < 6; ++k)
            if (m.centers.mu[k]) m.params.add("stei.mu" + std::to_string(k + 1), m.centers.mu[k]);
    } else if (cfg.has_gcn()) {
        // Free weight per spatial-temporal edge pattern, shared across window
        // positions.
        m.adaptive = m.params.add(
            "stei.adaptive", normal_init_tensor<Real>({static_cast<int>(m.edges.m_total())}, rng));
    }

    // Local layer.
    const bool split_encode = cfg.has_gcn() && cfg.ab.no_stpgau;
    const int c_raw = split_encode ? c / 2 : c;
    make_affine(m, "local.w0", m.local.w0, m.local.b0, {c_raw, 1}, 1, rng);
    if (cfg.has_gcn()) {
        const int enc_c = m.encode_channels();
        const int upd_out = cfg.has_stpgau() ? 2 * c : c;
        make_affine(m, "local.w1", m.local.w1, m.local.b1, {upd_out, enc_c}, enc_c, rng);
        const int proj_out = cfg.has_stpgau() ? 2 * c : c / 4;
        if (cfg.use_sce()) make_affine(m, "local.w2", m.local.w2, m.local.b2, {proj_out, d}, d, rng);
        if (cfg.use_tce()) make_affine(m, "local.w3", m.local.w3, m.local.b3, {proj_out, d}, d, rng);
        if (cfg.has_stpgau()) {
            make_affine(m, "local.w4", m.local.w4, m.local.b4, {c, 2 * c}, 2 * c, rng);
            make_affine(m, "local.w5", m.local.w5, m.local.b5, {c, 2 * c}, 2 * c, rng);
        }
    }

    if (cfg.has_tdcn()) {
        m.tdcn = init_tdcn<Real>(c, cfg.tdcn_layers, 3, rng);
        for (size_t l = 0; l < m.tdcn.layers.size(); ++l) {
            const std::string stem = "tdcn.l" + std::to_string(l + 1) + ".";
            auto& layer = m.tdcn.layers[l];
            m.params.add(stem + "w", layer.w);
            m.params.add(stem + "b", layer.b);
            if (layer.proj_w) {
                m.params.add(stem + "proj_w", layer.proj_w);
                m.params.add(stem + "proj_b", layer.proj_b);
            }
        }
        m.params.add("tdcn.out_w", m.tdcn.out_w);
        m.params.add("tdcn.out_b", m.tdcn.out_b);
    }

    // Prediction head. View numbering is canonical: 1 = original encoding,
    // 2 = local joint spatial-temporal, 3 = long-range temporal.
    std::vector<std::pair<int, int>> active_views;  // (canonical index, channels)
    active_views.push_back({1, m.encode_channels()});
    if (cfg.has_gcn()) active_views.push_back({2, c});
    if (cfg.has_tdcn()) active_views.push_back({3, c});

    if (!cfg.ab.no_mvc) {
        for (auto [num, cin] : active_views) {
            MVCViewParams<Real> vp;
            const std::string stem = "mvc.v" + std::to_string(num) + ".";
            make_affine(m, stem + "w6", vp.w6, vp.b6, {c, cin, cfg.t_h}, cin * cfg.t_h, rng);
            make_affine(m, stem + "w7", vp.w7, vp.b7, {c, c}, c, rng);
            make_affine(m, stem + "w8", vp.w8, vp.b8, {c, c}, c, rng);
            m.mvc.views.push_back(std::move(vp));
        }
        const int vc = static_cast<int>(active_views.size()) * c;
        make_affine(m, "mvc.fuse.w7", m.mvc.fuse_w7, m.mvc.fuse_b7, {vc, vc}, vc, rng);
        make_affine(m, "mvc.fuse.w8", m.mvc.fuse_w8, m.mvc.fuse_b8, {vc, vc}, vc, rng);
        make_affine(m, "mvc.head.w", m.mvc.head_w, m.mvc.head_b, {cfg.t_p, vc}, vc, rng);
    } else {
        const int trunk_c = active_views.back().second;
        make_affine(m, "mvc.direct.w", m.mvc.direct_w, m.mvc.direct_b, {cfg.t_p, trunk_c, cfg.t_h},
                    trunk_c * cfg.t_h, rng);
    }
    return m;
}

template <class Real>
ForwardTrace<Real> forward_trace(Tape<Real>& tape, ModelState<Real>& state, const WindowSample& window) {
    const ModelConfig& cfg = state.cfg;
    if (window.n_nodes != state.n_nodes)
        throw ContractError("forward: window has " + std::to_string(window.n_nodes) + " nodes, model wants " +
                            std::to_string(state.n_nodes));
    if (window.t_h != cfg.t_h || window.t_p != cfg.t_p || window.beta != cfg.beta)
        throw ContractError("forward: window geometry does not match config");

    const int t_h = cfg.t_h;
    const int n = state.n_nodes;
    WindowCalendar cal{window.slot, window.dow, cfg.beta};

    std::vector<Real> raw(window.input.begin(), window.input.end());
    auto x_raw = tensor_of<Real>({t_h, n, 1}, std::move(raw));

    ForwardTrace<Real> trace;

    // Input encoding; the gate-ablated variant folds projected coordinate
    // encodings into the channel axis here.
    if (cfg.has_gcn() && cfg.ab.no_stpgau) {
        std::vector<Tensor<Real>> parts;
        parts.push_back(input_encode(tape, x_raw, state.local));
        if (cfg.use_sce()) {
            auto proj = linear(tape, state.tables.z_s, state.local.w2, state.local.b2);  // [N, c/4]
            std::vector<int> node_idx(static_cast<size_t>(t_h) * n);
            for (int t = 0; t < t_h; ++t)
                for (int i = 0; i < n; ++i) node_idx[static_cast<size_t>(t) * n + i] = i;
            auto grid = gather_rows(tape, proj, node_idx);
            parts.push_back(reshape(tape, grid, {t_h, n, proj->dims[1]}));
        }
        if (cfg.use_tce()) {
            std::vector<int> slots(t_h), dows(t_h);
            for (int t = 0; t < t_h; ++t) {
                slots[t] = cal.slot[t + cfg.beta];
                dows[t] = cal.dow[t + cfg.beta];
            }
            auto zt = temporal_encoding_rows(tape, state.tables, slots, dows);
            auto proj = linear(tape, zt, state.local.w3, state.local.b3);  // [T_h, c/4]
            std::vector<int> time_idx(static_cast<size_t>(t_h) * n);
            for (int t = 0; t < t_h; ++t)
                for (int i = 0; i < n; ++i) time_idx[static_cast<size_t>(t) * n + i] = t;
            auto grid = gather_rows(tape, proj, time_idx);
            parts.push_back(reshape(tape, grid, {t_h, n, proj->dims[1]}));
        }
        trace.x_enc = parts.size() == 1 ? parts[0] : concat(tape, parts, 2);
    } else {
        trace.x_enc = input_encode(tape, x_raw, state.local);
    }

    Tensor<Real> trunk = trace.x_enc;
    if (cfg.has_gcn()) {
        STWeights<Real> weights;
        if (cfg.has_stei()) {
            weights = factored_infer_weights(tape, state.tables, state.centers, state.plan, cal);
        } else {
            weights.s = gather_rows(tape, state.adaptive, state.plan.pattern);
            weights.plan = &state.plan;
        }
        trace.x_agg = aggregate(tape, trace.x_enc, weights);
        trace.x_upd = update(tape, trace.x_agg, state.local);
        trace.view2 = cfg.has_stpgau() ? stpgau(tape, trace.x_upd, state.tables, cal, state.local)
                                       : trace.x_upd;
        trunk = trace.view2;
    }
    if (cfg.has_tdcn()) {
        trace.view3 = tdcn_forward(tape, trunk, state.tdcn);
        trunk = trace.view3;
    }

    trace.views.push_back(trace.x_enc);
    if (trace.view2) trace.views.push_back(trace.view2);
    if (trace.view3) trace.views.push_back(trace.view3);

    trace.prediction = cfg.ab.no_mvc ? direct_predict(tape, trunk, state.mvc, cfg.t_p)
                                     : fuse_predict(tape, trace.views, state.mvc, cfg.t_p);
    return trace;
}

template <class Real>
Tensor<Real> forward(Tape<Real>& tape, ModelState<Real>& state, const WindowSample& window) {
    return forward_trace(tape, state, window).prediction;
}

// ---- checkpoint container ------------------------------------------------

namespace {

constexpr char kMagic[4] = {'S', 'T', 'P', 'C'};
constexpr uint32_t kVersion = 1;

void put_u16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}
void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u8(std::string& out, uint8_t v) { out.push_back(static_cast<char>(v)); }
void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<uint32_t>(v)); }
void put_f64(std::string& out, double v) {
    const uint64_t bits = std::bit_cast<uint64_t>(v);
    put_u32(out, static_cast<uint32_t>(bits & 0xffffffffULL));
    put_u32(out, static_cast<uint32_t>(bits >> 32));
}

struct Reader {
    const std::string& buf;
    size_t pos = 0;

    void need(size_t n) const {
        if (pos + n > buf.size()) throw IoError("checkpoint: short read (truncated file)");
    }
    uint8_t u8() {
        need(1);
        return static_cast<uint8_t>(buf[pos++]);
    }
    uint16_t u16() {
        uint16_t lo = u8();
        return static_cast<uint16_t>(lo | (static_cast<uint16_t>(u8()) << 8));
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    double f64() {
        uint64_t lo = u32();
        uint64_t hi = u32();
        return std::bit_cast<double>(lo | (hi << 32));
    }
    std::string bytes(size_t n) {
        need(n);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

std::string encode_config(const ModelConfig& cfg, int n_nodes, int t_d) {
    std::ostringstream out;
    out << "alpha=" << cfg.alpha << "\nbeta=" << cfg.beta << "\nd=" << cfg.d << "\nchannels=" << cfg.channels
        << "\nt_h=" << cfg.t_h << "\nt_p=" << cfg.t_p << "\ntdcn_layers=" << cfg.tdcn_layers
        << "\nseed=" << cfg.seed << "\nn_nodes=" << n_nodes << "\nt_d=" << t_d << "\nno_sce=" << cfg.ab.no_sce
        << "\nno_tce=" << cfg.ab.no_tce << "\nno_sde=" << cfg.ab.no_sde << "\nno_tde=" << cfg.ab.no_tde
        << "\nno_stei=" << cfg.ab.no_stei << "\nno_stpgau=" << cfg.ab.no_stpgau << "\nno_gcn=" << cfg.ab.no_gcn
        << "\nno_tdcn=" << cfg.ab.no_tdcn << "\nno_mvc=" << cfg.ab.no_mvc << "\n";
    return out.str();
}

void decode_config(const std::string& text, ModelConfig& cfg, int& n_nodes, int& t_d) {
    std::istringstream in(text);
    std::string line;
    std::map<std::string, std::string> kv;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw IoError("checkpoint: malformed config line \"" + line + "\"");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto geti = [&kv](const char* key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw IoError(std::string("checkpoint: config missing key ") + key);
        return std::stoll(it->second);
    };
    cfg.alpha = static_cast<int>(geti("alpha"));
    cfg.beta = static_cast<int>(geti("beta"));
    cfg.d = static_cast<int>(geti("d"));
    cfg.channels = static_cast<int>(geti("channels"));
    cfg.t_h = static_cast<int>(geti("t_h"));
    cfg.t_p = static_cast<int>(geti("t_p"));
    cfg.tdcn_layers = static_cast<int>(geti("tdcn_layers"));
    cfg.seed = static_cast<uint64_t>(geti("seed"));
    n_nodes = static_cast<int>(geti("n_nodes"));
    t_d = static_cast<int>(geti("t_d"));
    cfg.ab.no_sce = geti("no_sce") != 0;
    cfg.ab.no_tce = geti("no_tce") != 0;
    cfg.ab.no_sde = geti("no_sde") != 0;
    cfg.ab.no_tde = geti("no_tde") != 0;
    cfg.ab.no_stei = geti("no_stei") != 0;
    cfg.ab.no_stpgau = geti("no_stpgau") != 0;
    cfg.ab.no_gcn = geti("no_gcn") != 0;
    cfg.ab.no_tdcn = geti("no_tdcn") != 0;
    cfg.ab.no_mvc = geti("no_mvc") != 0;
}

}  // namespace

template <class Real>
void save_checkpoint(const ModelState<Real>& state, const std::string& path) {
    std::string out;
    out.append(kMagic, 4);
    put_u32(out, kVersion);
    const std::string cfg_block = encode_config(state.cfg, state.n_nodes, state.t_d);
    put_u32(out, static_cast<uint32_t>(cfg_block.size()));
    out += cfg_block;
    put_f64(out, state.norm_mean);
    put_f64(out, state.norm_std);
    put_u32(out, static_cast<uint32_t>(state.params.count()));
    for (const auto& [name, t] : state.params.items()) {
        put_u16(out, static_cast<uint16_t>(name.size()));
        out += name;
        put_u8(out, static_cast<uint8_t>(t->dims.size()));
        for (int dim : t->dims) put_u32(out, static_cast<uint32_t>(dim));
        for (Real v : t->v) put_f32(out, static_cast<float>(v));
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write checkpoint: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("short write: " + path);
}

template <class Real>
ModelState<Real> load_checkpoint(const std::string& path, const RoadGraph& graph) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open checkpoint: " + path);
    std::ostringstream bufs;
    bufs << f.rdbuf();
    const std::string buf = bufs.str();

    Reader r{buf};
    if (r.bytes(4) != std::string(kMagic, 4)) throw IoError("checkpoint: bad magic");
    if (uint32_t v = r.u32(); v != kVersion)
        throw IoError("checkpoint: unsupported version " + std::to_string(v));

    ModelConfig cfg;
    int n_nodes = 0, t_d = 0;
    decode_config(r.bytes(r.u32()), cfg, n_nodes, t_d);
    if (graph.n_nodes != n_nodes)
        throw IoError("checkpoint: trained for " + std::to_string(n_nodes) + " nodes, graph has " +
                      std::to_string(graph.n_nodes));

    const double mean = r.f64();
    const double std_dev = r.f64();

    auto hops = compute_hops(graph, cfg.alpha);
    auto edges = build_st_edges(hops, cfg.beta);
    ModelState<Real> state = build_model<Real>(cfg, edges, t_d);
    state.norm_mean = mean;
    state.norm_std = std_dev;

    const uint32_t count = r.u32();
    if (count != state.params.count())
        throw IoError("checkpoint: holds " + std::to_string(count) + " parameters, model wants " +
                      std::to_string(state.params.count()));
    std::set<std::string> loaded;
    for (uint32_t k = 0; k < count; ++k) {
        const std::string name = r.bytes(r.u16());
        auto t = state.params.find(name);
        if (!t) throw IoError("checkpoint: unknown parameter name \"" + name + "\"");
        if (!loaded.insert(name).second) throw IoError("checkpoint: duplicate parameter \"" + name + "\"");
        const int rank = r.u8();
        Shape dims(rank);
        for (int i = 0; i < rank; ++i) dims[i] = static_cast<int>(r.u32());
        if (dims != t->dims)
            throw IoError("checkpoint: parameter " + name + " has shape " + shape_str(dims) +
                          ", model wants " + shape_str(t->dims));
        for (auto& v : t->v) v = static_cast<Real>(r.f32());
    }
    return state;
}

#define STEIPCN_INSTANTIATE(Real)                                                                      \
    template struct ModelState<Real>;                                                                  \
    template ModelState<Real> build_model<Real>(const ModelConfig&, const STEdgeSet&, int);            \
    template ForwardTrace<Real> forward_trace<Real>(Tape<Real>&, ModelState<Real>&, const WindowSample&); \
    template Tensor<Real> forward<Real>(Tape<Real>&, ModelState<Real>&, const WindowSample&);          \
    template void save_checkpoint<Real>(const ModelState<Real>&, const std::string&);                  \
    template ModelState<Real> load_checkpoint<Real>(const std::string&, const RoadGraph&);

STEIPCN_INSTANTIATE(float)
STEIPCN_INSTANTIATE(double)

#undef STEIPCN_INSTANTIATE

}  // namespace steipcn
