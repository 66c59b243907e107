#include "steipcn/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "steipcn/errors.hpp"

namespace steipcn {

namespace {

// Strips trailing CR so CRLF files parse the same as LF files.
std::string chomp(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

bool parse_int_field(const std::string& s, int& out) {
    if (s.empty()) return false;
    size_t pos = 0;
    try {
        long v = std::stol(s, &pos);
        if (pos != s.size() || v < 0) return false;
        out = static_cast<int>(v);
        return true;
    } catch (...) {
        return false;
    }
}

}  // namespace

RoadGraph parse_edge_list(const std::string& text, bool directed, int nodes_override) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("edge list: empty file, expected header \"src,dst\"");
    if (chomp(line) != "src,dst")
        throw ParseError("edge list line 1: expected header \"src,dst\", got \"" + chomp(line) + "\"");

    std::set<std::pair<int, int>> seen;
    int max_id = -1;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = chomp(line);
        if (line.empty()) continue;
        auto comma = line.find(',');
        int src = 0, dst = 0;
        if (comma == std::string::npos || !parse_int_field(line.substr(0, comma), src) ||
            !parse_int_field(line.substr(comma + 1), dst)) {
            throw ParseError("edge list line " + std::to_string(line_no) + ": malformed row \"" + line + "\"");
        }
        max_id = std::max({max_id, src, dst});
        // Undirected edges are stored once under a canonical orientation.
        if (!directed && src > dst) std::swap(src, dst);
        seen.insert({src, dst});
    }

    RoadGraph g;
    g.directed = directed;
    g.n_nodes = nodes_override >= 0 ? nodes_override : max_id + 1;
    if (max_id >= g.n_nodes)
        throw ParseError("edge list: node id " + std::to_string(max_id) + " outside --nodes=" +
                         std::to_string(g.n_nodes));
    g.edges.assign(seen.begin(), seen.end());
    return g;
}

RoadGraph load_edge_list(const std::string& path, bool directed, int nodes_override) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open edge list: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_edge_list(buf.str(), directed, nodes_override);
}

void save_edge_list(const RoadGraph& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write edge list: " + path);
    out << "src,dst\n";
    for (auto [s, d] : g.edges) out << s << ',' << d << '\n';
    if (!out) throw IoError("short write: " + path);
}

HopMatrix compute_hops(const RoadGraph& g, int alpha) {
    if (alpha < 0) throw ContractError("compute_hops: alpha must be >= 0");
    if (alpha > 200) throw ContractError("compute_hops: alpha too large for byte storage");

    const int n = g.n_nodes;
    HopMatrix h;
    h.n_nodes = n;
    h.alpha = alpha;
    h.hops.assign(static_cast<size_t>(n) * n, h.unreachable());

    std::vector<std::vector<int>> adj(n);
    for (auto [s, d] : g.edges) {
        adj[s].push_back(d);
        if (!g.directed) adj[d].push_back(s);
    }

    std::deque<int> queue;
    for (int src = 0; src < n; ++src) {
        uint8_t* row = h.hops.data() + static_cast<size_t>(src) * n;
        row[src] = 0;
        queue.clear();
        queue.push_back(src);
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            int du = row[u];
            if (du >= alpha) continue;  // depth cap
            for (int v : adj[u]) {
                if (row[v] != h.unreachable()) continue;
                row[v] = static_cast<uint8_t>(du + 1);
                queue.push_back(v);
            }
        }
    }
    return h;
}

STEdgeSet build_st_edges(const HopMatrix& h, int beta) {
    if (beta < 0) throw ContractError("build_st_edges: beta must be >= 0");
    STEdgeSet s;
    s.n_nodes = h.n_nodes;
    s.alpha = h.alpha;
    s.beta = beta;
    for (int i = 0; i < h.n_nodes; ++i) {
        for (int j = 0; j < h.n_nodes; ++j) {
            int a = h.at(i, j);
            if (a <= h.alpha) s.spatial_pairs.push_back({i, j, a});
        }
    }
    return s;
}

GraphStats graph_stats(const STEdgeSet& s) {
    GraphStats st;
    st.n_nodes = s.n_nodes;
    st.m_spatial = s.m_spatial();
    st.m_total = s.m_total();
    st.hop_histogram.assign(static_cast<size_t>(s.alpha) + 1, 0);
    std::vector<int> per_target(s.n_nodes, 0);
    for (const auto& e : s.spatial_pairs) {
        ++per_target[e.i];
        ++st.hop_histogram[e.hop];
    }
    for (int c : per_target) st.q_max = std::max(st.q_max, c);
    return st;
}

}  // namespace steipcn
