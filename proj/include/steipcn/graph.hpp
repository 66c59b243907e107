#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace steipcn {

// Road network topology. Node ids are dense in [0, n_nodes); isolated nodes
// (ids never mentioned in the edge list) are permitted.
struct RoadGraph {
    int n_nodes = 0;
    std::vector<std::pair<int, int>> edges;  // deduplicated; (src,dst)
    bool directed = false;
};

// Shortest hop counts capped at alpha. Entries beyond the cap hold the
// saturating sentinel alpha+1 so the matrix fits in one byte per pair.
struct HopMatrix {
    int n_nodes = 0;
    int alpha = 0;
    std::vector<uint8_t> hops;  // n_nodes * n_nodes, row-major

    uint8_t unreachable() const { return static_cast<uint8_t>(alpha + 1); }
    int at(int i, int j) const { return hops[static_cast<size_t>(i) * n_nodes + j]; }
    bool reachable(int i, int j) const { return at(i, j) <= alpha; }
};

// One spatial pair of the joint spatial-temporal graph: target i aggregates
// from source j at hop distance `hop` (0 for the self pair).
struct STEdge {
    int i = 0;
    int j = 0;
    int hop = 0;
};

// Sparse pattern of the joint spatial-temporal adjacency: every spatial pair
// is replicated across temporal offsets 0..beta toward the past.
struct STEdgeSet {
    int n_nodes = 0;
    int alpha = 0;
    int beta = 0;
    std::vector<STEdge> spatial_pairs;

    int64_t m_spatial() const { return static_cast<int64_t>(spatial_pairs.size()); }
    int64_t m_total() const { return m_spatial() * (beta + 1); }
};

struct GraphStats {
    int n_nodes = 0;
    int64_t m_spatial = 0;
    int64_t m_total = 0;         // M: spatial-temporal edges per target timestamp
    int q_max = 0;               // max alpha-hop neighborhood size over targets
    std::vector<int64_t> hop_histogram;  // index = hop distance 0..alpha
};

// Loads a "src,dst" CSV edge list. n_nodes = 1 + max id unless nodes_override
// is >= 0. Duplicate rows collapse to one edge; undirected graphs store each
// edge once.
RoadGraph load_edge_list(const std::string& path, bool directed, int nodes_override = -1);

// Same parser over an in-memory string (test convenience).
RoadGraph parse_edge_list(const std::string& text, bool directed, int nodes_override = -1);

void save_edge_list(const RoadGraph& g, const std::string& path);

// Breadth-first search from every node, truncated at depth alpha.
HopMatrix compute_hops(const RoadGraph& g, int alpha);

// Enumerates all (i, j, hop<=alpha) pairs; temporal replication is implicit
// via beta.
STEdgeSet build_st_edges(const HopMatrix& h, int beta);

GraphStats graph_stats(const STEdgeSet& s);

}  // namespace steipcn
