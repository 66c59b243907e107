#pragma once

#include <string>

#include "steipcn/model.hpp"
#include "steipcn/training.hpp"

namespace steipcn {

// Flat key=value run configuration ("#" comments, one pair per line).
// Unknown keys are rejected by name; every key has a default. CLI flags
// override file values, the STEIPCN_SEED environment variable backs the
// seed default.
struct RunConfig {
    ModelConfig model;
    TrainConfig train;
    std::string precision = "standard";  // or "high"
    std::string split = "6:2:2";

    std::string graph_path;
    std::string data_path;
    std::string out_path;
    std::string checkpoint_path;
    int nodes_override = -1;  // --nodes for edge lists with trailing isolated nodes
    bool directed = false;

    // synth parameters
    int synth_nodes = 8;
    int synth_days = 7;
    double synth_noise = 0.05;

    void set(const std::string& key, const std::string& value);  // throws on unknown key
    void load_file(const std::string& path);
    void finalize();  // env fallback, cross-field validation
    std::string describe_keys() const;

    bool high_precision() const { return precision == "high"; }
};

}  // namespace steipcn
