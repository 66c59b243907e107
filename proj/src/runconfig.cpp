#include "steipcn/runconfig.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "steipcn/errors.hpp"

namespace steipcn {

namespace {

int to_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        int out = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (...) {
        throw ParseError("config: bad integer for " + key + ": \"" + v + "\"");
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (...) {
        throw ParseError("config: bad number for " + key + ": \"" + v + "\"");
    }
}

uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        uint64_t out = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (...) {
        throw ParseError("config: bad integer for " + key + ": \"" + v + "\"");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ParseError("config: bad flag for " + key + ": \"" + v + "\"");
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "alpha")
        model.alpha = to_int(key, value);
    else if (key == "beta")
        model.beta = to_int(key, value);
    else if (key == "d")
        model.d = to_int(key, value);
    else if (key == "channels")
        model.channels = to_int(key, value);
    else if (key == "t_h")
        model.t_h = to_int(key, value);
    else if (key == "t_p")
        model.t_p = to_int(key, value);
    else if (key == "tdcn_layers")
        model.tdcn_layers = to_int(key, value);
    else if (key == "seed") {
        model.seed = to_u64(key, value);
        train.seed = model.seed;
    } else if (key == "no_sce")
        model.ab.no_sce = to_bool(key, value);
    else if (key == "no_tce")
        model.ab.no_tce = to_bool(key, value);
    else if (key == "no_sde")
        model.ab.no_sde = to_bool(key, value);
    else if (key == "no_tde")
        model.ab.no_tde = to_bool(key, value);
    else if (key == "no_stei")
        model.ab.no_stei = to_bool(key, value);
    else if (key == "no_stpgau")
        model.ab.no_stpgau = to_bool(key, value);
    else if (key == "no_gcn")
        model.ab.no_gcn = to_bool(key, value);
    else if (key == "no_tdcn")
        model.ab.no_tdcn = to_bool(key, value);
    else if (key == "no_mvc")
        model.ab.no_mvc = to_bool(key, value);
    else if (key == "lr")
        train.lr = to_double(key, value);
    else if (key == "batch_size")
        train.batch_size = to_int(key, value);
    else if (key == "max_epochs")
        train.max_epochs = to_int(key, value);
    else if (key == "patience")
        train.patience = to_int(key, value);
    else if (key == "mape_epsilon")
        train.mape_epsilon = to_double(key, value);
    else if (key == "adam_beta1")
        train.adam_beta1 = to_double(key, value);
    else if (key == "adam_beta2")
        train.adam_beta2 = to_double(key, value);
    else if (key == "adam_eps")
        train.adam_eps = to_double(key, value);
    else if (key == "target_train_mae")
        train.target_train_mae = to_double(key, value);
    else if (key == "precision") {
        if (value != "standard" && value != "high")
            throw ParseError("config: precision must be standard or high, got \"" + value + "\"");
        precision = value;
    } else if (key == "split")
        split = value;
    else if (key == "graph")
        graph_path = value;
    else if (key == "data")
        data_path = value;
    else if (key == "out")
        out_path = value;
    else if (key == "checkpoint")
        checkpoint_path = value;
    else if (key == "nodes")
        nodes_override = to_int(key, value);
    else if (key == "directed")
        directed = to_bool(key, value);
    else if (key == "synth_nodes")
        synth_nodes = to_int(key, value);
    else if (key == "synth_days")
        synth_days = to_int(key, value);
    else if (key == "synth_noise")
        synth_noise = to_double(key, value);
    else
        throw ParseError("config: unknown key \"" + key + "\"");
}

void RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line.erase(0, line.find_first_not_of(" \t"));
        line.erase(line.find_last_not_of(" \t") + 1);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(line_no) + ": expected key=value, got \"" + line +
                             "\"");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        try {
            set(key, value);
        } catch (const ParseError& e) {
            throw ParseError(std::string(e.what()) + " (config line " + std::to_string(line_no) + ")");
        }
    }
}

void RunConfig::finalize() {
    if (const char* env = std::getenv("STEIPCN_SEED"); env && *env) {
        // Only backs the default; explicit seed keys/flags win.
        if (model.seed == ModelConfig{}.seed && train.seed == TrainConfig{}.seed) {
            model.seed = to_u64("STEIPCN_SEED", env);
            train.seed = model.seed;
        }
    }
    model.validate();
    parse_split_spec(split);
}

std::string RunConfig::describe_keys() const {
    std::ostringstream out;
    out << "config keys (key=value per line, # comments):\n"
        << "  model: alpha=4 beta=2 d=6 channels=64 t_h=12 t_p=12 tdcn_layers=3 seed=42\n"
        << "  ablations: no_sce no_tce no_sde no_tde no_stei no_stpgau no_gcn no_tdcn no_mvc (=0|1)\n"
        << "  training: lr=0.002 batch_size=32 max_epochs=200 patience=15 mape_epsilon=1.0\n"
        << "            adam_beta1=0.9 adam_beta2=0.999 adam_eps=1e-8 target_train_mae=0\n"
        << "  run: precision=standard|high split=6:2:2 graph= data= out= checkpoint=\n"
        << "       nodes=-1 directed=0 synth_nodes=8 synth_days=7 synth_noise=0.05\n"
        << "  env: STEIPCN_SEED backs the seed default\n";
    return out.str();
}

}  // namespace steipcn
