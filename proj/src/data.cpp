#include "steipcn/data.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "steipcn/errors.hpp"

namespace steipcn {

namespace {

constexpr char kMagic[4] = {'S', 'T', 'T', 'D'};
constexpr uint32_t kVersion = 1;
constexpr int64_t kMaxCells = int64_t(1) << 31;

int floor_mod(int64_t a, int m) {
    int64_t r = a % m;
    if (r < 0) r += m;
    return static_cast<int>(r);
}

int64_t floor_div(int64_t a, int m) {
    int64_t q = a / m;
    if (a % m != 0 && (a < 0) != (m < 0)) --q;
    return q;
}

void put_u16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<uint32_t>(v)); }

void put_f64(std::string& out, double v) {
    uint64_t bits = std::bit_cast<uint64_t>(v);
    put_u32(out, static_cast<uint32_t>(bits & 0xffffffffULL));
    put_u32(out, static_cast<uint32_t>(bits >> 32));
}

struct ByteReader {
    const std::string& buf;
    size_t pos = 0;
    const char* what;

    void need(size_t n) const {
        if (pos + n > buf.size()) throw IoError(std::string(what) + ": short read (truncated file)");
    }
    uint16_t u16() {
        need(2);
        uint16_t v = static_cast<uint8_t>(buf[pos]) | (static_cast<uint16_t>(static_cast<uint8_t>(buf[pos + 1])) << 8);
        pos += 2;
        return v;
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

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + path);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("short write: " + path);
}

TrafficSeries parse_series_sttd(const std::string& buf) {
    ByteReader r{buf, 0, "STTD"};
    if (r.bytes(4) != std::string(kMagic, 4)) throw IoError("STTD: bad magic");
    if (uint32_t v = r.u32(); v != kVersion) throw IoError("STTD: unsupported version " + std::to_string(v));
    TrafficSeries s;
    s.n_nodes = static_cast<int>(r.u32());
    s.t_steps = static_cast<int>(r.u32());
    s.steps_per_day = static_cast<int>(r.u32());
    s.first_dow = static_cast<int>(r.u32());
    s.first_slot = static_cast<int>(r.u32());
    r.u32();  // reserved
    if (s.n_nodes < 1 || s.t_steps < 1 || s.steps_per_day < 1 || s.first_dow < 0 || s.first_dow > 6 ||
        s.first_slot < 0 || s.first_slot >= s.steps_per_day)
        throw IoError("STTD: invalid header fields");
    const int64_t cells = static_cast<int64_t>(s.n_nodes) * s.t_steps;
    if (cells > kMaxCells) throw IoError("STTD: dimension overflow");
    s.values.resize(static_cast<size_t>(cells));
    s.missing.resize(static_cast<size_t>(cells));
    for (int64_t i = 0; i < cells; ++i) {
        s.values[i] = r.f32();
        s.missing[i] = std::isnan(s.values[i]) ? 1 : 0;
    }
    return s;
}

}  // namespace

int TrafficSeries::slot_of(int t) const { return floor_mod(static_cast<int64_t>(first_slot) + t, steps_per_day); }

int TrafficSeries::dow_of(int t) const {
    const int64_t day = floor_div(static_cast<int64_t>(first_slot) + t, steps_per_day);
    return floor_mod(first_dow + day, 7);
}

TrafficSeries parse_series_csv(const std::string& text) {
    TrafficSeries s;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::vector<float> values;
    std::vector<uint8_t> missing;
    int n_cols = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string meta = line.substr(1);
            auto eq = meta.find('=');
            if (eq == std::string::npos) continue;  // comment without key=value
            auto trim = [](std::string v) {
                v.erase(0, v.find_first_not_of(" \t"));
                v.erase(v.find_last_not_of(" \t") + 1);
                return v;
            };
            const std::string key = trim(meta.substr(0, eq));
            const std::string val = trim(meta.substr(eq + 1));
            try {
                if (key == "t_d")
                    s.steps_per_day = std::stoi(val);
                else if (key == "first_dow")
                    s.first_dow = std::stoi(val);
                else if (key == "first_slot")
                    s.first_slot = std::stoi(val);
                else
                    throw ParseError("series CSV line " + std::to_string(line_no) + ": unknown key " + key);
            } catch (const ParseError&) {
                throw;
            } catch (...) {
                throw ParseError("series CSV line " + std::to_string(line_no) + ": bad value for " + key);
            }
            continue;
        }
        std::vector<std::string> fields;
        size_t pos = 0;
        while (true) {
            auto comma = line.find(',', pos);
            fields.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (n_cols < 0) n_cols = static_cast<int>(fields.size());
        if (static_cast<int>(fields.size()) != n_cols)
            throw ParseError("series CSV line " + std::to_string(line_no) + ": expected " +
                             std::to_string(n_cols) + " fields, got " + std::to_string(fields.size()));
        for (const auto& f : fields) {
            if (f.empty()) {
                values.push_back(std::numeric_limits<float>::quiet_NaN());
                missing.push_back(1);
                continue;
            }
            try {
                size_t parsed = 0;
                float v = std::stof(f, &parsed);
                if (parsed != f.size()) throw std::invalid_argument(f);
                values.push_back(v);
                missing.push_back(std::isnan(v) ? 1 : 0);
            } catch (...) {
                throw ParseError("series CSV line " + std::to_string(line_no) + ": bad number \"" + f + "\"");
            }
        }
    }
    if (n_cols <= 0) throw ParseError("series CSV: no data rows");
    s.n_nodes = n_cols;
    s.t_steps = static_cast<int>(values.size()) / n_cols;
    s.values = std::move(values);
    s.missing = std::move(missing);
    if (s.first_dow < 0 || s.first_dow > 6 || s.first_slot < 0 || s.first_slot >= s.steps_per_day)
        throw ParseError("series CSV: metadata out of range");
    return s;
}

TrafficSeries load_series(const std::string& path) {
    std::string buf = read_file(path);
    if (buf.size() >= 4 && std::memcmp(buf.data(), kMagic, 4) == 0) return parse_series_sttd(buf);
    return parse_series_csv(buf);
}

void save_series_sttd(const TrafficSeries& s, const std::string& path) {
    std::string out;
    out.append(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<uint32_t>(s.n_nodes));
    put_u32(out, static_cast<uint32_t>(s.t_steps));
    put_u32(out, static_cast<uint32_t>(s.steps_per_day));
    put_u32(out, static_cast<uint32_t>(s.first_dow));
    put_u32(out, static_cast<uint32_t>(s.first_slot));
    put_u32(out, 0);
    for (float v : s.values) put_f32(out, v);
    write_file(path, out);
}

void save_series_csv(const TrafficSeries& s, const std::string& path) {
    std::ostringstream out;
    out << "# t_d=" << s.steps_per_day << "\n# first_dow=" << s.first_dow
        << "\n# first_slot=" << s.first_slot << "\n";
    out.precision(9);
    for (int t = 0; t < s.t_steps; ++t) {
        for (int i = 0; i < s.n_nodes; ++i) {
            if (i) out << ',';
            if (!s.is_missing(t, i)) out << s.at(t, i);
        }
        out << '\n';
    }
    write_file(path, out.str());
}

SplitSpec parse_split_spec(const std::string& text) {
    SplitSpec spec;
    int parts[3];
    std::istringstream in(text);
    std::string field;
    for (int k = 0; k < 3; ++k) {
        if (!std::getline(in, field, ':')) throw ParseError("split spec: expected a:b:c, got \"" + text + "\"");
        try {
            parts[k] = std::stoi(field);
        } catch (...) {
            throw ParseError("split spec: bad component \"" + field + "\"");
        }
        if (parts[k] < 0) throw ParseError("split spec: negative component");
    }
    if (std::getline(in, field, ':')) throw ParseError("split spec: too many components");
    if (parts[0] + parts[1] + parts[2] <= 0) throw ParseError("split spec: all zero");
    spec.train = parts[0];
    spec.val = parts[1];
    spec.test = parts[2];
    return spec;
}

Splits split(int t_steps, const SplitSpec& spec) {
    const int total = spec.train + spec.val + spec.test;
    const int n_val = static_cast<int>(static_cast<int64_t>(t_steps) * spec.val / total);
    const int n_test = static_cast<int>(static_cast<int64_t>(t_steps) * spec.test / total);
    const int n_train = t_steps - n_val - n_test;  // remainder goes to train
    Splits out;
    out.train = {0, n_train};
    out.val = {n_train, n_train + n_val};
    out.test = {n_train + n_val, t_steps};
    return out;
}

Normalizer fit_normalizer(const TrafficSeries& s, IndexRange range) {
    double sum = 0, sq = 0;
    int64_t n = 0;
    for (int t = range.begin; t < range.end; ++t) {
        for (int i = 0; i < s.n_nodes; ++i) {
            if (s.is_missing(t, i)) continue;
            const double v = s.at(t, i);
            sum += v;
            sq += v * v;
            ++n;
        }
    }
    if (n == 0) throw ContractError("fit_normalizer: no observed entries in range");
    Normalizer norm;
    norm.mean = sum / static_cast<double>(n);
    const double var = sq / static_cast<double>(n) - norm.mean * norm.mean;
    norm.std = std::sqrt(std::max(0.0, var));
    if (norm.std <= 0) throw ContractError("fit_normalizer: constant series (zero standard deviation)");
    return norm;
}

int window_count(int range_length, int t_h, int t_p) {
    const int n = range_length - t_h - t_p + 1;
    return n > 0 ? n : 0;
}

std::vector<int> window_starts(IndexRange range, int t_h, int t_p) {
    std::vector<int> starts;
    const int n = window_count(range.length(), t_h, t_p);
    starts.reserve(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) starts.push_back(range.begin + k);
    return starts;
}

WindowSample make_window(const TrafficSeries& s, const Normalizer& norm, int start, int t_h, int t_p,
                         int beta) {
    if (start < 0 || start + t_h + t_p > s.t_steps)
        throw ContractError("make_window: window [" + std::to_string(start) + "," +
                            std::to_string(start + t_h + t_p) + ") outside series of " +
                            std::to_string(s.t_steps));
    WindowSample w;
    w.start = start;
    w.t_h = t_h;
    w.t_p = t_p;
    w.beta = beta;
    w.n_nodes = s.n_nodes;
    w.input.resize(static_cast<size_t>(t_h) * s.n_nodes);
    w.target.resize(static_cast<size_t>(t_p) * s.n_nodes);
    for (int t = 0; t < t_h; ++t)
        for (int i = 0; i < s.n_nodes; ++i)
            w.input[static_cast<size_t>(t) * s.n_nodes + i] =
                s.is_missing(start + t, i) ? 0.0 : norm.apply(s.at(start + t, i));
    for (int t = 0; t < t_p; ++t)
        for (int i = 0; i < s.n_nodes; ++i)
            w.target[static_cast<size_t>(t) * s.n_nodes + i] = s.at(start + t_h + t, i);
    w.slot.resize(static_cast<size_t>(t_h) + beta);
    w.dow.resize(static_cast<size_t>(t_h) + beta);
    for (int p = 0; p < t_h + beta; ++p) {
        const int t = start + p - beta;  // may be negative; calendar extends backward
        w.slot[p] = s.slot_of(t);
        w.dow[p] = s.dow_of(t);
    }
    return w;
}

TrafficSeries generate_synthetic(int n_nodes, int days, const RoadGraph& g, uint64_t seed,
                                 double noise_frac) {
    if (n_nodes < 1 || days < 1) throw ContractError("generate_synthetic: bad dimensions");
    if (g.n_nodes != n_nodes) throw ContractError("generate_synthetic: graph has " +
                                                  std::to_string(g.n_nodes) + " nodes, requested " +
                                                  std::to_string(n_nodes));
    constexpr int kTd = 288;
    constexpr double kBase = 100.0;
    constexpr double kDaily = 40.0;
    constexpr double kHalfDaily = 15.0;
    constexpr double kBlend = 0.3;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    std::vector<double> phi(n_nodes), psi(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        phi[i] = phase(rng);
        psi[i] = phase(rng);
    }

    std::vector<std::vector<int>> neighbors(n_nodes);
    for (auto [a, b] : g.edges) {
        neighbors[a].push_back(b);
        if (!g.directed) neighbors[b].push_back(a);
    }

    // One period of the blended (noise-free) profile; the series repeats it.
    std::vector<double> period(static_cast<size_t>(kTd) * n_nodes);
    std::vector<double> profile(n_nodes);
    for (int t = 0; t < kTd; ++t) {
        const double day_angle = 2.0 * M_PI * t / kTd;
        for (int i = 0; i < n_nodes; ++i)
            profile[i] = kBase + kDaily * std::sin(day_angle + phi[i]) +
                         kHalfDaily * std::sin(2.0 * day_angle + psi[i]);
        for (int i = 0; i < n_nodes; ++i) {
            double blended = profile[i];
            if (!neighbors[i].empty()) {
                double acc = 0;
                for (int j : neighbors[i]) acc += profile[j];
                blended = (1.0 - kBlend) * profile[i] + kBlend * acc / neighbors[i].size();
            }
            period[static_cast<size_t>(t) * n_nodes + i] = blended;
        }
    }
    // Noise scale follows the realized oscillation, so the noise-to-signal
    // ratio is noise_frac regardless of phases and blending.
    double osc_sq = 0;
    for (double v : period) osc_sq += (v - kBase) * (v - kBase);
    const double sigma = noise_frac * std::sqrt(osc_sq / static_cast<double>(period.size()));

    TrafficSeries s;
    s.n_nodes = n_nodes;
    s.t_steps = days * kTd;
    s.steps_per_day = kTd;
    s.first_dow = 0;
    s.first_slot = 0;
    s.values.resize(static_cast<size_t>(s.t_steps) * n_nodes);
    s.missing.assign(s.values.size(), 0);

    std::normal_distribution<double> noise(0.0, 1.0);
    for (int t = 0; t < s.t_steps; ++t) {
        for (int i = 0; i < n_nodes; ++i) {
            const double blended = period[static_cast<size_t>(t % kTd) * n_nodes + i];
            const double noisy = blended + (sigma > 0 ? sigma * noise(rng) : 0.0);
            s.values[static_cast<size_t>(t) * n_nodes + i] = static_cast<float>(noisy);
        }
    }
    return s;
}

}  // namespace steipcn
