#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "steipcn/graph.hpp"

namespace steipcn {

// Raw traffic observations, time-major. Missing entries are stored as NaN
// and mirrored in the mask.
struct TrafficSeries {
    int t_steps = 0;
    int n_nodes = 0;
    int steps_per_day = 288;  // T_d
    int first_dow = 0;        // 0 = Monday
    int first_slot = 0;
    std::vector<float> values;     // t_steps * n_nodes
    std::vector<uint8_t> missing;  // same layout

    float at(int t, int i) const { return values[static_cast<size_t>(t) * n_nodes + i]; }
    bool is_missing(int t, int i) const { return missing[static_cast<size_t>(t) * n_nodes + i] != 0; }

    // Calendar indices for any time index, including t < 0 (the window
    // reach-back extends the calendar before the series start).
    int slot_of(int t) const;
    int dow_of(int t) const;
};

// Reads either the STTD binary container or the annotated CSV form,
// dispatching on the leading magic bytes.
TrafficSeries load_series(const std::string& path);
void save_series_sttd(const TrafficSeries& s, const std::string& path);
void save_series_csv(const TrafficSeries& s, const std::string& path);
TrafficSeries parse_series_csv(const std::string& text);

struct IndexRange {
    int begin = 0;
    int end = 0;  // exclusive
    int length() const { return end - begin; }
};

// Chronological ratio split; remainder from flooring the later parts goes to
// the training range.
struct SplitSpec {
    int train = 6, val = 2, test = 2;
};
SplitSpec parse_split_spec(const std::string& text);  // "6:2:2"

struct Splits {
    IndexRange train, val, test;
};
Splits split(int t_steps, const SplitSpec& spec);

// Z-score over non-missing entries of the fit range only.
struct Normalizer {
    double mean = 0;
    double std = 1;
    double apply(double x) const { return (x - mean) / std; }
    double invert(double z) const { return z * std + mean; }
};
Normalizer fit_normalizer(const TrafficSeries& s, IndexRange range);

// One training/evaluation unit. Input is normalized with missing entries
// zero-filled; target stays in original scale (NaN marks missing). The
// calendar covers window-relative positions -beta .. t_h-1, index p = tau+beta.
struct WindowSample {
    int start = 0;
    int t_h = 0, t_p = 0, beta = 0, n_nodes = 0;
    std::vector<double> input;   // t_h * n_nodes, normalized
    std::vector<double> target;  // t_p * n_nodes, original scale
    std::vector<int> slot, dow;  // t_h + beta entries
};

int window_count(int range_length, int t_h, int t_p);
std::vector<int> window_starts(IndexRange range, int t_h, int t_p);
WindowSample make_window(const TrafficSeries& s, const Normalizer& norm, int start, int t_h, int t_p,
                         int beta);

// Seeded stand-in dataset: per-node daily profile (daily + half-daily
// sinusoids with node-specific phases), one-step neighbor blending at 0.3,
// and Gaussian noise with sigma = noise_frac times the RMS oscillation
// amplitude of the blended profile.
TrafficSeries generate_synthetic(int n_nodes, int days, const RoadGraph& g, uint64_t seed,
                                 double noise_frac = 0.05);

}  // namespace steipcn
