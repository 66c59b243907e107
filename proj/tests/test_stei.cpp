#include <cmath>
#include <random>

#include "doctest.h"
#include "steipcn/errors.hpp"
#include "steipcn/gradcheck.hpp"
#include "steipcn/stei.hpp"

using namespace steipcn;

namespace {

RoadGraph path_graph(int n) {
    RoadGraph g;
    g.n_nodes = n;
    for (int i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1});
    return g;
}

struct Fixture {
    STEdgeSet edges;
    STIndexPlan plan;
    EmbeddingTables<double> tables;
    PolyCenters<double> centers;
    WindowCalendar cal;

    Fixture(int n, int alpha, int beta, int t_h, int d, uint64_t seed) {
        edges = build_st_edges(compute_hops(path_graph(n), alpha), beta);
        plan = build_index_plan(edges, t_h);
        std::mt19937_64 rng(seed);
        tables = init_tables<double>(n, 24, alpha, beta, d, rng);
        centers = init_centers<double>(d, rng);
        for (int p = 0; p < t_h + beta; ++p) {
            cal.slot.push_back((p + 5) % 24);
            cal.dow.push_back(((p + 5) / 24) % 7);
        }
        cal.beta = beta;
    }

    void zero_everything() {
        for (auto* t : {&tables.z_s, &tables.z_d, &tables.z_w, &tables.z_sd, &tables.z_td})
            std::fill((*t)->v.begin(), (*t)->v.end(), 0.0);
        for (auto& mu : centers.mu) std::fill(mu->v.begin(), mu->v.end(), 0.0);
    }
};

}  // namespace

TEST_SUITE("stei") {
    TEST_CASE("poly is the negative euclidean distance") {
        Tape<double> tape;
        auto z = tensor_of<double>({2}, {1, 2});
        CHECK(poly(tape, z, z)->v[0] == 0.0);

        auto z1 = tensor_of<double>({1}, {0.5});
        auto mu1 = tensor_of<double>({1}, {0.0});
        CHECK(poly(tape, z1, mu1)->v[0] == doctest::Approx(-0.5));

        std::mt19937_64 rng(1);
        std::normal_distribution<double> dist;
        auto za = tensor<double>({3});
        auto mb = tensor<double>({3});
        for (auto& v : za->v) v = dist(rng);
        for (auto& v : mb->v) v = dist(rng);
        double want = 0;
        for (int i = 0; i < 3; ++i) want += (za->v[i] - mb->v[i]) * (za->v[i] - mb->v[i]);
        CHECK(poly(tape, za, mb)->v[0] == doctest::Approx(-std::sqrt(want)).epsilon(1e-15));
    }

    TEST_CASE("index plan enumerates t-major with self pairs and causal offsets") {
        Fixture f(3, 1, 2, 4, 2, 7);
        CHECK(f.plan.entries == 4 * f.edges.m_total());
        CHECK(f.plan.zero_row == 4 * 3);
        for (int64_t e = 0; e < f.plan.entries; ++e) {
            const int t = f.plan.target_time[e];
            const int b = f.plan.offset[e];
            CHECK(b >= 0);
            CHECK(b <= 2);  // never references a future timestamp
            CHECK(f.plan.source_time[e] == t - b + 2);
            CHECK(f.plan.agg_target_row[e] == t * 3 + f.plan.target_node[e]);
            if (t - b >= 0)
                CHECK(f.plan.agg_source_row[e] == (t - b) * 3 + f.plan.source_node[e]);
            else
                CHECK(f.plan.agg_source_row[e] == f.plan.zero_row);
        }
    }

    TEST_CASE("all-zero tables and centers give weight 6 everywhere") {
        Fixture f(2, 1, 1, 3, 2, 11);
        f.zero_everything();
        Tape<double> tape;
        auto w = factored_infer_weights(tape, f.tables, f.centers, f.plan, f.cal);
        for (double v : w.s->v) CHECK(v == doctest::Approx(6.0).epsilon(1e-15));
    }

    TEST_CASE("single off-center term: s = exp(-1) + 5") {
        Fixture f(1, 0, 0, 1, 1, 13);
        f.zero_everything();
        f.tables.z_s->v[0] = 1.0;   // z_i^S = z_j^S = 1
        f.centers.mu[0]->v[0] = 0;  // poly_1 distance 1
        f.centers.mu[1]->v[0] = 1;  // poly_2 coincident
        Tape<double> tape;
        auto w = infer_weights(tape, f.tables, f.centers, f.plan, f.cal);
        REQUIRE(w.s->size() == 1);
        CHECK(w.s->v[0] == doctest::Approx(std::exp(-1.0) + 5.0).epsilon(1e-12));
    }

    TEST_CASE("weights decrease strictly as a distance encoding moves away from its center") {
        Fixture f(3, 1, 1, 2, 2, 17);
        Tape<double> tape;
        auto w0 = factored_infer_weights(tape, f.tables, f.centers, f.plan, f.cal);
        // push z_sd rows away from mu5
        for (auto& v : f.tables.z_sd->v) v += 3.0;
        auto w1 = factored_infer_weights(tape, f.tables, f.centers, f.plan, f.cal);
        for (int64_t e = 0; e < f.plan.entries; ++e) CHECK(w1.s->v[e] < w0.s->v[e]);
    }

    TEST_CASE("every weight lies in (0, 6]; 6 only at full coincidence") {
        Fixture f(4, 2, 2, 5, 3, 19);
        Tape<double> tape;
        auto w = factored_infer_weights(tape, f.tables, f.centers, f.plan, f.cal);
        for (double v : w.s->v) {
            CHECK(v > 0.0);
            CHECK(v <= 6.0);
            CHECK(v < 6.0);  // random tables: coincidence has probability zero
        }
        f.zero_everything();
        auto w6 = factored_infer_weights(tape, f.tables, f.centers, f.plan, f.cal);
        for (double v : w6.s->v) CHECK(v == 6.0);
    }

    TEST_CASE("factored path equals the direct path bitwise") {
        Fixture f(4, 2, 1, 3, 3, 23);
        Tape<double> tape;
        auto direct = infer_weights(tape, f.tables, f.centers, f.plan, f.cal);
        auto factored = factored_infer_weights(tape, f.tables, f.centers, f.plan, f.cal);
        REQUIRE(direct.s->size() == factored.s->size());
        for (int64_t e = 0; e < direct.s->size(); ++e) REQUIRE(direct.s->v[e] == factored.s->v[e]);
    }

    TEST_CASE("factored path in float equals direct path bitwise too") {
        auto edges = build_st_edges(compute_hops(path_graph(3), 1), 1);
        auto plan = build_index_plan(edges, 4);
        std::mt19937_64 rng(29);
        auto tables = init_tables<float>(3, 12, 1, 1, 2, rng);
        auto centers = init_centers<float>(2, rng);
        WindowCalendar cal;
        for (int p = 0; p < 5; ++p) {
            cal.slot.push_back(p % 12);
            cal.dow.push_back(0);
        }
        cal.beta = 1;
        Tape<float> tape;
        auto direct = infer_weights(tape, tables, centers, plan, cal);
        auto factored = factored_infer_weights(tape, tables, centers, plan, cal);
        for (int64_t e = 0; e < direct.s->size(); ++e) REQUIRE(direct.s->v[e] == factored.s->v[e]);
    }

    TEST_CASE("poly evaluation counts: 6*T_h*M direct, closed-form cache factored") {
        Fixture f(5, 2, 2, 6, 2, 31);
        const int64_t m_total = f.edges.m_total();
        op_counters().reset();
        {
            Tape<double> tape;
            infer_weights(tape, f.tables, f.centers, f.plan, f.cal);
        }
        CHECK(op_counters().poly_evals == static_cast<uint64_t>(6 * 6 * m_total));
        op_counters().reset();
        {
            Tape<double> tape;
            factored_infer_weights(tape, f.tables, f.centers, f.plan, f.cal);
        }
        const uint64_t want = 5 + 5 + 6 + (6 + 2) + (2 + 1) + (2 + 1);
        CHECK(op_counters().poly_evals == want);
    }

    TEST_CASE("single node, beta=0 cache sizes") {
        Fixture f(1, 0, 0, 4, 2, 37);
        op_counters().reset();
        Tape<double> tape;
        factored_infer_weights(tape, f.tables, f.centers, f.plan, f.cal);
        // caches: 1, 1, T_h, T_h, 1, 1
        CHECK(op_counters().poly_evals == static_cast<uint64_t>(1 + 1 + 4 + 4 + 1 + 1));
    }

    TEST_CASE("short calendar rejected") {
        Fixture f(2, 1, 2, 4, 2, 41);
        f.cal.slot.resize(3);
        Tape<double> tape;
        CHECK_THROWS_AS(factored_infer_weights(tape, f.tables, f.centers, f.plan, f.cal), ContractError);
    }

    TEST_CASE("gradcheck over centers and all five tables") {
        Fixture f(3, 1, 1, 3, 2, 43);
        ParamRegistry<double> reg;
        reg.add("z_s", f.tables.z_s);
        reg.add("z_d", f.tables.z_d);
        reg.add("z_w", f.tables.z_w);
        reg.add("z_sd", f.tables.z_sd);
        reg.add("z_td", f.tables.z_td);
        for (int k = 0; k < 6; ++k) reg.add("mu" + std::to_string(k + 1), f.centers.mu[k]);
        auto report = check_gradients(reg, [&](Tape<double>& tape) {
            auto w = factored_infer_weights(tape, f.tables, f.centers, f.plan, f.cal);
            return sum_all(tape, elementwise_mul(tape, w.s, w.s));
        });
        CHECK(report.max_rel_err < 1e-4);
    }

    TEST_CASE("ablated families drop their terms from the sum") {
        Fixture f(2, 1, 1, 2, 2, 47);
        f.zero_everything();
        f.tables.z_sd = nullptr;  // spatial-distance family removed
        f.centers.mu[4] = nullptr;
        Tape<double> tape;
        auto w = factored_infer_weights(tape, f.tables, f.centers, f.plan, f.cal);
        for (double v : w.s->v) CHECK(v == doctest::Approx(5.0));
    }
}
