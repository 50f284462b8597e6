#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "gsq/embedding.hpp"
#include "testutil.hpp"

using namespace gsq;

namespace {

EmbeddingStore random_store(const KnowledgeGraph& kg, int dim, std::uint64_t seed) {
    EmbeddingStore store(dim, kg.vertex_count(), kg.edge_count());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    for (VertexId v = 0; v < kg.vertex_count(); ++v) {
        for (double& x : store.vertex(v)) x = dist(rng);
    }
    for (EdgeId e = 0; e < kg.edge_count(); ++e) {
        for (double& x : store.edge(e)) x = dist(rng);
    }
    return store;
}

}  // namespace

TEST_CASE("translate_score is the squared translation residual") {
    CHECK(translate_score({1, 2}, {3, 4}, {4, 6}) == 0.0);
    CHECK(translate_score({1, 0}, {0, 0}, {0, 0}) == 1.0);
    CHECK(translate_score({1, 2}, {1, 1}, {0, 0}) == doctest::Approx(13.0));
    CHECK_THROWS(translate_score({1, 2}, {1}, {0, 0}));
}

TEST_CASE("attention is exp(support / |L-KG|)") {
    KnowledgeGraph kg = testutil::movie_kg();
    auto tb = generalize(kg, Owner::vertex(kg.require_vertex("Tim_Burton")));
    REQUIRE(tb.triples.size() == 1);
    CHECK(attention_vertex(kg, tb, tb.triples[0]) == doctest::Approx(std::exp(2.0 / 2.0)));
    auto starring = generalize(kg, Owner::edge(kg.require_edge("starring")));
    for (const auto& t : starring.triples) {
        CHECK(attention_edge(kg, starring, t) ==
              doctest::Approx(std::exp(t.support / 3.0)));
    }
    // wrong-kind and empty-GL-KG calls are rejected
    CHECK_THROWS(attention_vertex(kg, starring, starring.triples[0]));
    auto tbp = generalize(kg, Owner::vertex(kg.require_vertex("Tim_Burton_Productions")));
    CHECK_THROWS(attention_vertex(kg, tbp, tb.triples[0]));
}

TEST_CASE("f is the attention-weighted negative mean residual") {
    KnowledgeGraph kg = testutil::movie_kg();
    EmbeddingStore store = random_store(kg, 4, 11);
    auto tb_id = kg.require_vertex("Tim_Burton");
    auto g = generalize(kg, Owner::vertex(tb_id));
    REQUIRE(g.triples.size() == 1);
    const auto& t = g.triples[0];  // (Film, director, Tim_Burton), In
    double expected =
        -translate_score(store.vertex(t.head), store.edge(t.edge), store.vertex(tb_id));
    CHECK(f_vertex(store.vertex(tb_id), g, store) == doctest::Approx(expected));

    // multi-triple case: manual weighted mean
    auto film = generalize(kg, Owner::vertex(kg.require_vertex("Film")));
    const Vec& cand = store.vertex(kg.require_vertex("Film"));
    double acc = 0.0, total = 0.0;
    for (const auto& gt : film.triples) {
        double a = std::exp(static_cast<double>(gt.support) / film.denominator);
        total += a;
        double r = gt.dir == Direction::Out
                       ? translate_score(cand, store.edge(gt.edge), store.vertex(gt.tail))
                       : translate_score(store.vertex(gt.head), store.edge(gt.edge), cand);
        acc += a * r;
    }
    CHECK(f_vertex(cand, film, store) == doctest::Approx(-acc / total));
    CHECK(f_score(cand, film, store) == f_vertex(cand, film, store));
}

TEST_CASE("analytic gradient matches central finite differences") {
    KnowledgeGraph kg = testutil::movie_kg();
    GlkgIndex glkgs = GlkgIndex::build(kg);
    EmbeddingStore store = random_store(kg, 5, 23);
    const double h = 1e-5;

    auto check_owner = [&](Owner owner, std::vector<std::uint32_t> negs) {
        const auto& g = glkgs.of(owner);
        if (g.empty()) return;
        GradientMap grads;
        log_prob_example(g, negs, store, &grads);
        auto check_slot = [&](Owner slot, const Vec& gvec) {
            for (int i = 0; i < store.dim(); ++i) {
                EmbeddingStore plus = store, minus = store;
                plus.of(slot)[i] += h;
                minus.of(slot)[i] -= h;
                double numeric =
                    (log_prob_example(g, negs, plus) - log_prob_example(g, negs, minus)) / (2 * h);
                CHECK(gvec[i] == doctest::Approx(numeric).epsilon(1e-4));
            }
        };
        for (const auto& [id, gvec] : grads.vertex) check_slot(Owner::vertex(id), gvec);
        for (const auto& [id, gvec] : grads.edge) check_slot(Owner::edge(id), gvec);
    };
    check_owner(Owner::vertex(kg.require_vertex("Tim_Burton")),
                {kg.require_vertex("Berlin"), kg.require_vertex("Michael_Keaton")});
    check_owner(Owner::vertex(kg.require_vertex("Film")), {kg.require_vertex("City")});
    check_owner(Owner::edge(kg.require_edge("starring")), {kg.require_edge("mayor")});
}

TEST_CASE("negative sampler honors kind, distinctness, and disjointness") {
    KnowledgeGraph kg = testutil::movie_kg();
    GlkgIndex glkgs = GlkgIndex::build(kg);
    NegativeSampler sampler(kg, glkgs, 99);
    Owner mk = Owner::vertex(kg.require_vertex("Michael_Keaton"));
    for (int round = 0; round < 20; ++round) {
        auto negs = sampler.sample(mk, 3);
        CHECK(negs.size() == 3);
        std::set<std::uint32_t> uniq(negs.begin(), negs.end());
        CHECK(uniq.size() == 3);
        for (auto n : negs) {
            CHECK(n != mk.id);
            CHECK(sampler.disjoint(mk, Owner::vertex(n)));
            CHECK(!glkgs.vertices[n].empty());
        }
    }
    // the empty-GL-KG vertex never appears in the trainable pool
    auto tbp = kg.require_vertex("Tim_Burton_Productions");
    const auto& pool = sampler.trainable(Owner::Kind::Vertex);
    CHECK(std::find(pool.begin(), pool.end(), tbp) == pool.end());
}

TEST_CASE("serial training is deterministic and raises the objective") {
    KnowledgeGraph kg = testutil::movie_kg();
    GlkgIndex glkgs = GlkgIndex::build(kg);
    TrainConfig cfg;
    cfg.dim = 8;
    cfg.epochs = 40;
    cfg.negatives = 2;
    cfg.learning_rate = 0.02;
    TrainResult a = train(kg, glkgs, cfg);
    TrainResult b = train(kg, glkgs, cfg);
    CHECK(a.store == b.store);
    CHECK(a.epoch_objective == b.epoch_objective);
    CHECK(a.epoch_objective.back() > a.epoch_objective.front());
    // trained vertex vectors stay on the unit sphere
    for (VertexId v = 0; v < kg.vertex_count(); ++v) {
        double n = 0.0;
        for (double x : a.store.vertex(v)) n += x * x;
        CHECK(n == doctest::Approx(1.0));
    }
}

TEST_CASE("parallel training runs and also improves the objective") {
    KnowledgeGraph kg = testutil::movie_kg();
    GlkgIndex glkgs = GlkgIndex::build(kg);
    TrainConfig cfg;
    cfg.dim = 8;
    cfg.epochs = 40;
    cfg.negatives = 2;
    cfg.learning_rate = 0.02;
    cfg.workers = 4;
    TrainResult r = train(kg, glkgs, cfg);
    REQUIRE(r.epoch_objective.size() == 40);
    CHECK(std::isfinite(r.epoch_objective.back()));
    CHECK(r.epoch_objective.back() > r.epoch_objective.front());
}

TEST_CASE("embedding files round-trip bit-exactly") {
    KnowledgeGraph kg = testutil::movie_kg();
    EmbeddingStore store = random_store(kg, 7, 5);
    auto path = testutil::fixture("build_tmp_embeddings.tsv");
    save_embeddings(store, kg, path);
    EmbeddingStore loaded = load_embeddings(kg, path);
    CHECK(loaded == store);
    std::remove(path.c_str());
    CHECK_THROWS(load_embeddings(kg, path));
}

TEST_CASE("config validation rejects bad ranges") {
    TrainConfig cfg;
    cfg.dim = 1;
    CHECK_THROWS(cfg.validate());
    cfg = {};
    cfg.learning_rate = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg = {};
    cfg.lambda_v = 0.0;
    cfg.lambda_e = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg = {};
    CHECK_NOTHROW(cfg.validate());
}
