#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "gsq/pipeline.hpp"
#include "testutil.hpp"

using namespace gsq;

namespace {

// Trained fixture pipeline, built once per test binary.
struct Env {
    PipelineConfig cfg;
    Pipeline pipeline;

    Env() {
        cfg.kg_path = testutil::fixture("data/movie_kg.tsv");
        cfg.lexicon_path = testutil::fixture("data/movie_lexicon.tsv");
        cfg.embedding_path = testutil::fixture("build_tmp_pipeline_embeddings.tsv");
        cfg.train.dim = 16;
        cfg.train.epochs = 150;
        cfg.train.negatives = 2;
        cfg.train.learning_rate = 0.02;
        KnowledgeGraph kg = KnowledgeGraph::load(cfg.kg_path);
        TrainResult r = train(kg, GlkgIndex::build(kg), cfg.train);
        save_embeddings(r.store, kg, cfg.embedding_path);
        pipeline = Pipeline::load(cfg);
    }
    ~Env() { std::remove(cfg.embedding_path.c_str()); }
};

Env& env() {
    static Env e;
    return e;
}

const std::string kQ1 = "which actor starred in the movies directed by tim burton";
const std::string kQ2 = "who is the mayor of berlin";

}  // namespace

TEST_CASE("running example end to end") {
    auto& e = env();
    QuestionResult r = run_question(e.pipeline, e.cfg, kQ1);
    CHECK(r.answer_labels == std::vector<std::string>{"Michael_Keaton"});
    CHECK(r.exec.stage == "full");

    std::ifstream golden(testutil::fixture("tests/golden/fixture_query.txt"));
    std::string expected((std::istreambuf_iterator<char>(golden)),
                         std::istreambuf_iterator<char>());
    CHECK(r.query_text == expected);

    StructureMatrix want(3, 2);
    want.at(1, 0) = 1;
    want.at(1, 2) = 2;
    CHECK(r.matrix == want);
    CHECK(r.timings.phrase_ms >= 0.0);
}

TEST_CASE("wh question end to end") {
    auto& e = env();
    QuestionResult r = run_question(e.pipeline, e.cfg, kQ2);
    CHECK(r.answer_labels == std::vector<std::string>{"Klaus_Wowereit"});
    CHECK(r.query_text.find("?who") != std::string::npos);
}

TEST_CASE("unmappable questions raise the dedicated error") {
    auto& e = env();
    CHECK_THROWS_AS(run_question(e.pipeline, e.cfg, "xyzzy"), UnmappableQuestion);
    CHECK_THROWS_AS(run_question(e.pipeline, e.cfg, "berlin"), UnmappableQuestion);
}

TEST_CASE("question runs are deterministic") {
    auto& e = env();
    QuestionResult a = run_question(e.pipeline, e.cfg, kQ1);
    QuestionResult b = run_question(e.pipeline, e.cfg, kQ1);
    CHECK(a.query_text == b.query_text);
    CHECK(a.answer_labels == b.answer_labels);
    CHECK(a.matrix == b.matrix);
}

TEST_CASE("structure dump is attached on request") {
    auto& e = env();
    PipelineConfig cfg = e.cfg;
    cfg.dump_structure = true;
    QuestionResult r = run_question(e.pipeline, cfg, kQ2);
    CHECK(r.structure_dump.find("structure_matrix") != std::string::npos);
}

TEST_CASE("QA dataset loading") {
    auto records = load_qa(testutil::fixture("data/qa_fixture.tsv"));
    REQUIRE(records.size() == 10);
    CHECK(records[0].nlq == kQ1);
    CHECK(records[1].gold == std::vector<std::string>{"Michael_Keaton", "Klaus_Wowereit"});
    CHECK(records[5].nlq == "xyzzy");
    auto bad = testutil::fixture("build_tmp_bad_qa.tsv");
    {
        std::ofstream out(bad);
        out << "question without gold\n";
    }
    CHECK_THROWS(load_qa(bad));
    std::remove(bad.c_str());
}

TEST_CASE("F-1 arithmetic") {
    CHECK(f1_score(0.0, 0.0) == 0.0);
    CHECK(f1_score(1.0, 1.0) == 1.0);
    CHECK(f1_score(0.85, 0.73) == doctest::Approx(0.785).epsilon(0.002));
    for (int i = 0; i < 100; ++i) {
        double p = i / 99.0, r = (99 - i) / 99.0;
        double expect = p + r == 0.0 ? 0.0 : 2 * p * r / (p + r);
        CHECK(f1_score(p, r) == doctest::Approx(expect));
    }
}

TEST_CASE("QA metrics match the hand-scored fixture") {
    auto& e = env();
    auto records = load_qa(testutil::fixture("data/qa_fixture.tsv"));
    MetricsReport report = eval_qa(e.pipeline, e.cfg, records);
    REQUIRE(report.per_question.size() == 10);
    const double eps = 1e-9;
    CHECK(report.per_question[0].recall == doctest::Approx(1.0).epsilon(eps));
    CHECK(report.per_question[1].recall == doctest::Approx(0.5).epsilon(eps));
    CHECK(report.per_question[1].precision == doctest::Approx(1.0).epsilon(eps));
    CHECK(report.per_question[2].f1 == 0.0);
    CHECK(report.per_question[5].f1 == 0.0);  // unmappable
    CHECK(report.per_question[8].recall == doctest::Approx(1.0 / 3.0).epsilon(eps));
    CHECK(report.recall == doctest::Approx(8.0 / 15.0).epsilon(eps));
    CHECK(report.precision == doctest::Approx(0.7).epsilon(eps));
    CHECK(report.f1 == doctest::Approx(112.0 / 185.0).epsilon(eps));
}

TEST_CASE("link prediction ranks by translation cost") {
    auto kg = KnowledgeGraph::from_triples({{"a", "rel", "b"}, {"a", "rel", "c"}});
    EmbeddingStore store(2, kg.vertex_count(), kg.edge_count());
    store.vertex(kg.require_vertex("a")) = {0.0, 0.0};
    store.vertex(kg.require_vertex("b")) = {1.0, 0.0};
    store.vertex(kg.require_vertex("c")) = {5.0, 5.0};
    store.vertex(kg.universal_class()) = {9.0, 9.0};
    store.edge(kg.require_edge("rel")) = {1.0, 0.0};

    LpReport perfect = eval_lp(kg, store, {{"a", "rel", "b"}});
    CHECK(perfect.mean_rank == 1.0);
    CHECK(perfect.hits_at_10 == 1.0);
    CHECK(perfect.evaluated == 2);

    // (a, rel, c): true tail c ranks 3rd (b and a are closer to a + e);
    // true head a also ranks 3rd for c - e
    LpReport mixed = eval_lp(kg, store, {{"a", "rel", "c"}});
    CHECK(mixed.mean_rank == doctest::Approx(3.0));

    LpReport skipped = eval_lp(kg, store, {{"a", "rel", "nope"}, {"a", "rel", "b"}});
    CHECK(skipped.skipped == 1);
    CHECK(skipped.evaluated == 2);

    // parallel path agrees with serial
    LpReport par = eval_lp(kg, store, {{"a", "rel", "b"}, {"a", "rel", "c"}}, 4);
    LpReport ser = eval_lp(kg, store, {{"a", "rel", "b"}, {"a", "rel", "c"}}, 1);
    CHECK(par.mean_rank == ser.mean_rank);
    CHECK(par.hits_at_10 == ser.hits_at_10);
}

TEST_CASE("bench reports mean per-module timings") {
    auto& e = env();
    BenchReport report = bench(e.pipeline, e.cfg, {kQ1, kQ2});
    CHECK(report.questions == 2);
    CHECK(report.mean.phrase_ms >= 0.0);
    CHECK(report.mean.structure_ms >= 0.0);
    CHECK(report.mean.querygen_ms >= 0.0);
}
