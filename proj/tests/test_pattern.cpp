#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "gsq/pattern.hpp"
#include "testutil.hpp"

using namespace gsq;

TEST_CASE("single pattern with one variable") {
    KnowledgeGraph kg = testutil::movie_kg();
    auto results = match_pattern(kg, {make_pattern(kg, "?m", "director", "Tim_Burton")});
    REQUIRE(results.size() == 2);
    std::vector<std::string> labels;
    for (const Binding& b : results) labels.push_back(kg.vertex_label(b.at("m").id));
    CHECK(labels == std::vector<std::string>{"Batman", "Beetlejuice"});
}

TEST_CASE("conjunctive join across patterns") {
    KnowledgeGraph kg = testutil::movie_kg();
    std::vector<TriplePattern> patterns{
        make_pattern(kg, "?m", "director", "Tim_Burton"),
        make_pattern(kg, "?m", "starring", "?a"),
        make_pattern(kg, "?a", "type", "Actor"),
        make_pattern(kg, "?m", "type", "Film"),
    };
    auto results = match_pattern(kg, patterns);
    REQUIRE(results.size() == 2);  // (Batman, MK), (Beetlejuice, MK)
    for (const Binding& b : results) CHECK(kg.vertex_label(b.at("a").id) == "Michael_Keaton");
}

TEST_CASE("variables can bind edges") {
    KnowledgeGraph kg = testutil::movie_kg();
    auto results = match_pattern(kg, {make_pattern(kg, "Batman", "?e", "Michael_Keaton")});
    REQUIRE(results.size() == 1);
    CHECK(results[0].at("e").is_edge);
    CHECK(kg.edge_label(results[0].at("e").id) == "starring");
}

TEST_CASE("all-constant pattern acts as a boolean check") {
    KnowledgeGraph kg = testutil::movie_kg();
    CHECK(match_pattern(kg, {make_pattern(kg, "Batman", "director", "Tim_Burton")}).size() == 1);
    CHECK(match_pattern(kg, {make_pattern(kg, "Batman", "director", "Berlin")}).empty());
    CHECK_THROWS(make_pattern(kg, "Batman", "director", "nope"));
}

TEST_CASE("matcher agrees with the exhaustive oracle on random graphs") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 30; ++round) {
        KnowledgeGraph kg = testutil::random_kg(6, 2, 3, 10, rng);
        std::vector<TriplePattern> patterns;
        int np = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < np; ++i) {
            auto term = [&](bool edge_slot) {
                if (rng() % 2) {
                    return PatternTerm::variable(std::string(1, static_cast<char>('x' + rng() % 3)));
                }
                std::uint32_t limit = edge_slot ? static_cast<std::uint32_t>(kg.edge_count())
                                                : static_cast<std::uint32_t>(kg.vertex_count());
                return PatternTerm::constant(static_cast<std::uint32_t>(rng() % limit));
            };
            patterns.push_back({term(false), term(true), term(false)});
        }
        // variables shared between vertex and edge slots are degenerate; skip
        bool mixed = false;
        for (const auto& p : patterns) {
            for (const auto& q : patterns) {
                if (p.edge.is_variable &&
                    ((q.head.is_variable && q.head.var == p.edge.var) ||
                     (q.tail.is_variable && q.tail.var == p.edge.var)))
                    mixed = true;
            }
        }
        if (mixed) continue;
        CHECK(match_pattern(kg, patterns) == testutil::oracle_match(kg, patterns));
    }
}
