#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>

#include "doctest.h"
#include "gsq/kg.hpp"
#include "testutil.hpp"

using namespace gsq;

TEST_CASE("fixture graph loads with interned labels and indices") {
    KnowledgeGraph kg = testutil::movie_kg();
    CHECK(kg.triples().size() == 17);
    CHECK(kg.find_vertex("Batman").has_value());
    CHECK(kg.find_edge("starring").has_value());
    CHECK(!kg.find_vertex("nope").has_value());
    CHECK_THROWS(kg.require_vertex("nope"));
    VertexId batman = kg.require_vertex("Batman");
    CHECK(kg.vertex_label(batman) == "Batman");
    CHECK(kg.triples_by_head(batman).size() == 3);
    CHECK(kg.triples_by_edge(kg.require_edge("director")).size() == 2);
}

TEST_CASE("vertex kinds come from type-edge triples") {
    KnowledgeGraph kg = testutil::movie_kg();
    CHECK(kg.kind(kg.require_vertex("Batman")) == VertexKind::Entity);
    CHECK(kg.kind(kg.require_vertex("Film")) == VertexKind::Class);
    CHECK(kg.kind(kg.require_vertex("Person")) == VertexKind::Class);

    auto classes = kg.classes_of(kg.require_vertex("Klaus_Wowereit"));
    REQUIRE(classes.size() == 2);
    CHECK(kg.vertex_label(classes[0]) == "Person");  // id order, Person interned first
    CHECK(kg.vertex_label(classes[1]) == "Agent");

    auto instances = kg.instances_of(kg.require_vertex("Film"));
    CHECK(instances.size() == 3);
}

TEST_CASE("untyped entities fall back to the universal class") {
    auto kg = KnowledgeGraph::from_triples({{"a", "knows", "b"}, {"b", "type", "C"}});
    VertexId a = kg.require_vertex("a");
    REQUIRE(kg.classes_of(a).size() == 1);
    CHECK(kg.classes_of(a)[0] == kg.universal_class());
    CHECK(kg.kind(kg.universal_class()) == VertexKind::Class);
}

TEST_CASE("local KGs exclude type-edge triples") {
    KnowledgeGraph kg = testutil::movie_kg();
    LocalKg batman = kg.local_kg(Owner::vertex(kg.require_vertex("Batman")));
    CHECK(batman.triples.size() == 2);  // director + starring, not type
    LocalKg tb = kg.local_kg(Owner::vertex(kg.require_vertex("Tim_Burton")));
    CHECK(tb.triples.size() == 2);  // incoming director triples only
    LocalKg type_edge = kg.local_kg(Owner::edge(kg.type_edge()));
    CHECK(type_edge.triples.empty());
    LocalKg director = kg.local_kg(Owner::edge(kg.require_edge("director")));
    CHECK(director.triples.size() == 2);
}

TEST_CASE("hop distance walks the subdivision graph") {
    KnowledgeGraph kg = testutil::movie_kg();
    auto v = [&](const char* l) { return Owner::vertex(kg.require_vertex(l)); };
    CHECK(kg.hop_distance(v("Batman"), v("Batman"), 5) == 0);
    CHECK(kg.hop_distance(v("Batman"), v("Tim_Burton"), 5) == 2);
    CHECK(kg.hop_distance(v("Michael_Keaton"), v("Tim_Burton"), 5) == 4);
    CHECK(kg.hop_distance(v("Batman"), v("Film"), 5) == 2);  // type triples count here
    CHECK(!kg.hop_distance(v("Batman"), v("Berlin"), 6).has_value());
    // edge owners start from their triple nodes
    Owner director = Owner::edge(kg.require_edge("director"));
    CHECK(kg.hop_distance(director, v("Tim_Burton"), 5) == 1);
    CHECK(kg.hop_distance(director, v("Michael_Keaton"), 5) == 3);
    // cutoff
    CHECK(!kg.hop_distance(v("Michael_Keaton"), v("Tim_Burton"), 3).has_value());
}

TEST_CASE("malformed files are rejected with line numbers") {
    auto path = testutil::fixture("build_tmp_bad_kg.tsv");
    {
        std::ofstream out(path);
        out << "a\tb\n";
    }
    CHECK_THROWS_WITH_AS(KnowledgeGraph::load(path), doctest::Contains(":1"),
                         std::runtime_error);
    std::remove(path.c_str());
    CHECK_THROWS(KnowledgeGraph::load(testutil::fixture("does_not_exist.tsv")));
    CHECK_THROWS(KnowledgeGraph::from_triples({}));
}
