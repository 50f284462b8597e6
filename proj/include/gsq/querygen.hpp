#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gsq/embedding.hpp"
#include "gsq/pattern.hpp"
#include "gsq/phrase.hpp"
#include "gsq/structure.hpp"

namespace gsq {

// One concrete choice of candidate per vertex/edge set, arranged per the
// structure matrix.
struct QueryRepresentation {
    std::vector<std::size_t> vertex_choice;  // candidate index per vertex set
    std::vector<std::size_t> edge_choice;    // candidate index per edge set
    std::vector<Triple> triples;             // concrete triple per edge set, k = 1..m order
    // provenance[k-1] = {head vertex-set index, edge-set index, tail vertex-set index}
    std::vector<std::array<int, 3>> provenance;
};

struct GraphQuery {
    std::vector<TriplePattern> patterns;  // non-type patterns
    std::vector<std::pair<std::string, VertexId>> type_constraints;  // variable -> class
    std::string answer_variable;  // without the leading '?'
};

// Candidate sets partitioned by phrase kind, original order preserved.
struct SplitSets {
    std::vector<CandidateSet> vertex_sets;
    std::vector<CandidateSet> edge_sets;
};
SplitSets split_sets(const std::vector<CandidateSet>& sets);

std::uint64_t representation_count(const std::vector<CandidateSet>& vertex_sets,
                                   const std::vector<CandidateSet>& edge_sets);

// Full cartesian product in lexicographic (vertex_choice, edge_choice) order.
// Throws when the count exceeds `cap`.
std::vector<QueryRepresentation> enumerate_representations(
    const std::vector<CandidateSet>& vertex_sets, const std::vector<CandidateSet>& edge_sets,
    const StructureMatrix& ms, std::uint64_t cap = 1000000);

double score_representation(const QueryRepresentation& rep, const EmbeddingStore& store);

// Stable ascending order by (score, vertex_choice, edge_choice).
void rank_representations(std::vector<QueryRepresentation>& reps, const EmbeddingStore& store);

// Class-vertex choices become variables named after their phrase, constrained
// by (variable, type, class); entity choices stay constants. Answer variable
// is the wh-phrase's variable when present, else the first variable.
GraphQuery to_graph_query(const QueryRepresentation& rep,
                          const std::vector<CandidateSet>& vertex_sets,
                          const KnowledgeGraph& kg);

// Patterns plus type constraints rendered as type-edge patterns.
std::vector<TriplePattern> all_patterns(const GraphQuery& gq, const KnowledgeGraph& kg);

struct ExecutionResult {
    std::vector<VertexId> answers;  // bindings of the answer variable, sorted unique
    GraphQuery query;               // query of the successful (or last) attempt
    std::string stage;              // "full" or "relaxed"
    std::vector<std::string> trail; // one line per attempt
    bool success = false;
};

// Walks the ranked representations: full query, then the same query with all
// type constraints dropped, then the next representation; at most `retry_cap`
// representations are tried.
ExecutionResult execute_with_fallback(const std::vector<QueryRepresentation>& ranked,
                                      const std::vector<CandidateSet>& vertex_sets,
                                      const KnowledgeGraph& kg, int retry_cap = 5);

// One pattern per line `head edge tail`, variables '?'-prefixed; non-type
// patterns first, then type patterns, each block sorted lexicographically.
std::string serialize_query(const GraphQuery& gq, const KnowledgeGraph& kg);
GraphQuery parse_query(const std::string& text, const KnowledgeGraph& kg);

}  // namespace gsq
