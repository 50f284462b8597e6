#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsq/kg.hpp"

namespace gsq {

// Raised when a question cannot be mapped onto the lexicon (CLI exit code 2).
struct UnmappableQuestion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PhraseKind { Entity, Relation };

struct PhraseMatch {
    std::string text;       // lowercase surface form
    PhraseKind kind;
    std::size_t begin = 0;  // token offsets, [begin, end)
    std::size_t end = 0;
    bool is_wh = false;
};

struct Candidate {
    std::uint32_t id;
    bool is_edge;
    std::string label;
    double base_similarity;
    double score;  // base_similarity until disambiguation rescores
};

struct CandidateSet {
    PhraseMatch phrase;
    std::vector<Candidate> candidates;  // scores descending
    bool pruned = false;
};

struct LexiconEntry {
    std::uint32_t id;
    bool is_edge;
    std::string label;
    double base_similarity;
};

class Lexicon {
public:
    // TSV: surface<TAB>kind<TAB>candidate_label<TAB>base_similarity, kind in
    // {vertex, edge, wh}. Wh-word targets must be class vertices.
    static Lexicon load(const std::string& path, const KnowledgeGraph& kg);

    void add(const std::string& surface, const LexiconEntry& entry);
    void add_wh(const std::string& surface, const LexiconEntry& entry, const KnowledgeGraph& kg);

    const std::vector<LexiconEntry>* find(const std::string& surface) const;
    const std::vector<LexiconEntry>* find_wh(const std::string& surface) const;
    std::size_t max_surface_tokens() const { return max_surface_tokens_; }

private:
    std::map<std::string, std::vector<LexiconEntry>> entries_;
    std::map<std::string, std::vector<LexiconEntry>> wh_;
    std::size_t max_surface_tokens_ = 0;
};

std::vector<std::string> tokenize(const std::string& text);

// Greedy longest-match over the lowercase tokenized question; wh-words come
// out as entity phrases. Throws UnmappableQuestion when nothing matches.
std::vector<PhraseMatch> extract_phrases(const std::string& nlq, const Lexicon& lexicon);

CandidateSet retrieve_candidates(const PhraseMatch& phrase, const Lexicon& lexicon,
                                 const KnowledgeGraph& kg);

struct ConnectionFeature {
    double connection_count = 0.0;
    double hop_count = 0.0;
};

// features[i][c] describes candidate c of set i against all other sets.
std::vector<std::vector<ConnectionFeature>> connection_features(
    const std::vector<CandidateSet>& sets, const KnowledgeGraph& kg, int max_hops);

struct ScoreWeights {
    double sim = 0.4;
    double conn = 0.4;
    double hop = 0.2;
};

// Rescores with the linear model, normalizes per phrase to (0,1], resorts and
// prunes candidates scoring below top/t_s.
std::vector<CandidateSet> disambiguate(const std::vector<CandidateSet>& sets,
                                       const std::vector<std::vector<ConnectionFeature>>& features,
                                       const ScoreWeights& weights, double t_s);

}  // namespace gsq
