#include "gsq/phrase.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gsq {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::size_t count_tokens(const std::string& surface) {
    return tokenize(surface).size();
}

std::string join_tokens(const std::vector<std::string>& tokens, std::size_t begin,
                        std::size_t end) {
    std::string s;
    for (std::size_t i = begin; i < end; ++i) {
        if (i > begin) s += ' ';
        s += tokens[i];
    }
    return s;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) || ch == '_' || ch == '\'') {
            cur += static_cast<char>(std::tolower(c));
        } else if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

void Lexicon::add(const std::string& surface, const LexiconEntry& entry) {
    std::string key = lower(surface);
    entries_[key].push_back(entry);
    max_surface_tokens_ = std::max(max_surface_tokens_, count_tokens(key));
}

void Lexicon::add_wh(const std::string& surface, const LexiconEntry& entry,
                     const KnowledgeGraph& kg) {
    if (entry.is_edge || kg.kind(entry.id) != VertexKind::Class)
        throw std::runtime_error("wh-word target must be a class vertex: " + entry.label);
    std::string key = lower(surface);
    wh_[key].push_back(entry);
    max_surface_tokens_ = std::max(max_surface_tokens_, count_tokens(key));
}

const std::vector<LexiconEntry>* Lexicon::find(const std::string& surface) const {
    auto it = entries_.find(surface);
    return it == entries_.end() ? nullptr : &it->second;
}

const std::vector<LexiconEntry>* Lexicon::find_wh(const std::string& surface) const {
    auto it = wh_.find(surface);
    return it == wh_.end() ? nullptr : &it->second;
}

Lexicon Lexicon::load(const std::string& path, const KnowledgeGraph& kg) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lexicon file: " + path);
    Lexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> f;
        std::size_t pos = 0;
        while (true) {
            auto tab = line.find('\t', pos);
            f.push_back(line.substr(pos, tab - pos));
            if (tab == std::string::npos) break;
            pos = tab + 1;
        }
        if (f.size() != 4) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected surface<TAB>kind<TAB>label<TAB>similarity");
        }
        double sim = std::stod(f[3]);
        if (sim <= 0.0 || sim > 1.0) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": base_similarity must be in (0,1]");
        }
        if (f[1] == "vertex") {
            lex.add(f[0], {kg.require_vertex(f[2]), false, f[2], sim});
        } else if (f[1] == "edge") {
            lex.add(f[0], {kg.require_edge(f[2]), true, f[2], sim});
        } else if (f[1] == "wh") {
            lex.add_wh(f[0], {kg.require_vertex(f[2]), false, f[2], sim}, kg);
        } else {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": kind must be vertex, edge, or wh");
        }
    }
    return lex;
}

std::vector<PhraseMatch> extract_phrases(const std::string& nlq, const Lexicon& lexicon) {
    const std::vector<std::string> tokens = tokenize(nlq);
    std::vector<PhraseMatch> phrases;
    std::size_t i = 0;
    while (i < tokens.size()) {
        bool matched = false;
        std::size_t longest = std::min(lexicon.max_surface_tokens(), tokens.size() - i);
        for (std::size_t len = longest; len >= 1 && !matched; --len) {
            const std::string surface = join_tokens(tokens, i, i + len);
            if (lexicon.find_wh(surface)) {
                phrases.push_back({surface, PhraseKind::Entity, i, i + len, true});
                matched = true;
            } else if (const auto* entries = lexicon.find(surface)) {
                // Kind tags in the lexicon are authoritative; the strongest
                // entry decides whether this is an entity or relation phrase.
                const auto& best = *std::max_element(
                    entries->begin(), entries->end(), [](const auto& a, const auto& b) {
                        if (a.base_similarity != b.base_similarity)
                            return a.base_similarity < b.base_similarity;
                        return a.is_edge && !b.is_edge;
                    });
                phrases.push_back({surface, best.is_edge ? PhraseKind::Relation : PhraseKind::Entity,
                                   i, i + len, false});
                matched = true;
            }
            if (matched) i += len;
        }
        if (!matched) ++i;
    }
    if (phrases.empty()) throw UnmappableQuestion("unmappable question: " + nlq);
    return phrases;
}

CandidateSet retrieve_candidates(const PhraseMatch& phrase, const Lexicon& lexicon,
                                 const KnowledgeGraph& kg) {
    (void)kg;
    CandidateSet set{phrase, {}, false};
    const std::vector<LexiconEntry>* entries =
        phrase.is_wh ? lexicon.find_wh(phrase.text) : lexicon.find(phrase.text);
    if (!entries) throw UnmappableQuestion("no lexicon entries for phrase: " + phrase.text);
    const bool want_edge = phrase.kind == PhraseKind::Relation;
    for (const LexiconEntry& e : *entries) {
        if (e.is_edge != want_edge) continue;  // kind-based deletion
        set.candidates.push_back({e.id, e.is_edge, e.label, e.base_similarity, e.base_similarity});
    }
    if (set.candidates.empty()) {
        throw UnmappableQuestion("no " + std::string(want_edge ? "edge" : "vertex") +
                                 " candidates for phrase: " + phrase.text);
    }
    std::sort(set.candidates.begin(), set.candidates.end(), [](const auto& a, const auto& b) {
        if (a.base_similarity != b.base_similarity) return a.base_similarity > b.base_similarity;
        return a.label < b.label;
    });
    return set;
}

std::vector<std::vector<ConnectionFeature>> connection_features(
    const std::vector<CandidateSet>& sets, const KnowledgeGraph& kg, int max_hops) {
    if (sets.size() < 2) throw std::runtime_error("connection features need >= 2 candidate sets");
    std::vector<std::vector<ConnectionFeature>> features(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) {
        features[i].resize(sets[i].candidates.size());
        for (std::size_t c = 0; c < sets[i].candidates.size(); ++c) {
            const Candidate& cand = sets[i].candidates[c];
            Owner a = cand.is_edge ? Owner::edge(cand.id) : Owner::vertex(cand.id);
            int reached = 0;
            double total = 0.0;
            for (std::size_t j = 0; j < sets.size(); ++j) {
                if (j == i) continue;
                for (const Candidate& other : sets[j].candidates) {
                    Owner b = other.is_edge ? Owner::edge(other.id) : Owner::vertex(other.id);
                    if (auto d = kg.hop_distance(a, b, max_hops)) {
                        ++reached;
                        total += *d;
                    }
                }
            }
            features[i][c].connection_count = reached;
            features[i][c].hop_count = reached > 0 ? total / reached : max_hops + 1.0;
        }
    }
    return features;
}

std::vector<CandidateSet> disambiguate(const std::vector<CandidateSet>& sets,
                                       const std::vector<std::vector<ConnectionFeature>>& features,
                                       const ScoreWeights& weights, double t_s) {
    if (t_s < 1.0) throw std::runtime_error("t_s must be >= 1");
    if (features.size() != sets.size()) throw std::runtime_error("features/sets size mismatch");
    std::vector<CandidateSet> out = sets;
    for (std::size_t i = 0; i < out.size(); ++i) {
        CandidateSet& set = out[i];
        const auto& feats = features[i];
        double max_conn = 0.0;
        for (const auto& f : feats) max_conn = std::max(max_conn, f.connection_count);
        double top = 0.0;
        for (std::size_t c = 0; c < set.candidates.size(); ++c) {
            double conn_norm = max_conn > 0.0 ? feats[c].connection_count / max_conn : 0.0;
            double p = weights.sim * set.candidates[c].base_similarity +
                       weights.conn * conn_norm + weights.hop / (1.0 + feats[c].hop_count);
            set.candidates[c].score = p;
            top = std::max(top, p);
        }
        if (top <= 0.0) throw std::runtime_error("degenerate candidate scores");
        for (Candidate& c : set.candidates) c.score /= top;
        std::sort(set.candidates.begin(), set.candidates.end(), [](const auto& a, const auto& b) {
            if (a.score != b.score) return a.score > b.score;
            if (a.base_similarity != b.base_similarity) return a.base_similarity > b.base_similarity;
            return a.label < b.label;
        });
        const double threshold = set.candidates.front().score / t_s;
        std::erase_if(set.candidates, [&](const Candidate& c) { return c.score < threshold; });
        if (set.candidates.empty()) throw std::logic_error("pruning removed every candidate");
        set.pruned = true;
    }
    return out;
}

}  // namespace gsq
