#include "gsq/querygen.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace gsq {

namespace {

std::uint64_t saturating_product(std::uint64_t a, std::uint64_t b) {
    if (b != 0 && a > std::numeric_limits<std::uint64_t>::max() / b)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

std::string variable_name(const std::string& phrase_text) {
    std::string name = phrase_text;
    for (char& c : name) {
        if (c == ' ') c = '_';
    }
    return name;
}

std::string render_term(const PatternTerm& t, const KnowledgeGraph& kg, bool edge_slot) {
    if (t.is_variable) return "?" + t.var;
    return edge_slot ? kg.edge_label(t.id) : kg.vertex_label(t.id);
}

std::string render_pattern(const TriplePattern& p, const KnowledgeGraph& kg) {
    return render_term(p.head, kg, false) + ' ' + render_term(p.edge, kg, true) + ' ' +
           render_term(p.tail, kg, false);
}

}  // namespace

SplitSets split_sets(const std::vector<CandidateSet>& sets) {
    SplitSets out;
    for (const CandidateSet& s : sets) {
        if (s.phrase.kind == PhraseKind::Relation) {
            out.edge_sets.push_back(s);
        } else {
            out.vertex_sets.push_back(s);
        }
    }
    return out;
}

std::uint64_t representation_count(const std::vector<CandidateSet>& vertex_sets,
                                   const std::vector<CandidateSet>& edge_sets) {
    std::uint64_t count = 1;
    for (const CandidateSet& s : vertex_sets) count = saturating_product(count, s.candidates.size());
    for (const CandidateSet& s : edge_sets) count = saturating_product(count, s.candidates.size());
    return count;
}

std::vector<QueryRepresentation> enumerate_representations(
    const std::vector<CandidateSet>& vertex_sets, const std::vector<CandidateSet>& edge_sets,
    const StructureMatrix& ms, std::uint64_t cap) {
    const std::size_t n = vertex_sets.size();
    const std::size_t m = edge_sets.size();
    if (ms.n != static_cast<int>(n) || ms.m != static_cast<int>(m))
        throw std::runtime_error("structure matrix does not match the candidate sets");
    for (const CandidateSet& s : vertex_sets) {
        if (s.candidates.empty()) throw std::runtime_error("empty vertex candidate set");
    }
    for (const CandidateSet& s : edge_sets) {
        if (s.candidates.empty()) throw std::runtime_error("empty edge candidate set");
    }
    const std::uint64_t count = representation_count(vertex_sets, edge_sets);
    if (count > cap) {
        throw std::runtime_error("representation count " + std::to_string(count) +
                                 " exceeds cap " + std::to_string(cap) +
                                 "; prune candidates more aggressively (lower t_s)");
    }

    // Cell (i,j) holding edge set k, per k.
    std::vector<std::pair<int, int>> placement(m, {-1, -1});
    for (int i = 0; i < ms.n; ++i) {
        for (int j = 0; j < ms.n; ++j) {
            if (ms.at(i, j) != 0) placement[ms.at(i, j) - 1] = {i, j};
        }
    }
    for (std::size_t k = 0; k < m; ++k) {
        if (placement[k].first < 0)
            throw std::runtime_error("edge set " + std::to_string(k + 1) + " is not placed");
    }

    std::vector<QueryRepresentation> reps;
    reps.reserve(count);
    QueryRepresentation rep;
    rep.vertex_choice.assign(n, 0);
    rep.edge_choice.assign(m, 0);
    while (true) {
        rep.triples.clear();
        rep.provenance.clear();
        for (std::size_t k = 0; k < m; ++k) {
            auto [i, j] = placement[k];
            rep.triples.push_back({vertex_sets[i].candidates[rep.vertex_choice[i]].id,
                                   edge_sets[k].candidates[rep.edge_choice[k]].id,
                                   vertex_sets[j].candidates[rep.vertex_choice[j]].id});
            rep.provenance.push_back({i, static_cast<int>(k), j});
        }
        reps.push_back(rep);

        // Odometer: edge choices vary fastest, last index first.
        std::size_t pos = m;
        while (pos > 0) {
            if (++rep.edge_choice[pos - 1] < edge_sets[pos - 1].candidates.size()) break;
            rep.edge_choice[pos - 1] = 0;
            --pos;
        }
        if (pos > 0) continue;
        pos = n;
        while (pos > 0) {
            if (++rep.vertex_choice[pos - 1] < vertex_sets[pos - 1].candidates.size()) break;
            rep.vertex_choice[pos - 1] = 0;
            --pos;
        }
        if (pos == 0) break;
    }
    return reps;
}

double score_representation(const QueryRepresentation& rep, const EmbeddingStore& store) {
    double score = 0.0;
    for (const Triple& t : rep.triples) {
        score += translate_score(store.vertex(t.head), store.edge(t.edge), store.vertex(t.tail));
    }
    return score;
}

void rank_representations(std::vector<QueryRepresentation>& reps, const EmbeddingStore& store) {
    std::vector<double> scores(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i) scores[i] = score_representation(reps[i], store);
    std::vector<std::size_t> order(reps.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] < scores[b];
        if (reps[a].vertex_choice != reps[b].vertex_choice)
            return reps[a].vertex_choice < reps[b].vertex_choice;
        return reps[a].edge_choice < reps[b].edge_choice;
    });
    std::vector<QueryRepresentation> sorted;
    sorted.reserve(reps.size());
    for (std::size_t i : order) sorted.push_back(std::move(reps[i]));
    reps = std::move(sorted);
}

GraphQuery to_graph_query(const QueryRepresentation& rep,
                          const std::vector<CandidateSet>& vertex_sets,
                          const KnowledgeGraph& kg) {
    const std::size_t n = vertex_sets.size();
    if (rep.vertex_choice.size() != n)
        throw std::runtime_error("representation does not match the vertex sets");

    // One variable per vertex set whose chosen candidate is a class vertex.
    std::vector<std::string> var_of(n);
    GraphQuery gq;
    for (std::size_t i = 0; i < n; ++i) {
        const Candidate& chosen = vertex_sets[i].candidates[rep.vertex_choice[i]];
        if (chosen.is_edge || kg.kind(chosen.id) != VertexKind::Class) continue;
        std::string name = variable_name(vertex_sets[i].phrase.text);
        for (std::size_t j = 0; j < i; ++j) {
            if (var_of[j] == name) {
                name += "_" + std::to_string(i + 1);
                break;
            }
        }
        var_of[i] = name;
        gq.type_constraints.emplace_back(name, chosen.id);
    }
    // Answer variable: the wh phrase's variable when present, else the first.
    for (std::size_t i = 0; i < n; ++i) {
        if (!var_of[i].empty() && vertex_sets[i].phrase.is_wh) {
            gq.answer_variable = var_of[i];
            break;
        }
    }
    if (gq.answer_variable.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!var_of[i].empty()) {
                gq.answer_variable = var_of[i];
                break;
            }
        }
    }
    if (gq.answer_variable.empty())
        throw std::runtime_error("fully grounded query: no class vertex to substitute");

    for (std::size_t k = 0; k < rep.triples.size(); ++k) {
        const auto& prov = rep.provenance[k];
        const Triple& t = rep.triples[k];
        TriplePattern p;
        p.head = var_of[prov[0]].empty() ? PatternTerm::constant(t.head)
                                         : PatternTerm::variable(var_of[prov[0]]);
        p.edge = PatternTerm::constant(t.edge);
        p.tail = var_of[prov[2]].empty() ? PatternTerm::constant(t.tail)
                                         : PatternTerm::variable(var_of[prov[2]]);
        gq.patterns.push_back(p);
    }
    return gq;
}

std::vector<TriplePattern> all_patterns(const GraphQuery& gq, const KnowledgeGraph& kg) {
    std::vector<TriplePattern> patterns = gq.patterns;
    for (const auto& [var, cls] : gq.type_constraints) {
        patterns.push_back({PatternTerm::variable(var), PatternTerm::constant(kg.type_edge()),
                            PatternTerm::constant(cls)});
    }
    return patterns;
}

namespace {

std::vector<VertexId> answer_bindings(const std::vector<Binding>& bindings,
                                      const std::string& var) {
    std::vector<VertexId> out;
    for (const Binding& b : bindings) {
        auto it = b.find(var);
        if (it != b.end() && !it->second.is_edge) out.push_back(it->second.id);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

ExecutionResult execute_with_fallback(const std::vector<QueryRepresentation>& ranked,
                                      const std::vector<CandidateSet>& vertex_sets,
                                      const KnowledgeGraph& kg, int retry_cap) {
    if (retry_cap < 1) throw std::runtime_error("retry cap must be >= 1");
    ExecutionResult result;
    const int attempts = std::min<std::size_t>(ranked.size(), retry_cap);
    for (int r = 0; r < attempts; ++r) {
        GraphQuery gq = to_graph_query(ranked[r], vertex_sets, kg);
        auto answers = answer_bindings(match_pattern(kg, all_patterns(gq, kg)),
                                       gq.answer_variable);
        result.trail.push_back("representation " + std::to_string(r + 1) + " full: " +
                               std::to_string(answers.size()) + " answers");
        if (!answers.empty()) {
            result.answers = std::move(answers);
            result.query = std::move(gq);
            result.stage = "full";
            result.success = true;
            return result;
        }
        if (!gq.type_constraints.empty()) {
            answers = answer_bindings(match_pattern(kg, gq.patterns), gq.answer_variable);
            result.trail.push_back("representation " + std::to_string(r + 1) + " relaxed: " +
                                   std::to_string(answers.size()) + " answers");
            if (!answers.empty()) {
                gq.type_constraints.clear();
                result.answers = std::move(answers);
                result.query = std::move(gq);
                result.stage = "relaxed";
                result.success = true;
                return result;
            }
        }
        result.query = std::move(gq);
    }
    result.stage = "exhausted";
    return result;
}

std::string serialize_query(const GraphQuery& gq, const KnowledgeGraph& kg) {
    std::vector<std::string> plain, typed;
    for (const TriplePattern& p : gq.patterns) plain.push_back(render_pattern(p, kg));
    const std::string type_label = kg.edge_label(kg.type_edge());
    for (const auto& [var, cls] : gq.type_constraints) {
        typed.push_back("?" + var + ' ' + type_label + ' ' + kg.vertex_label(cls));
    }
    std::sort(plain.begin(), plain.end());
    std::sort(typed.begin(), typed.end());
    std::string out;
    for (const std::string& line : plain) out += line + '\n';
    for (const std::string& line : typed) out += line + '\n';
    return out;
}

GraphQuery parse_query(const std::string& text, const KnowledgeGraph& kg) {
    GraphQuery gq;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string h, e, t, extra;
        if (!(ls >> h >> e >> t) || (ls >> extra))
            throw std::runtime_error("malformed query line: " + line);
        TriplePattern p = make_pattern(kg, h, e, t);
        const bool is_type = !p.edge.is_variable && p.edge.id == kg.type_edge() &&
                             p.head.is_variable && !p.tail.is_variable &&
                             kg.kind(p.tail.id) == VertexKind::Class;
        if (is_type) {
            gq.type_constraints.emplace_back(p.head.var, p.tail.id);
        } else {
            gq.patterns.push_back(p);
            if (gq.answer_variable.empty()) {
                if (p.head.is_variable) {
                    gq.answer_variable = p.head.var;
                } else if (p.tail.is_variable) {
                    gq.answer_variable = p.tail.var;
                }
            }
        }
    }
    return gq;
}

}  // namespace gsq
