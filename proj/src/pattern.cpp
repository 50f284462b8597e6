#include "gsq/pattern.hpp"

#include <algorithm>
#include <stdexcept>

namespace gsq {

namespace {

struct Matcher {
    const KnowledgeGraph& kg;
    const std::vector<TriplePattern>& patterns;
    Binding binding;
    std::vector<Binding> results;

    bool resolved(const PatternTerm& term, bool edge_slot, std::uint32_t& out) const {
        if (!term.is_variable) {
            out = term.id;
            return true;
        }
        auto it = binding.find(term.var);
        if (it == binding.end()) return false;
        if (it->second.is_edge != edge_slot) {
            throw std::runtime_error("variable ?" + term.var + " used in both vertex and edge slots");
        }
        out = it->second.id;
        return true;
    }

    // Binds term to value; returns false on conflict, true otherwise.
    // Newly bound names are appended to `added`.
    bool bind(const PatternTerm& term, bool edge_slot, std::uint32_t value,
              std::vector<std::string>& added) {
        std::uint32_t existing;
        if (resolved(term, edge_slot, existing)) return existing == value;
        binding[term.var] = {edge_slot, value};
        added.push_back(term.var);
        return true;
    }

    void recurse(std::size_t pi) {
        if (pi == patterns.size()) {
            results.push_back(binding);
            return;
        }
        const TriplePattern& p = patterns[pi];
        std::uint32_t h, e, t;
        const bool hb = resolved(p.head, false, h);
        const bool eb = resolved(p.edge, true, e);
        const bool tb = resolved(p.tail, false, t);

        const std::vector<std::uint32_t>* index = nullptr;
        if (hb) {
            index = &kg.triples_by_head(h);
        } else if (tb) {
            index = &kg.triples_by_tail(t);
        } else if (eb) {
            index = &kg.triples_by_edge(e);
        }
        auto try_triple = [&](const Triple& tr) {
            std::vector<std::string> added;
            if (bind(p.head, false, tr.head, added) && bind(p.edge, true, tr.edge, added) &&
                bind(p.tail, false, tr.tail, added)) {
                recurse(pi + 1);
            }
            for (const auto& name : added) binding.erase(name);
        };
        if (index) {
            for (std::uint32_t i : *index) try_triple(kg.triples()[i]);
        } else {
            for (const Triple& tr : kg.triples()) try_triple(tr);
        }
    }
};

}  // namespace

std::vector<Binding> match_pattern(const KnowledgeGraph& kg,
                                   const std::vector<TriplePattern>& patterns) {
    for (const TriplePattern& p : patterns) {
        if (!p.head.is_variable && p.head.id >= kg.vertex_count())
            throw std::runtime_error("pattern references unknown vertex");
        if (!p.tail.is_variable && p.tail.id >= kg.vertex_count())
            throw std::runtime_error("pattern references unknown vertex");
        if (!p.edge.is_variable && p.edge.id >= kg.edge_count())
            throw std::runtime_error("pattern references unknown edge");
    }
    Matcher m{kg, patterns, {}, {}};
    m.recurse(0);
    std::sort(m.results.begin(), m.results.end());
    m.results.erase(std::unique(m.results.begin(), m.results.end()), m.results.end());
    return m.results;
}

TriplePattern make_pattern(const KnowledgeGraph& kg, const std::string& head,
                           const std::string& edge, const std::string& tail) {
    auto term = [&](const std::string& s, bool edge_slot) {
        if (!s.empty() && s[0] == '?') return PatternTerm::variable(s.substr(1));
        return PatternTerm::constant(edge_slot ? kg.require_edge(s) : kg.require_vertex(s));
    };
    return {term(head, false), term(edge, true), term(tail, false)};
}

}  // namespace gsq
