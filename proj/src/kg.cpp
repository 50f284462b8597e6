#include "gsq/kg.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <stdexcept>

namespace gsq {

VertexId KnowledgeGraph::intern_vertex(const std::string& label) {
    auto it = vertex_ids_.find(label);
    if (it != vertex_ids_.end()) return it->second;
    VertexId id = static_cast<VertexId>(vertex_labels_.size());
    vertex_labels_.push_back(label);
    vertex_ids_.emplace(label, id);
    return id;
}

EdgeId KnowledgeGraph::intern_edge(const std::string& label) {
    auto it = edge_ids_.find(label);
    if (it != edge_ids_.end()) return it->second;
    EdgeId id = static_cast<EdgeId>(edge_labels_.size());
    edge_labels_.push_back(label);
    edge_ids_.emplace(label, id);
    return id;
}

void KnowledgeGraph::add_triple(const std::string& h, const std::string& e, const std::string& t) {
    triples_.push_back({intern_vertex(h), intern_edge(e), intern_vertex(t)});
}

KnowledgeGraph KnowledgeGraph::load(const std::string& path, const std::string& type_edge_label,
                                    const std::string& universal_class_label) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open triple file: " + path);
    KnowledgeGraph kg;
    kg.type_edge_ = kg.intern_edge(type_edge_label);
    kg.universal_class_ = kg.intern_vertex(universal_class_label);
    std::string line;
    std::size_t lineno = 0;
    std::size_t loaded = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto t1 = line.find('\t');
        auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        auto t3 = t2 == std::string::npos ? std::string::npos : line.find('\t', t2 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos || t3 != std::string::npos ||
            t1 == 0 || t2 == t1 + 1 || t2 + 1 == line.size()) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected head<TAB>edge<TAB>tail");
        }
        kg.add_triple(line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), line.substr(t2 + 1));
        ++loaded;
    }
    if (loaded == 0) throw std::runtime_error("triple file holds no triples: " + path);
    kg.finalize();
    return kg;
}

KnowledgeGraph KnowledgeGraph::from_triples(const std::vector<std::array<std::string, 3>>& rows,
                                            const std::string& type_edge_label,
                                            const std::string& universal_class_label) {
    if (rows.empty()) throw std::runtime_error("no triples given");
    KnowledgeGraph kg;
    kg.type_edge_ = kg.intern_edge(type_edge_label);
    kg.universal_class_ = kg.intern_vertex(universal_class_label);
    for (const auto& r : rows) kg.add_triple(r[0], r[1], r[2]);
    kg.finalize();
    return kg;
}

void KnowledgeGraph::finalize() {
    const std::size_t nv = vertex_labels_.size();
    const std::size_t ne = edge_labels_.size();
    kinds_.assign(nv, VertexKind::Entity);
    classes_of_.assign(nv, {});
    instances_of_.assign(nv, {});
    by_head_.assign(nv, {});
    by_tail_.assign(nv, {});
    by_edge_.assign(ne, {});

    kinds_[universal_class_] = VertexKind::Class;
    for (std::uint32_t i = 0; i < triples_.size(); ++i) {
        const Triple& t = triples_[i];
        by_head_[t.head].push_back(i);
        by_tail_[t.tail].push_back(i);
        by_edge_[t.edge].push_back(i);
        if (t.edge == type_edge_) kinds_[t.tail] = VertexKind::Class;
    }
    for (const Triple& t : triples_) {
        if (t.edge == type_edge_) classes_of_[t.head].push_back(t.tail);
    }
    for (VertexId v = 0; v < nv; ++v) {
        auto& cls = classes_of_[v];
        std::sort(cls.begin(), cls.end());
        cls.erase(std::unique(cls.begin(), cls.end()), cls.end());
        if (cls.empty() && kinds_[v] == VertexKind::Entity) cls.push_back(universal_class_);
        if (kinds_[v] == VertexKind::Entity) {
            for (VertexId c : cls) instances_of_[c].push_back(v);
        }
    }
}

std::optional<VertexId> KnowledgeGraph::find_vertex(const std::string& label) const {
    auto it = vertex_ids_.find(label);
    if (it == vertex_ids_.end()) return std::nullopt;
    return it->second;
}

std::optional<EdgeId> KnowledgeGraph::find_edge(const std::string& label) const {
    auto it = edge_ids_.find(label);
    if (it == edge_ids_.end()) return std::nullopt;
    return it->second;
}

VertexId KnowledgeGraph::require_vertex(const std::string& label) const {
    auto v = find_vertex(label);
    if (!v) throw std::runtime_error("unknown vertex: " + label);
    return *v;
}

EdgeId KnowledgeGraph::require_edge(const std::string& label) const {
    auto e = find_edge(label);
    if (!e) throw std::runtime_error("unknown edge: " + label);
    return *e;
}

LocalKg KnowledgeGraph::local_kg(Owner owner) const {
    LocalKg out{owner, {}};
    if (owner.is_edge()) {
        if (owner.id >= edge_count()) throw std::runtime_error("unknown edge id");
        if (owner.id == type_edge_) return out;
        for (std::uint32_t i : by_edge_[owner.id]) out.triples.push_back(triples_[i]);
    } else {
        if (owner.id >= vertex_count()) throw std::runtime_error("unknown vertex id");
        std::vector<std::uint32_t> idx;
        idx.insert(idx.end(), by_head_[owner.id].begin(), by_head_[owner.id].end());
        idx.insert(idx.end(), by_tail_[owner.id].begin(), by_tail_[owner.id].end());
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
        for (std::uint32_t i : idx) {
            if (triples_[i].edge != type_edge_) out.triples.push_back(triples_[i]);
        }
    }
    return out;
}

std::optional<int> KnowledgeGraph::hop_distance(Owner a, Owner b, int max_hops) const {
    if (max_hops < 0) throw std::runtime_error("max_hops must be >= 0");
    // Node space: [0, nv) vertices, [nv, nv + |triples|) triple nodes.
    const std::uint32_t nv = static_cast<std::uint32_t>(vertex_count());
    const std::uint32_t nn = nv + static_cast<std::uint32_t>(triples_.size());
    auto seeds = [&](Owner o) {
        std::vector<std::uint32_t> s;
        if (o.is_edge()) {
            if (o.id >= edge_count()) throw std::runtime_error("unknown edge id");
            for (std::uint32_t i : by_edge_[o.id]) s.push_back(nv + i);
        } else {
            if (o.id >= vertex_count()) throw std::runtime_error("unknown vertex id");
            s.push_back(o.id);
        }
        return s;
    };
    std::vector<std::uint32_t> start = seeds(a);
    std::vector<char> target(nn, 0);
    for (std::uint32_t s : seeds(b)) target[s] = 1;
    for (std::uint32_t s : start) {
        if (target[s]) return 0;
    }
    std::vector<int> dist(nn, -1);
    std::deque<std::uint32_t> q;
    for (std::uint32_t s : start) {
        dist[s] = 0;
        q.push_back(s);
    }
    while (!q.empty()) {
        std::uint32_t u = q.front();
        q.pop_front();
        if (dist[u] >= max_hops) continue;
        auto visit = [&](std::uint32_t w) -> std::optional<int> {
            if (dist[w] >= 0) return std::nullopt;
            dist[w] = dist[u] + 1;
            if (target[w]) return dist[w];
            q.push_back(w);
            return std::nullopt;
        };
        if (u < nv) {
            for (std::uint32_t i : by_head_[u]) {
                if (auto d = visit(nv + i)) return d;
            }
            for (std::uint32_t i : by_tail_[u]) {
                if (auto d = visit(nv + i)) return d;
            }
        } else {
            const Triple& t = triples_[u - nv];
            if (auto d = visit(t.head)) return d;
            if (auto d = visit(t.tail)) return d;
        }
    }
    return std::nullopt;
}

}  // namespace gsq
