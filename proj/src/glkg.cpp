#include "gsq/glkg.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>
#include <tuple>

namespace gsq {

namespace {

using Key = std::tuple<std::uint8_t, VertexId, EdgeId, VertexId>;  // (dir, head, edge, tail)

GeneralizedLocalKg from_counts(Owner owner, const std::map<Key, std::uint32_t>& counts,
                               std::uint32_t denominator) {
    GeneralizedLocalKg g{owner, {}, denominator};
    g.triples.reserve(counts.size());
    for (const auto& [k, support] : counts) {
        g.triples.push_back({std::get<1>(k), std::get<2>(k), std::get<3>(k),
                             static_cast<Direction>(std::get<0>(k)), support});
    }
    return g;
}

// Classes a neighbor generalizes to: a class vertex stands for itself.
const std::vector<VertexId>& neighbor_classes(const KnowledgeGraph& kg, VertexId v,
                                              std::vector<VertexId>& self_buf) {
    if (kg.kind(v) == VertexKind::Class) {
        self_buf.assign(1, v);
        return self_buf;
    }
    return kg.classes_of(v);
}

GeneralizedLocalKg generalize_entity(const KnowledgeGraph& kg, VertexId v) {
    LocalKg lkg = kg.local_kg(Owner::vertex(v));
    std::map<Key, std::uint32_t> counts;
    std::vector<VertexId> buf;
    for (const Triple& t : lkg.triples) {
        if (t.head == v) {
            for (VertexId c : neighbor_classes(kg, t.tail, buf)) {
                ++counts[{static_cast<std::uint8_t>(Direction::Out), v, t.edge, c}];
            }
        }
        if (t.tail == v && t.head != v) {
            for (VertexId c : neighbor_classes(kg, t.head, buf)) {
                ++counts[{static_cast<std::uint8_t>(Direction::In), c, t.edge, v}];
            }
        }
    }
    return from_counts(Owner::vertex(v), counts, static_cast<std::uint32_t>(lkg.triples.size()));
}

GeneralizedLocalKg generalize_class(const KnowledgeGraph& kg, VertexId vc) {
    std::map<Key, std::uint32_t> counts;
    std::uint32_t denom = 0;
    for (VertexId ve : kg.instances_of(vc)) {
        GeneralizedLocalKg inst = generalize_entity(kg, ve);
        denom += inst.denominator;
        for (const GeneralizedTriple& g : inst.triples) {
            VertexId h = g.head == ve && g.dir == Direction::Out ? vc : g.head;
            VertexId t = g.tail == ve && g.dir == Direction::In ? vc : g.tail;
            counts[{static_cast<std::uint8_t>(g.dir), h, g.edge, t}] += g.support;
        }
    }
    return from_counts(Owner::vertex(vc), counts, denom);
}

GeneralizedLocalKg generalize_edge(const KnowledgeGraph& kg, EdgeId e) {
    LocalKg lkg = kg.local_kg(Owner::edge(e));
    std::map<Key, std::uint32_t> counts;
    std::vector<VertexId> hbuf, tbuf;
    const auto dir = static_cast<std::uint8_t>(Direction::None);
    for (const Triple& t : lkg.triples) {
        const bool head_is_class = kg.kind(t.head) == VertexKind::Class;
        const bool tail_is_class = kg.kind(t.tail) == VertexKind::Class;
        const auto& hc = neighbor_classes(kg, t.head, hbuf);
        const auto& tc = neighbor_classes(kg, t.tail, tbuf);
        for (VertexId h : hc) {
            for (VertexId c : tc) ++counts[{dir, h, e, c}];
        }
        if (!head_is_class) {
            for (VertexId c : tc) ++counts[{dir, t.head, e, c}];
        }
        if (!tail_is_class) {
            for (VertexId h : hc) ++counts[{dir, h, e, t.tail}];
        }
    }
    return from_counts(Owner::edge(e), counts, static_cast<std::uint32_t>(lkg.triples.size()));
}

}  // namespace

GeneralizedLocalKg generalize(const KnowledgeGraph& kg, Owner owner) {
    if (owner.is_edge()) {
        if (owner.id >= kg.edge_count()) throw std::runtime_error("unknown edge id");
        return generalize_edge(kg, owner.id);
    }
    if (owner.id >= kg.vertex_count()) throw std::runtime_error("unknown vertex id");
    return kg.kind(owner.id) == VertexKind::Class ? generalize_class(kg, owner.id)
                                                  : generalize_entity(kg, owner.id);
}

GlkgIndex GlkgIndex::build(const KnowledgeGraph& kg) {
    GlkgIndex index;
    index.vertices.reserve(kg.vertex_count());
    index.edges.reserve(kg.edge_count());
    for (VertexId v = 0; v < kg.vertex_count(); ++v) {
        index.vertices.push_back(generalize(kg, Owner::vertex(v)));
    }
    for (EdgeId e = 0; e < kg.edge_count(); ++e) {
        index.edges.push_back(generalize(kg, Owner::edge(e)));
    }
    return index;
}

std::vector<std::uint64_t> context_profile(const GeneralizedLocalKg& g) {
    std::vector<std::uint64_t> out;
    out.reserve(g.triples.size());
    for (const GeneralizedTriple& t : g.triples) {
        std::uint64_t key;
        if (g.owner.is_edge()) {
            key = (static_cast<std::uint64_t>(t.head) << 32) | t.tail;
        } else {
            // Owner slot removed: keep (dir, edge, other end).
            VertexId other = t.dir == Direction::Out ? t.tail : t.head;
            key = (static_cast<std::uint64_t>(t.dir) << 62) |
                  (static_cast<std::uint64_t>(t.edge) << 32) | other;
        }
        out.push_back(key);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool profiles_disjoint(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return false;
        if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return true;
}

void save_glkg_cache(const GlkgIndex& index, const KnowledgeGraph& kg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write GL-KG cache: " + path);
    out << "# glkg-cache v1\n";
    auto dump = [&](const GeneralizedLocalKg& g, char tag, const std::string& label) {
        out << "O\t" << tag << '\t' << label << '\t' << g.denominator << '\n';
        for (const GeneralizedTriple& t : g.triples) {
            char d = t.dir == Direction::Out ? '>' : t.dir == Direction::In ? '<' : '-';
            out << "T\t" << kg.vertex_label(t.head) << '\t' << kg.edge_label(t.edge) << '\t'
                << kg.vertex_label(t.tail) << '\t' << d << '\t' << t.support << '\n';
        }
    };
    for (VertexId v = 0; v < index.vertices.size(); ++v) {
        dump(index.vertices[v], 'V', kg.vertex_label(v));
    }
    for (EdgeId e = 0; e < index.edges.size(); ++e) {
        dump(index.edges[e], 'E', kg.edge_label(e));
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

GlkgIndex load_glkg_cache(const KnowledgeGraph& kg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open GL-KG cache: " + path);
    std::string header;
    if (!std::getline(in, header) || header != "# glkg-cache v1") {
        throw std::runtime_error("bad GL-KG cache header: " + path);
    }
    GlkgIndex index;
    index.vertices.resize(kg.vertex_count());
    index.edges.resize(kg.edge_count());
    for (VertexId v = 0; v < kg.vertex_count(); ++v) index.vertices[v].owner = Owner::vertex(v);
    for (EdgeId e = 0; e < kg.edge_count(); ++e) index.edges[e].owner = Owner::edge(e);

    GeneralizedLocalKg* current = nullptr;
    std::string line;
    std::size_t lineno = 1;
    auto fields = [&](const std::string& s) {
        std::vector<std::string> f;
        std::size_t pos = 0;
        while (true) {
            auto tab = s.find('\t', pos);
            f.push_back(s.substr(pos, tab - pos));
            if (tab == std::string::npos) break;
            pos = tab + 1;
        }
        return f;
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto f = fields(line);
        if (f[0] == "O" && f.size() == 4) {
            Owner o = f[1] == "E" ? Owner::edge(kg.require_edge(f[2]))
                                  : Owner::vertex(kg.require_vertex(f[2]));
            current = o.is_edge() ? &index.edges[o.id] : &index.vertices[o.id];
            current->denominator = static_cast<std::uint32_t>(std::stoul(f[3]));
        } else if (f[0] == "T" && f.size() == 6 && current) {
            Direction d = f[4] == ">"   ? Direction::Out
                          : f[4] == "<" ? Direction::In
                                        : Direction::None;
            current->triples.push_back({kg.require_vertex(f[1]), kg.require_edge(f[2]),
                                        kg.require_vertex(f[3]), d,
                                        static_cast<std::uint32_t>(std::stoul(f[5]))});
        } else {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad cache line");
        }
    }
    return index;
}

}  // namespace gsq
