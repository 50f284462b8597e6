#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace gsq {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

enum class VertexKind { Entity, Class };

struct Triple {
    VertexId head;
    EdgeId edge;
    VertexId tail;
    bool operator==(const Triple&) const = default;
};

// Handle to either a vertex or an edge, for operations that accept both.
struct Owner {
    enum class Kind : std::uint8_t { Vertex, Edge };
    Kind kind;
    std::uint32_t id;
    static Owner vertex(VertexId v) { return {Kind::Vertex, v}; }
    static Owner edge(EdgeId e) { return {Kind::Edge, e}; }
    bool is_edge() const { return kind == Kind::Edge; }
    bool operator==(const Owner&) const = default;
};

struct LocalKg {
    Owner owner;
    std::vector<Triple> triples;  // type-edge triples excluded
};

// Immutable interned triple set with vertex-kind classification.
// All accessors are safe for concurrent readers once loading is done.
class KnowledgeGraph {
public:
    static KnowledgeGraph load(const std::string& path,
                               const std::string& type_edge_label = "type",
                               const std::string& universal_class_label = "Thing");
    static KnowledgeGraph from_triples(const std::vector<std::array<std::string, 3>>& rows,
                                       const std::string& type_edge_label = "type",
                                       const std::string& universal_class_label = "Thing");

    std::size_t vertex_count() const { return vertex_labels_.size(); }
    std::size_t edge_count() const { return edge_labels_.size(); }
    const std::vector<Triple>& triples() const { return triples_; }

    const std::string& vertex_label(VertexId v) const { return vertex_labels_.at(v); }
    const std::string& edge_label(EdgeId e) const { return edge_labels_.at(e); }
    const std::string& owner_label(Owner o) const {
        return o.is_edge() ? edge_label(o.id) : vertex_label(o.id);
    }
    std::optional<VertexId> find_vertex(const std::string& label) const;
    std::optional<EdgeId> find_edge(const std::string& label) const;
    VertexId require_vertex(const std::string& label) const;  // throws on unknown label
    EdgeId require_edge(const std::string& label) const;

    VertexKind kind(VertexId v) const { return kinds_.at(v); }
    // Declared classes of v; for entities this falls back to the universal class.
    const std::vector<VertexId>& classes_of(VertexId v) const { return classes_of_.at(v); }
    // Entity vertices typed with class c.
    const std::vector<VertexId>& instances_of(VertexId c) const { return instances_of_.at(c); }
    EdgeId type_edge() const { return type_edge_; }
    VertexId universal_class() const { return universal_class_; }

    const std::vector<std::uint32_t>& triples_by_head(VertexId v) const { return by_head_.at(v); }
    const std::vector<std::uint32_t>& triples_by_tail(VertexId v) const { return by_tail_.at(v); }
    const std::vector<std::uint32_t>& triples_by_edge(EdgeId e) const { return by_edge_.at(e); }

    LocalKg local_kg(Owner owner) const;

    // Shortest distance in the subdivision graph (one intermediate node per
    // triple). Edge objects are measured from all their triple nodes.
    // Returns nullopt when the distance exceeds max_hops.
    std::optional<int> hop_distance(Owner a, Owner b, int max_hops) const;

private:
    VertexId intern_vertex(const std::string& label);
    EdgeId intern_edge(const std::string& label);
    void add_triple(const std::string& h, const std::string& e, const std::string& t);
    void finalize();

    std::vector<std::string> vertex_labels_;
    std::vector<std::string> edge_labels_;
    std::unordered_map<std::string, VertexId> vertex_ids_;
    std::unordered_map<std::string, EdgeId> edge_ids_;
    std::vector<Triple> triples_;
    std::vector<VertexKind> kinds_;
    std::vector<std::vector<VertexId>> classes_of_;
    std::vector<std::vector<VertexId>> instances_of_;
    std::vector<std::vector<std::uint32_t>> by_head_, by_tail_, by_edge_;
    EdgeId type_edge_ = 0;
    VertexId universal_class_ = 0;
};

}  // namespace gsq
