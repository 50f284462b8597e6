#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gsq/kg.hpp"

namespace gsq {

// Direction of the raw triples behind a generalized triple, relative to the
// owning vertex. Edge owners carry no direction.
enum class Direction : std::uint8_t { Out, In, None };

struct GeneralizedTriple {
    VertexId head;
    EdgeId edge;
    VertexId tail;
    Direction dir;
    std::uint32_t support;
    bool operator==(const GeneralizedTriple&) const = default;
};

struct GeneralizedLocalKg {
    Owner owner;
    std::vector<GeneralizedTriple> triples;  // sorted by (dir, head, edge, tail)
    std::uint32_t denominator = 0;           // |L-KG| behind the generalization
    bool empty() const { return triples.empty(); }
};

GeneralizedLocalKg generalize(const KnowledgeGraph& kg, Owner owner);

struct GlkgIndex {
    std::vector<GeneralizedLocalKg> vertices;  // indexed by VertexId
    std::vector<GeneralizedLocalKg> edges;     // indexed by EdgeId

    const GeneralizedLocalKg& of(Owner o) const {
        return o.is_edge() ? edges.at(o.id) : vertices.at(o.id);
    }
    static GlkgIndex build(const KnowledgeGraph& kg);
};

// Owner-substituted context fingerprint. Two owners whose profiles intersect
// share generalized context and must not be negatives of each other.
std::vector<std::uint64_t> context_profile(const GeneralizedLocalKg& g);
bool profiles_disjoint(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

void save_glkg_cache(const GlkgIndex& index, const KnowledgeGraph& kg, const std::string& path);
GlkgIndex load_glkg_cache(const KnowledgeGraph& kg, const std::string& path);

}  // namespace gsq
