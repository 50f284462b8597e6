#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gsq/glkg.hpp"
#include "gsq/kg.hpp"

namespace gsq {

using Vec = std::vector<double>;

// Squared translation residual ||h + e - t||^2. Throws on dimension mismatch.
double translate_score(const Vec& h, const Vec& e, const Vec& t);

class EmbeddingStore {
public:
    EmbeddingStore() = default;
    EmbeddingStore(int dim, std::size_t n_vertices, std::size_t n_edges)
        : dim_(dim), vertices_(n_vertices, Vec(dim, 0.0)), edges_(n_edges, Vec(dim, 0.0)) {}

    int dim() const { return dim_; }
    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    Vec& vertex(VertexId v) { return vertices_.at(v); }
    const Vec& vertex(VertexId v) const { return vertices_.at(v); }
    Vec& edge(EdgeId e) { return edges_.at(e); }
    const Vec& edge(EdgeId e) const { return edges_.at(e); }
    Vec& of(Owner o) { return o.is_edge() ? edge(o.id) : vertex(o.id); }
    const Vec& of(Owner o) const { return o.is_edge() ? edge(o.id) : vertex(o.id); }

    bool operator==(const EmbeddingStore&) const = default;

private:
    int dim_ = 0;
    std::vector<Vec> vertices_;
    std::vector<Vec> edges_;
};

struct TrainConfig {
    int dim = 100;
    double lambda_v = 0.5;
    double lambda_e = 0.5;
    int negatives = 5;
    double learning_rate = 0.01;
    int epochs = 100;
    std::uint64_t seed = 42;
    int workers = 1;  // 1 = deterministic serial; >1 = lock-free OpenMP updates

    void validate() const;  // throws on out-of-range values
};

// Attention weight exp(support / |L-KG|). The wrappers check the owner-kind
// preconditions for vertex and edge owners.
double attention(const GeneralizedTriple& g, const GeneralizedLocalKg& owner_glkg);
double attention_vertex(const KnowledgeGraph& kg, const GeneralizedLocalKg& g,
                        const GeneralizedTriple& t);
double attention_edge(const KnowledgeGraph& kg, const GeneralizedLocalKg& g,
                      const GeneralizedTriple& t);

// Attention-weighted negative mean of squared translation residuals with
// `candidate` substituted into the owner slot. f_vertex covers vertex GL-KGs,
// f_edge covers edge GL-KGs.
double f_vertex(const Vec& candidate, const GeneralizedLocalKg& g, const EmbeddingStore& store);
double f_edge(const Vec& candidate, const GeneralizedLocalKg& g, const EmbeddingStore& store);
double f_score(const Vec& candidate, const GeneralizedLocalKg& g, const EmbeddingStore& store);

struct GradientMap {
    std::unordered_map<std::uint32_t, Vec> vertex;
    std::unordered_map<std::uint32_t, Vec> edge;
    Vec& slot(Owner o, int dim);
};

// log[ sigma(f(owner)) * prod_neg sigma(-f(neg)) ] for one training example.
// When grads is non-null the analytic gradient with respect to every
// participating vector is accumulated into it.
double log_prob_example(const GeneralizedLocalKg& g, std::span<const std::uint32_t> negatives,
                        const EmbeddingStore& store, GradientMap* grads = nullptr);

class NegativeSampler {
public:
    NegativeSampler(const KnowledgeGraph& kg, const GlkgIndex& glkgs, std::uint64_t seed);

    // n negatives of the owner's kind with GL-KG context disjoint from the
    // owner's. Rejection sampling, capped at 100 attempts per draw.
    std::vector<std::uint32_t> sample(Owner owner, int n, std::mt19937_64& rng) const;
    std::vector<std::uint32_t> sample(Owner owner, int n);

    const std::vector<std::uint32_t>& trainable(Owner::Kind kind) const {
        return kind == Owner::Kind::Edge ? trainable_edges_ : trainable_vertices_;
    }
    bool disjoint(Owner a, Owner b) const;

private:
    std::vector<std::uint32_t> trainable_vertices_, trainable_edges_;
    std::vector<std::vector<std::uint64_t>> vertex_profiles_, edge_profiles_;
    std::mt19937_64 rng_;
};

// Convenience log_prob: samples n negatives internally.
double log_prob(Owner owner, const GlkgIndex& glkgs, NegativeSampler& sampler, int n,
                const EmbeddingStore& store);

struct TrainResult {
    EmbeddingStore store;
    std::vector<double> epoch_objective;  // joint objective per epoch (ascending is good)
};

TrainResult train(const KnowledgeGraph& kg, const GlkgIndex& glkgs, const TrainConfig& cfg);

// k same-kind ids ranked by ascending Euclidean distance, query excluded.
std::vector<std::pair<std::uint32_t, double>> nearest_neighbors(const EmbeddingStore& store,
                                                                Owner query, std::size_t k);

void save_embeddings(const EmbeddingStore& store, const KnowledgeGraph& kg,
                     const std::string& path);
EmbeddingStore load_embeddings(const KnowledgeGraph& kg, const std::string& path);

}  // namespace gsq
