#include "gsq/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gsq {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_dim(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::runtime_error("embedding dimension mismatch");
}

void normalize(Vec& v) {
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    if (n > 0.0) {
        for (double& x : v) x /= n;
    }
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a * 0x9e3779b97f4a7c15ULL + b;
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return x;
}

}  // namespace

double translate_score(const Vec& h, const Vec& e, const Vec& t) {
    check_dim(h, e);
    check_dim(h, t);
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        double d = h[i] + e[i] - t[i];
        s += d * d;
    }
    return s;
}

void TrainConfig::validate() const {
    if (dim < 2) throw std::runtime_error("dim must be >= 2");
    if (lambda_v < 0 || lambda_e < 0 || (lambda_v == 0 && lambda_e == 0))
        throw std::runtime_error("lambda_v/lambda_e must be >= 0 and not both 0");
    if (negatives < 1) throw std::runtime_error("negatives must be >= 1");
    if (learning_rate <= 0) throw std::runtime_error("learning rate must be > 0");
    if (epochs < 0) throw std::runtime_error("epochs must be >= 0");
    if (workers < 1) throw std::runtime_error("workers must be >= 1");
}

double attention(const GeneralizedTriple& g, const GeneralizedLocalKg& owner_glkg) {
    if (owner_glkg.denominator == 0) throw std::runtime_error("attention over empty L-KG");
    return std::exp(static_cast<double>(g.support) / owner_glkg.denominator);
}

double attention_vertex(const KnowledgeGraph&, const GeneralizedLocalKg& g,
                        const GeneralizedTriple& t) {
    if (g.owner.is_edge()) throw std::runtime_error("attention_vertex on edge GL-KG");
    if (g.empty()) throw std::runtime_error("vertex has empty L-KG, no training signal");
    return attention(t, g);
}

double attention_edge(const KnowledgeGraph& kg, const GeneralizedLocalKg& g,
                      const GeneralizedTriple& t) {
    if (!g.owner.is_edge()) throw std::runtime_error("attention_edge on vertex GL-KG");
    if (g.empty()) throw std::runtime_error("edge has empty L-KG, no training signal");
    if (kg.kind(t.head) == VertexKind::Entity && kg.kind(t.tail) == VertexKind::Entity)
        throw std::runtime_error("generalized edge triple cannot have two entity ends");
    return attention(t, g);
}

double f_vertex(const Vec& candidate, const GeneralizedLocalKg& g, const EmbeddingStore& store) {
    if (g.owner.is_edge()) throw std::runtime_error("f_vertex on edge GL-KG");
    if (g.empty()) throw std::runtime_error("f over empty GL-KG");
    double acc = 0.0, total = 0.0;
    for (const GeneralizedTriple& t : g.triples) {
        double a = attention(t, g);
        total += a;
        const Vec& e = store.edge(t.edge);
        double r = t.dir == Direction::Out ? translate_score(candidate, e, store.vertex(t.tail))
                                           : translate_score(store.vertex(t.head), e, candidate);
        acc += a * r;
    }
    return -acc / total;
}

double f_edge(const Vec& candidate, const GeneralizedLocalKg& g, const EmbeddingStore& store) {
    if (!g.owner.is_edge()) throw std::runtime_error("f_edge on vertex GL-KG");
    if (g.empty()) throw std::runtime_error("f over empty GL-KG");
    double acc = 0.0, total = 0.0;
    for (const GeneralizedTriple& t : g.triples) {
        double a = attention(t, g);
        total += a;
        acc += a * translate_score(store.vertex(t.head), candidate, store.vertex(t.tail));
    }
    return -acc / total;
}

double f_score(const Vec& candidate, const GeneralizedLocalKg& g, const EmbeddingStore& store) {
    return g.owner.is_edge() ? f_edge(candidate, g, store) : f_vertex(candidate, g, store);
}

Vec& GradientMap::slot(Owner o, int dim) {
    auto& m = o.is_edge() ? edge : vertex;
    auto [it, inserted] = m.try_emplace(o.id);
    if (inserted) it->second.assign(dim, 0.0);
    return it->second;
}

namespace {

// Adds coef * df/dtheta of f(candidate, g) for every participating vector.
void accumulate_f_gradient(const GeneralizedLocalKg& g, Owner candidate, double coef,
                           const EmbeddingStore& store, GradientMap& grads) {
    const int dim = store.dim();
    double total = 0.0;
    for (const GeneralizedTriple& t : g.triples) total += attention(t, g);
    const Vec& x = store.of(candidate);
    Vec& gx = grads.slot(candidate, dim);
    for (const GeneralizedTriple& t : g.triples) {
        const double w = attention(t, g) / total;
        const double c2w = 2.0 * coef * w;
        if (g.owner.is_edge()) {
            const Vec& h = store.vertex(t.head);
            const Vec& tl = store.vertex(t.tail);
            Vec& gh = grads.slot(Owner::vertex(t.head), dim);
            Vec& gt = grads.slot(Owner::vertex(t.tail), dim);
            for (int i = 0; i < dim; ++i) {
                double u = h[i] + x[i] - tl[i];
                gh[i] -= c2w * u;
                gx[i] -= c2w * u;
                gt[i] += c2w * u;
            }
        } else if (t.dir == Direction::Out) {
            const Vec& e = store.edge(t.edge);
            const Vec& c = store.vertex(t.tail);
            Vec& ge = grads.slot(Owner::edge(t.edge), dim);
            Vec& gc = grads.slot(Owner::vertex(t.tail), dim);
            for (int i = 0; i < dim; ++i) {
                double u = x[i] + e[i] - c[i];
                gx[i] -= c2w * u;
                ge[i] -= c2w * u;
                gc[i] += c2w * u;
            }
        } else {
            const Vec& h = store.vertex(t.head);
            const Vec& e = store.edge(t.edge);
            Vec& gh = grads.slot(Owner::vertex(t.head), dim);
            Vec& ge = grads.slot(Owner::edge(t.edge), dim);
            for (int i = 0; i < dim; ++i) {
                double u = h[i] + e[i] - x[i];
                gh[i] -= c2w * u;
                ge[i] -= c2w * u;
                gx[i] += c2w * u;
            }
        }
    }
}

}  // namespace

double log_prob_example(const GeneralizedLocalKg& g, std::span<const std::uint32_t> negatives,
                        const EmbeddingStore& store, GradientMap* grads) {
    const Owner owner = g.owner;
    double value = 0.0;
    auto term = [&](Owner candidate, double sign) {
        double f = f_score(store.of(candidate), g, store);
        value += std::log(sigmoid(sign * f));
        if (grads) {
            // d/dtheta log sigma(s f) = s * sigma(-s f) * df/dtheta
            accumulate_f_gradient(g, candidate, sign * sigmoid(-sign * f), store, *grads);
        }
    };
    term(owner, 1.0);
    for (std::uint32_t neg : negatives) {
        term(owner.is_edge() ? Owner::edge(neg) : Owner::vertex(neg), -1.0);
    }
    return value;
}

NegativeSampler::NegativeSampler(const KnowledgeGraph& kg, const GlkgIndex& glkgs,
                                 std::uint64_t seed)
    : rng_(seed) {
    vertex_profiles_.resize(kg.vertex_count());
    edge_profiles_.resize(kg.edge_count());
    for (VertexId v = 0; v < kg.vertex_count(); ++v) {
        if (!glkgs.vertices[v].empty()) {
            trainable_vertices_.push_back(v);
            vertex_profiles_[v] = context_profile(glkgs.vertices[v]);
        }
    }
    for (EdgeId e = 0; e < kg.edge_count(); ++e) {
        if (!glkgs.edges[e].empty()) {
            trainable_edges_.push_back(e);
            edge_profiles_[e] = context_profile(glkgs.edges[e]);
        }
    }
}

bool NegativeSampler::disjoint(Owner a, Owner b) const {
    const auto& profiles = a.is_edge() ? edge_profiles_ : vertex_profiles_;
    return profiles_disjoint(profiles[a.id], profiles[b.id]);
}

std::vector<std::uint32_t> NegativeSampler::sample(Owner owner, int n,
                                                   std::mt19937_64& rng) const {
    const auto& pool = trainable(owner.kind);
    if (pool.empty()) throw std::runtime_error("no negative candidates available");
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::vector<std::uint32_t> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
        bool found = false;
        for (int attempt = 0; attempt < 100 && !found; ++attempt) {
            std::uint32_t cand = pool[pick(rng)];
            if (cand == owner.id) continue;
            if (std::find(out.begin(), out.end(), cand) != out.end()) continue;
            Owner c = owner.is_edge() ? Owner::edge(cand) : Owner::vertex(cand);
            if (!disjoint(owner, c)) continue;
            out.push_back(cand);
            found = true;
        }
        if (!found) {
            throw std::runtime_error("cannot draw " + std::to_string(n) +
                                     " disjoint negatives; graph too small or too dense");
        }
    }
    return out;
}

std::vector<std::uint32_t> NegativeSampler::sample(Owner owner, int n) {
    return sample(owner, n, rng_);
}

double log_prob(Owner owner, const GlkgIndex& glkgs, NegativeSampler& sampler, int n,
                const EmbeddingStore& store) {
    const GeneralizedLocalKg& g = glkgs.of(owner);
    if (g.empty()) throw std::runtime_error("owner has empty GL-KG");
    auto negs = sampler.sample(owner, n);
    return log_prob_example(g, negs, store);
}

TrainResult train(const KnowledgeGraph& kg, const GlkgIndex& glkgs, const TrainConfig& cfg) {
    cfg.validate();
    EmbeddingStore store(cfg.dim, kg.vertex_count(), kg.edge_count());
    std::mt19937_64 rng(cfg.seed);
    const double bound = 6.0 / std::sqrt(static_cast<double>(cfg.dim));
    std::uniform_real_distribution<double> init(-bound, bound);
    for (VertexId v = 0; v < kg.vertex_count(); ++v) {
        for (double& x : store.vertex(v)) x = init(rng);
        normalize(store.vertex(v));
    }
    for (EdgeId e = 0; e < kg.edge_count(); ++e) {
        for (double& x : store.edge(e)) x = init(rng);
    }

    NegativeSampler sampler(kg, glkgs, cfg.seed + 1);
    std::vector<Owner> owners;
    for (std::uint32_t v : sampler.trainable(Owner::Kind::Vertex)) owners.push_back(Owner::vertex(v));
    for (std::uint32_t e : sampler.trainable(Owner::Kind::Edge)) owners.push_back(Owner::edge(e));

    TrainResult result;
    if (owners.empty()) {
        result.store = std::move(store);
        return result;
    }

    std::vector<std::uint32_t> order(owners.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;

    auto run_example = [&](Owner owner, std::mt19937_64& local_rng) {
        const GeneralizedLocalKg& g = glkgs.of(owner);
        const double lambda = owner.is_edge() ? cfg.lambda_e : cfg.lambda_v;
        if (lambda == 0.0) return 0.0;
        auto negs = sampler.sample(owner, cfg.negatives, local_rng);
        GradientMap grads;
        double value = log_prob_example(g, negs, store, &grads);
        const double step = cfg.learning_rate * lambda;
        for (auto& [id, gvec] : grads.edge) {
            Vec& vec = store.edge(id);
            for (int i = 0; i < cfg.dim; ++i) vec[i] += step * gvec[i];
        }
        for (auto& [id, gvec] : grads.vertex) {
            Vec& vec = store.vertex(id);
            for (int i = 0; i < cfg.dim; ++i) vec[i] += step * gvec[i];
            normalize(vec);
        }
        return lambda * value;
    };

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::mt19937_64 shuffle_rng(mix(cfg.seed, 0x5f0f0f0fULL + epoch));
        for (std::size_t i = order.size(); i > 1; --i) {
            std::size_t j = shuffle_rng() % i;
            std::swap(order[i - 1], order[j]);
        }
        double objective = 0.0;
        if (cfg.workers == 1) {
            std::mt19937_64 example_rng(mix(cfg.seed, 1000003ULL + epoch));
            for (std::uint32_t idx : order) objective += run_example(owners[idx], example_rng);
        } else {
#ifdef _OPENMP
            omp_set_num_threads(cfg.workers);
#endif
#pragma omp parallel for schedule(static) reduction(+ : objective)
            for (long long k = 0; k < static_cast<long long>(order.size()); ++k) {
                std::mt19937_64 example_rng(mix(mix(cfg.seed, epoch), order[k]));
                objective += run_example(owners[order[k]], example_rng);
            }
        }
        if (!std::isfinite(objective)) {
            throw std::runtime_error("non-finite objective at epoch " + std::to_string(epoch) +
                                     "; reduce the learning rate");
        }
        result.epoch_objective.push_back(objective);
    }
    result.store = std::move(store);
    return result;
}

std::vector<std::pair<std::uint32_t, double>> nearest_neighbors(const EmbeddingStore& store,
                                                                Owner query, std::size_t k) {
    const std::size_t count = query.is_edge() ? store.edge_count() : store.vertex_count();
    if (query.id >= count) throw std::runtime_error("unknown id in nearest_neighbors");
    const Vec& q = store.of(query);
    std::vector<std::pair<std::uint32_t, double>> all;
    all.reserve(count);
    for (std::uint32_t id = 0; id < count; ++id) {
        if (id == query.id) continue;
        const Vec& v = query.is_edge() ? store.edge(id) : store.vertex(id);
        double d = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) d += (q[i] - v[i]) * (q[i] - v[i]);
        all.emplace_back(id, std::sqrt(d));
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

void save_embeddings(const EmbeddingStore& store, const KnowledgeGraph& kg,
                     const std::string& path) {
    if (store.vertex_count() != kg.vertex_count() || store.edge_count() != kg.edge_count())
        throw std::runtime_error("store does not match the knowledge graph");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write embedding file: " + path);
    out << "dim " << store.dim() << " vertices " << store.vertex_count() << " edges "
        << store.edge_count() << "\n";
    char buf[40];
    auto write_vec = [&](char tag, const std::string& label, const Vec& v) {
        out << tag << '\t' << label << '\t';
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
            if (i) out << ' ';
            out << buf;
        }
        out << '\n';
    };
    for (VertexId v = 0; v < store.vertex_count(); ++v) {
        write_vec('V', kg.vertex_label(v), store.vertex(v));
    }
    for (EdgeId e = 0; e < store.edge_count(); ++e) {
        write_vec('E', kg.edge_label(e), store.edge(e));
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

EmbeddingStore load_embeddings(const KnowledgeGraph& kg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open embedding file: " + path);
    int dim = 0;
    std::size_t nv = 0, ne = 0;
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("truncated embedding file: " + path);
    {
        std::istringstream hs(header);
        std::string kd, kv, ke;
        if (!(hs >> kd >> dim >> kv >> nv >> ke >> ne) || kd != "dim" || kv != "vertices" ||
            ke != "edges") {
            throw std::runtime_error("bad embedding file header: " + path);
        }
    }
    if (nv != kg.vertex_count() || ne != kg.edge_count())
        throw std::runtime_error("embedding file does not match the knowledge graph: " + path);
    EmbeddingStore store(dim, nv, ne);
    std::vector<char> seen_v(nv, 0), seen_e(ne, 0);
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto t1 = line.find('\t');
        auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 != 1 || t2 == std::string::npos || (line[0] != 'V' && line[0] != 'E'))
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad embedding line");
        const std::string label = line.substr(2, t2 - 2);
        const bool is_edge = line[0] == 'E';
        std::uint32_t id = is_edge ? kg.require_edge(label) : kg.require_vertex(label);
        Vec& vec = is_edge ? store.edge(id) : store.vertex(id);
        std::istringstream vs(line.substr(t2 + 1));
        for (int i = 0; i < dim; ++i) {
            if (!(vs >> vec[i]))
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": truncated vector");
        }
        (is_edge ? seen_e[id] : seen_v[id]) = 1;
    }
    if (std::find(seen_v.begin(), seen_v.end(), 0) != seen_v.end() ||
        std::find(seen_e.begin(), seen_e.end(), 0) != seen_e.end()) {
        throw std::runtime_error("embedding file is missing vectors: " + path);
    }
    return store;
}

}  // namespace gsq
