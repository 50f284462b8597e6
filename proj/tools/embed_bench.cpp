// Compares the serial reference trainer against the parallel one on a
// synthetic knowledge graph and reports throughput plus final objectives.
#include <array>
#include <chrono>
#include <iostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "gsq/embedding.hpp"
#include "gsq/glkg.hpp"
#include "gsq/kg.hpp"

namespace {

gsq::KnowledgeGraph synthetic_kg(int entities, int classes, int edge_labels, int triples,
                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::array<std::string, 3>> rows;
    auto ent = [](int i) { return "ent" + std::to_string(i); };
    auto cls = [](int i) { return "cls" + std::to_string(i); };
    auto rel = [](int i) { return "rel" + std::to_string(i); };
    // each entity gets one class; each relation links a fixed source class to
    // a fixed target class so edge contexts stay distinguishable
    std::vector<std::vector<int>> members(classes);
    for (int i = 0; i < entities; ++i) {
        int c = static_cast<int>(rng() % classes);
        members[c].push_back(i);
        rows.push_back({ent(i), "type", cls(c)});
    }
    for (int i = 0; i < triples; ++i) {
        int r = static_cast<int>(rng() % edge_labels);
        const auto& src = members[(2 * r) % classes];
        const auto& dst = members[(2 * r + 1) % classes];
        if (src.empty() || dst.empty()) continue;
        int h = src[rng() % src.size()];
        int t = dst[rng() % dst.size()];
        if (h == t) continue;
        rows.push_back({ent(h), rel(r), ent(t)});
    }
    return gsq::KnowledgeGraph::from_triples(rows);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs parallel embedding trainer benchmark"};
    int entities = 4000, classes = 24, edge_labels = 16, triples = 16000;
    gsq::TrainConfig cfg;
    cfg.dim = 32;
    cfg.epochs = 10;
    cfg.negatives = 3;  // dense synthetic graphs offer few disjoint contexts
    int parallel_workers = static_cast<int>(std::thread::hardware_concurrency());
    if (parallel_workers < 2) parallel_workers = 2;
    app.add_option("--entities", entities);
    app.add_option("--classes", classes);
    app.add_option("--edge-labels", edge_labels);
    app.add_option("--triples", triples);
    app.add_option("--dim", cfg.dim);
    app.add_option("--epochs", cfg.epochs);
    app.add_option("--negatives", cfg.negatives);
    app.add_option("--seed", cfg.seed);
    app.add_option("--workers", parallel_workers, "worker count for the parallel run");
    CLI11_PARSE(app, argc, argv);

    gsq::KnowledgeGraph kg = synthetic_kg(entities, classes, edge_labels, triples, cfg.seed);
    gsq::GlkgIndex index = gsq::GlkgIndex::build(kg);
    std::cout << "vertices\t" << kg.vertex_count() << "\tedges\t" << kg.edge_count()
              << "\ttriples\t" << kg.triples().size() << "\n";

    auto run = [&](const char* name, int workers) {
        gsq::TrainConfig c = cfg;
        c.workers = workers;
        auto start = std::chrono::steady_clock::now();
        gsq::TrainResult r = gsq::train(kg, index, c);
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        double examples = static_cast<double>(kg.vertex_count() + kg.edge_count()) * cfg.epochs;
        std::cout << name << "\tworkers\t" << workers << "\tseconds\t" << sec
                  << "\texamples_per_sec\t" << examples / sec << "\tfinal_objective\t"
                  << r.epoch_objective.back() << "\n";
        return sec;
    };
    double serial = run("serial", 1);
    double parallel = run("parallel", parallel_workers);
    std::cout << "speedup\t" << serial / parallel << "\n";
    return 0;
}
