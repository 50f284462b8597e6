#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gsq/pipeline.hpp"

namespace {

gsq::ScoreWeights parse_weights(const std::string& spec) {
    gsq::ScoreWeights w;
    if (std::sscanf(spec.c_str(), "%lf,%lf,%lf", &w.sim, &w.conn, &w.hop) != 3)
        throw CLI::ValidationError("--weights", "expected sim,conn,hop");
    return w;
}

std::vector<std::array<std::string, 3>> load_triple_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open triple file: " + path);
    std::vector<std::array<std::string, 3>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::array<std::string, 3> row;
        if (!std::getline(ls, row[0], '\t') || !std::getline(ls, row[1], '\t') ||
            !std::getline(ls, row[2], '\t'))
            throw std::runtime_error("malformed triple line: " + line);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<std::string> load_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] != '#') lines.push_back(line);
    }
    return lines;
}

void add_pipeline_flags(CLI::App* cmd, gsq::PipelineConfig& cfg, std::string& weights_spec) {
    cmd->add_option("--lexicon", cfg.lexicon_path, "phrase lexicon TSV")->required();
    cmd->add_option("--embeddings", cfg.embedding_path, "trained embedding file")->required();
    cmd->add_option("--t-s", cfg.t_s, "pruning ratio threshold (keep score >= top/t_s)");
    cmd->add_option("--max-hops", cfg.max_hops, "hop cutoff for connection features");
    cmd->add_option("--weights", weights_spec, "scoring weights sim,conn,hop");
    cmd->add_option("--max-representations", cfg.max_representations,
                    "cap on enumerated query representations");
    cmd->add_option("--retry-cap", cfg.retry_cap, "fallback ladder depth");
}

int run(int argc, char** argv) {
    CLI::App app{"natural-language questions to graph-structured queries"};
    app.require_subcommand(1);

    gsq::PipelineConfig cfg;
    std::string weights_spec;
    std::string cache_path, out_path, dataset_path, test_path, questions_path, nlq;

    auto* build = app.add_subcommand("build", "precompute generalized local KGs");
    build->add_option("--kg", cfg.kg_path, "knowledge graph TSV")->required();
    build->add_option("--cache", cache_path, "output cache path")->required();

    auto* train = app.add_subcommand("train", "train embeddings");
    train->add_option("--kg", cfg.kg_path, "knowledge graph TSV")->required();
    train->add_option("--cache", cache_path, "generalized local KG cache")->required();
    train->add_option("--out", out_path, "output embedding file")->required();
    train->add_option("--dim", cfg.train.dim, "embedding dimension");
    train->add_option("--epochs", cfg.train.epochs, "training epochs");
    train->add_option("--lr", cfg.train.learning_rate, "learning rate");
    train->add_option("--negatives", cfg.train.negatives, "negative samples per example");
    train->add_option("--lambda-v", cfg.train.lambda_v, "vertex objective weight");
    train->add_option("--lambda-e", cfg.train.lambda_e, "edge objective weight");
    train->add_option("--seed", cfg.train.seed, "RNG seed");
    train->add_option("--workers", cfg.train.workers, "1 = serial, >1 = parallel updates");

    auto* query = app.add_subcommand("query", "answer one question");
    query->add_option("--kg", cfg.kg_path, "knowledge graph TSV")->required();
    add_pipeline_flags(query, cfg, weights_spec);
    query->add_flag("--dump-structure", cfg.dump_structure, "print cost tables and matrix");
    query->add_option("nlq", nlq, "the question")->required();

    auto* eval_qa = app.add_subcommand("eval-qa", "QA metrics over a dataset");
    eval_qa->add_option("--kg", cfg.kg_path, "knowledge graph TSV")->required();
    add_pipeline_flags(eval_qa, cfg, weights_spec);
    eval_qa->add_option("--dataset", dataset_path, "TSV nlq<TAB>gold1|gold2|...")->required();

    auto* eval_lp = app.add_subcommand("eval-lp", "link-prediction MeanRank / Hits@10");
    eval_lp->add_option("--kg", cfg.kg_path, "knowledge graph TSV")->required();
    eval_lp->add_option("--embeddings", cfg.embedding_path, "trained embedding file")->required();
    eval_lp->add_option("--test", test_path, "test triples TSV")->required();
    eval_lp->add_option("--workers", cfg.train.workers, "parallel ranking workers");

    auto* bench = app.add_subcommand("bench", "per-module timing table");
    bench->add_option("--kg", cfg.kg_path, "knowledge graph TSV")->required();
    add_pipeline_flags(bench, cfg, weights_spec);
    bench->add_option("--questions", questions_path, "one question per line")->required();

    CLI11_PARSE(app, argc, argv);
    if (!weights_spec.empty()) cfg.weights = parse_weights(weights_spec);

    if (build->parsed()) {
        gsq::KnowledgeGraph kg = gsq::KnowledgeGraph::load(cfg.kg_path);
        gsq::GlkgIndex index = gsq::GlkgIndex::build(kg);
        gsq::save_glkg_cache(index, kg, cache_path);
        std::size_t skipped = 0;
        for (std::size_t v = 0; v < index.vertices.size(); ++v) {
            if (index.vertices[v].empty()) {
                std::cout << "skip\tvertex\t" << kg.vertex_label(static_cast<gsq::VertexId>(v))
                          << "\n";
                ++skipped;
            }
        }
        for (std::size_t e = 0; e < index.edges.size(); ++e) {
            if (index.edges[e].empty()) {
                std::cout << "skip\tedge\t" << kg.edge_label(static_cast<gsq::EdgeId>(e)) << "\n";
                ++skipped;
            }
        }
        std::cout << "cached\t" << (index.vertices.size() + index.edges.size() - skipped)
                  << "\nskipped\t" << skipped << "\n";
        return 0;
    }
    if (train->parsed()) {
        gsq::KnowledgeGraph kg = gsq::KnowledgeGraph::load(cfg.kg_path);
        gsq::GlkgIndex index = gsq::load_glkg_cache(kg, cache_path);
        gsq::TrainResult result = gsq::train(kg, index, cfg.train);
        gsq::save_embeddings(result.store, kg, out_path);
        std::cout << "final_objective\t" << result.epoch_objective.back() << "\n";
        return 0;
    }
    if (query->parsed()) {
        gsq::Pipeline p = gsq::Pipeline::load(cfg);
        gsq::QuestionResult r = gsq::run_question(p, cfg, nlq);
        std::cout << r.query_text;
        if (cfg.dump_structure) std::cout << r.structure_dump;
        std::cout << "stage\t" << r.exec.stage << "\n";
        for (const std::string& a : r.answer_labels) std::cout << "answer\t" << a << "\n";
        std::cout << "phrase_ms\t" << r.timings.phrase_ms << "\nstructure_ms\t"
                  << r.timings.structure_ms << "\nquerygen_ms\t" << r.timings.querygen_ms << "\n";
        return 0;
    }
    if (eval_qa->parsed()) {
        gsq::Pipeline p = gsq::Pipeline::load(cfg);
        gsq::MetricsReport report = gsq::eval_qa(p, cfg, gsq::load_qa(dataset_path));
        std::cout << "question\trecall\tprecision\tf1\n";
        for (std::size_t i = 0; i < report.per_question.size(); ++i) {
            const auto& q = report.per_question[i];
            std::cout << i + 1 << '\t' << q.recall << '\t' << q.precision << '\t' << q.f1 << "\n";
        }
        std::cout << "aggregate\t" << report.recall << '\t' << report.precision << '\t'
                  << report.f1 << "\n";
        return 0;
    }
    if (eval_lp->parsed()) {
        gsq::KnowledgeGraph kg = gsq::KnowledgeGraph::load(cfg.kg_path);
        gsq::EmbeddingStore store = gsq::load_embeddings(kg, cfg.embedding_path);
        gsq::LpReport report =
            gsq::eval_lp(kg, store, load_triple_rows(test_path), cfg.train.workers);
        std::cout << "mean_rank\t" << report.mean_rank << "\nhits_at_10\t" << report.hits_at_10
                  << "\nevaluated\t" << report.evaluated << "\nskipped\t" << report.skipped
                  << "\n";
        return 0;
    }
    if (bench->parsed()) {
        gsq::Pipeline p = gsq::Pipeline::load(cfg);
        gsq::BenchReport report = gsq::bench(p, cfg, load_lines(questions_path));
        std::cout << "module\tmean_ms\n";
        std::cout << "phrase-mapping\t" << report.mean.phrase_ms << "\n";
        std::cout << "structure-computing\t" << report.mean.structure_ms << "\n";
        std::cout << "query-generation\t" << report.mean.querygen_ms << "\n";
        return 0;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const gsq::UnmappableQuestion& e) {
        std::cerr << "unmappable: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
