#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gsq/embedding.hpp"
#include "gsq/glkg.hpp"
#include "gsq/kg.hpp"
#include "gsq/phrase.hpp"
#include "gsq/querygen.hpp"
#include "gsq/structure.hpp"

namespace gsq {

struct PipelineConfig {
    std::string kg_path;
    std::string lexicon_path;
    std::string embedding_path;
    std::string glkg_cache_path;
    TrainConfig train;
    double t_s = 15.0;
    int max_hops = 3;
    ScoreWeights weights;
    std::uint64_t max_representations = 1000000;
    int retry_cap = 5;
    bool dump_structure = false;
};

// Loaded state shared across questions.
struct Pipeline {
    KnowledgeGraph kg;
    Lexicon lexicon;
    EmbeddingStore store;

    static Pipeline load(const PipelineConfig& cfg);
};

struct ModuleTimings {
    double phrase_ms = 0.0;
    double structure_ms = 0.0;
    double querygen_ms = 0.0;
};

struct QuestionResult {
    ExecutionResult exec;
    std::vector<std::string> answer_labels;  // sorted
    StructureMatrix matrix;
    std::string query_text;
    std::string structure_dump;  // filled when cfg.dump_structure
    ModuleTimings timings;
};

QuestionResult run_question(const Pipeline& p, const PipelineConfig& cfg, const std::string& nlq);

struct QaRecord {
    std::string nlq;
    std::vector<std::string> gold;  // answer labels
};

// TSV: nlq<TAB>gold1|gold2|...
std::vector<QaRecord> load_qa(const std::string& path);

double f1_score(double precision, double recall);

struct QuestionMetrics {
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
};

struct MetricsReport {
    std::vector<QuestionMetrics> per_question;
    double recall = 0.0;     // mean over all questions
    double precision = 0.0;  // mean over all questions
    double f1 = 0.0;         // harmonic mean of the aggregates
    ModuleTimings mean_timings;
};

// Unmappable or failing questions score zero on all three metrics.
MetricsReport eval_qa(const Pipeline& p, const PipelineConfig& cfg,
                      const std::vector<QaRecord>& records);

struct LpReport {
    double mean_rank = 0.0;
    double hits_at_10 = 0.0;
    std::size_t evaluated = 0;  // ranked slots (2 per usable triple)
    std::size_t skipped = 0;    // triples with unknown labels
};

// Raw-setting link prediction: rank every vertex as replacement head and tail
// of each test triple by squared translation residual; rank of the true vertex
// is 1 + the number of strictly cheaper vertices.
LpReport eval_lp(const KnowledgeGraph& kg, const EmbeddingStore& store,
                 const std::vector<std::array<std::string, 3>>& test_rows, int workers = 1);

struct BenchReport {
    ModuleTimings mean;
    std::size_t questions = 0;
};

BenchReport bench(const Pipeline& p, const PipelineConfig& cfg,
                  const std::vector<std::string>& nlqs);

}  // namespace gsq
