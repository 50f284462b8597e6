#include "gsq/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gsq {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

Pipeline Pipeline::load(const PipelineConfig& cfg) {
    Pipeline p{KnowledgeGraph::load(cfg.kg_path), {}, {}};
    p.lexicon = Lexicon::load(cfg.lexicon_path, p.kg);
    p.store = load_embeddings(p.kg, cfg.embedding_path);
    return p;
}

QuestionResult run_question(const Pipeline& p, const PipelineConfig& cfg, const std::string& nlq) {
    QuestionResult result;

    auto t0 = Clock::now();
    std::vector<PhraseMatch> phrases = extract_phrases(nlq, p.lexicon);
    std::vector<CandidateSet> sets;
    sets.reserve(phrases.size());
    for (const PhraseMatch& ph : phrases) sets.push_back(retrieve_candidates(ph, p.lexicon, p.kg));
    if (sets.size() < 2)
        throw UnmappableQuestion("question maps to fewer than two phrases: " + nlq);
    auto features = connection_features(sets, p.kg, cfg.max_hops);
    sets = disambiguate(sets, features, cfg.weights, cfg.t_s);
    result.timings.phrase_ms = ms_since(t0);

    auto t1 = Clock::now();
    SplitSets split = split_sets(sets);
    if (split.vertex_sets.size() < 2 || split.edge_sets.empty())
        throw UnmappableQuestion("question does not induce a query structure: " + nlq);
    std::vector<Vec> vertex_means = candidate_means(split.vertex_sets, p.store);
    std::vector<Vec> edge_means = candidate_means(split.edge_sets, p.store);
    result.matrix = solve(vertex_means, edge_means);
    if (cfg.dump_structure) {
        result.structure_dump =
            dump_structure(result.matrix, build_cost_tables(vertex_means, edge_means));
    }
    result.timings.structure_ms = ms_since(t1);

    auto t2 = Clock::now();
    auto reps = enumerate_representations(split.vertex_sets, split.edge_sets, result.matrix,
                                          cfg.max_representations);
    rank_representations(reps, p.store);
    result.exec = execute_with_fallback(reps, split.vertex_sets, p.kg, cfg.retry_cap);
    result.timings.querygen_ms = ms_since(t2);

    result.query_text = serialize_query(result.exec.query, p.kg);
    for (VertexId v : result.exec.answers) result.answer_labels.push_back(p.kg.vertex_label(v));
    std::sort(result.answer_labels.begin(), result.answer_labels.end());
    return result;
}

std::vector<QaRecord> load_qa(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open QA dataset: " + path);
    std::vector<QaRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected nlq<TAB>gold1|gold2|...");
        }
        QaRecord rec;
        rec.nlq = line.substr(0, tab);
        std::string golds = line.substr(tab + 1);
        std::size_t pos = 0;
        while (pos <= golds.size()) {
            auto bar = golds.find('|', pos);
            std::string g = golds.substr(pos, bar - pos);
            if (!g.empty()) rec.gold.push_back(g);
            if (bar == std::string::npos) break;
            pos = bar + 1;
        }
        if (rec.nlq.empty() || rec.gold.empty()) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": question and gold answers must be nonempty");
        }
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw std::runtime_error("empty QA dataset: " + path);
    return records;
}

double f1_score(double precision, double recall) {
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

MetricsReport eval_qa(const Pipeline& p, const PipelineConfig& cfg,
                      const std::vector<QaRecord>& records) {
    MetricsReport report;
    for (const QaRecord& rec : records) {
        std::vector<std::string> returned;
        try {
            QuestionResult qr = run_question(p, cfg, rec.nlq);
            returned = qr.answer_labels;
            report.mean_timings.phrase_ms += qr.timings.phrase_ms;
            report.mean_timings.structure_ms += qr.timings.structure_ms;
            report.mean_timings.querygen_ms += qr.timings.querygen_ms;
        } catch (const UnmappableQuestion&) {
            // scored as an empty answer set
        }
        std::set<std::string> gold(rec.gold.begin(), rec.gold.end());
        std::size_t inter = 0;
        for (const std::string& a : returned) inter += gold.count(a);
        QuestionMetrics qm;
        qm.recall = static_cast<double>(inter) / static_cast<double>(gold.size());
        qm.precision =
            returned.empty() ? 0.0 : static_cast<double>(inter) / static_cast<double>(returned.size());
        qm.f1 = f1_score(qm.precision, qm.recall);
        report.per_question.push_back(qm);
        report.recall += qm.recall;
        report.precision += qm.precision;
    }
    const double n = static_cast<double>(records.size());
    report.recall /= n;
    report.precision /= n;
    report.f1 = f1_score(report.precision, report.recall);
    report.mean_timings.phrase_ms /= n;
    report.mean_timings.structure_ms /= n;
    report.mean_timings.querygen_ms /= n;
    return report;
}

LpReport eval_lp(const KnowledgeGraph& kg, const EmbeddingStore& store,
                 const std::vector<std::array<std::string, 3>>& test_rows, int workers) {
    if (workers < 1) throw std::runtime_error("workers must be >= 1");
    LpReport report;
    std::vector<Triple> test;
    for (const auto& row : test_rows) {
        auto h = kg.find_vertex(row[0]);
        auto e = kg.find_edge(row[1]);
        auto t = kg.find_vertex(row[2]);
        if (!h || !e || !t) {
            ++report.skipped;
            continue;
        }
        test.push_back({*h, *e, *t});
    }
    const std::size_t nv = kg.vertex_count();
    const auto n = static_cast<std::int64_t>(test.size());
    double rank_sum = 0.0;
    double hits = 0.0;
#ifdef _OPENMP
    omp_set_num_threads(workers);
#pragma omp parallel for schedule(static) reduction(+ : rank_sum, hits)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        const Triple& t = test[i];
        const Vec& h = store.vertex(t.head);
        const Vec& e = store.edge(t.edge);
        const Vec& tl = store.vertex(t.tail);
        const double true_tail_cost = translate_score(h, e, tl);
        const double true_head_cost = true_tail_cost;
        std::size_t tail_rank = 1, head_rank = 1;
        for (std::size_t v = 0; v < nv; ++v) {
            const Vec& cand = store.vertex(static_cast<VertexId>(v));
            if (translate_score(h, e, cand) < true_tail_cost) ++tail_rank;
            if (translate_score(cand, e, tl) < true_head_cost) ++head_rank;
        }
        rank_sum += static_cast<double>(tail_rank + head_rank);
        hits += (tail_rank <= 10) + (head_rank <= 10);
    }
    report.evaluated = 2 * test.size();
    if (report.evaluated > 0) {
        rank_sum /= static_cast<double>(report.evaluated);
        hits /= static_cast<double>(report.evaluated);
    }
    report.mean_rank = rank_sum;
    report.hits_at_10 = hits;
    return report;
}

BenchReport bench(const Pipeline& p, const PipelineConfig& cfg,
                  const std::vector<std::string>& nlqs) {
    BenchReport report;
    for (const std::string& nlq : nlqs) {
        QuestionResult qr = run_question(p, cfg, nlq);
        report.mean.phrase_ms += qr.timings.phrase_ms;
        report.mean.structure_ms += qr.timings.structure_ms;
        report.mean.querygen_ms += qr.timings.querygen_ms;
        ++report.questions;
    }
    if (report.questions > 0) {
        const double n = static_cast<double>(report.questions);
        report.mean.phrase_ms /= n;
        report.mean.structure_ms /= n;
        report.mean.querygen_ms /= n;
    }
    return report;
}

}  // namespace gsq
