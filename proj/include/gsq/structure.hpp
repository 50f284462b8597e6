#pragma once

#include <string>
#include <vector>

#include "gsq/embedding.hpp"
#include "gsq/phrase.hpp"

namespace gsq {

// n x n matrix over vertex-set indices; cell (i,j) holds the 1-based edge-set
// label linking set i to set j, 0 when unlinked.
struct StructureMatrix {
    int n = 0;
    int m = 0;
    std::vector<int> cells;  // row-major, n*n

    StructureMatrix() = default;
    StructureMatrix(int n_, int m_) : n(n_), m(m_), cells(n_ * n_, 0) {}
    int& at(int i, int j) { return cells[i * n + j]; }
    int at(int i, int j) const { return cells[i * n + j]; }
    bool operator==(const StructureMatrix&) const = default;
};

struct Validity {
    bool ok = false;
    std::vector<int> violated;  // 1-based constraint indices
};

Validity is_valid(const StructureMatrix& m);

// Per edge set k: n x n table of ||Cv_i + Ce_k - Cv_j||^2, +inf on the diagonal.
struct CostTables {
    int n = 0;
    int m = 0;
    std::vector<std::vector<double>> tables;  // tables[k-1][i*n+j]
    double at(int k, int i, int j) const { return tables[k - 1][i * n + j]; }
};

Vec mean_vector(const CandidateSet& set, const EmbeddingStore& store);

CostTables build_cost_tables(const std::vector<Vec>& vertex_means,
                             const std::vector<Vec>& edge_means);

double cost_score(const StructureMatrix& m, const CostTables& tables);

// Ideal per-edge minimum placement, then widening re-placement of edge-set
// subsets until a valid matrix appears. Heuristic beyond the ideal matrix.
StructureMatrix solve(const std::vector<Vec>& vertex_means, const std::vector<Vec>& edge_means);

// Exhaustive enumeration over all placements of the edge sets on ordered
// vertex-set pairs. Guarded against blowup; ties broken by lexicographic cells.
StructureMatrix brute_force_solve(const std::vector<Vec>& vertex_means,
                                  const std::vector<Vec>& edge_means);

std::vector<Vec> candidate_means(const std::vector<CandidateSet>& sets,
                                 const EmbeddingStore& store);

std::string dump_structure(const StructureMatrix& m, const CostTables& tables);

}  // namespace gsq
