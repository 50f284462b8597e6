#include "gsq/structure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gsq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool better(double cost, const StructureMatrix& m, double best_cost,
            const StructureMatrix& best) {
    if (cost != best_cost) return cost < best_cost;
    return m.cells < best.cells;
}

}  // namespace

Validity is_valid(const StructureMatrix& m) {
    for (int c : m.cells) {
        if (c < 0 || c > m.m) throw std::runtime_error("structure matrix cell out of range");
    }
    Validity v;
    // 1: no self links
    for (int i = 0; i < m.n; ++i) {
        if (m.at(i, i) != 0) {
            v.violated.push_back(1);
            break;
        }
    }
    // 2: no antiparallel links
    for (int i = 0; i < m.n && (v.violated.empty() || v.violated.back() != 2); ++i) {
        for (int j = 0; j < m.n; ++j) {
            if (i != j && m.at(i, j) != 0 && m.at(j, i) != 0) {
                v.violated.push_back(2);
                break;
            }
        }
    }
    // 3: exactly m links
    int nonzero = 0;
    for (int c : m.cells) nonzero += c != 0;
    if (nonzero != m.m) v.violated.push_back(3);
    // 4: connected as an undirected graph
    if (m.n > 0) {
        std::vector<char> seen(m.n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int reached = 1;
        while (!stack.empty()) {
            int i = stack.back();
            stack.pop_back();
            for (int j = 0; j < m.n; ++j) {
                if (!seen[j] && (m.at(i, j) != 0 || m.at(j, i) != 0)) {
                    seen[j] = 1;
                    ++reached;
                    stack.push_back(j);
                }
            }
        }
        if (reached != m.n) v.violated.push_back(4);
    }
    // 5: every edge set placed
    std::vector<char> present(m.m + 1, 0);
    for (int c : m.cells) {
        if (c > 0) present[c] = 1;
    }
    for (int k = 1; k <= m.m; ++k) {
        if (!present[k]) {
            v.violated.push_back(5);
            break;
        }
    }
    v.ok = v.violated.empty();
    return v;
}

Vec mean_vector(const CandidateSet& set, const EmbeddingStore& store) {
    if (set.candidates.empty()) throw std::runtime_error("mean_vector over empty candidate set");
    Vec mean(store.dim(), 0.0);
    for (const Candidate& c : set.candidates) {
        const Vec& v = c.is_edge ? store.edge(c.id) : store.vertex(c.id);
        for (int i = 0; i < store.dim(); ++i) mean[i] += v[i];
    }
    for (double& x : mean) x /= static_cast<double>(set.candidates.size());
    return mean;
}

std::vector<Vec> candidate_means(const std::vector<CandidateSet>& sets,
                                 const EmbeddingStore& store) {
    std::vector<Vec> means;
    means.reserve(sets.size());
    for (const CandidateSet& s : sets) means.push_back(mean_vector(s, store));
    return means;
}

CostTables build_cost_tables(const std::vector<Vec>& vertex_means,
                             const std::vector<Vec>& edge_means) {
    CostTables tables;
    tables.n = static_cast<int>(vertex_means.size());
    tables.m = static_cast<int>(edge_means.size());
    tables.tables.assign(tables.m, std::vector<double>(tables.n * tables.n, kInf));
    for (int k = 0; k < tables.m; ++k) {
        for (int i = 0; i < tables.n; ++i) {
            for (int j = 0; j < tables.n; ++j) {
                if (i == j) continue;  // diagonal keeps the sentinel
                tables.tables[k][i * tables.n + j] =
                    translate_score(vertex_means[i], edge_means[k], vertex_means[j]);
            }
        }
    }
    return tables;
}

double cost_score(const StructureMatrix& m, const CostTables& tables) {
    double total = 0.0;
    for (int i = 0; i < m.n; ++i) {
        for (int j = 0; j < m.n; ++j) {
            if (m.at(i, j) != 0) total += tables.at(m.at(i, j), i, j);
        }
    }
    return total;
}

namespace {

struct SolveSearch {
    const CostTables& tables;
    StructureMatrix best;
    double best_cost = kInf;
    bool found = false;

    void consider(const StructureMatrix& m) {
        if (!is_valid(m).ok) return;
        double c = cost_score(m, tables);
        if (!found || better(c, m, best_cost, best)) {
            best = m;
            best_cost = c;
            found = true;
        }
    }

    // Re-place the selected edge sets, one after another, over every cell.
    void change(StructureMatrix& m, const std::vector<int>& selected, std::size_t pos) {
        if (pos == selected.size()) {
            consider(m);
            return;
        }
        const int k = selected[pos];
        for (int i = 0; i < m.n; ++i) {
            for (int j = 0; j < m.n; ++j) {
                int tmp = m.at(i, j);
                m.at(i, j) = k;
                change(m, selected, pos + 1);
                m.at(i, j) = tmp;
            }
        }
    }
};

void subsets(int m, int size, int first, std::vector<int>& cur,
             const std::function<void(const std::vector<int>&)>& fn) {
    if (static_cast<int>(cur.size()) == size) {
        fn(cur);
        return;
    }
    for (int k = first; k <= m; ++k) {
        cur.push_back(k);
        subsets(m, size, k + 1, cur, fn);
        cur.pop_back();
    }
}

}  // namespace

StructureMatrix solve(const std::vector<Vec>& vertex_means, const std::vector<Vec>& edge_means) {
    const int n = static_cast<int>(vertex_means.size());
    const int m = static_cast<int>(edge_means.size());
    if (n < 2 || m < 1) throw std::runtime_error("structure solving needs n >= 2 and m >= 1");
    CostTables tables = build_cost_tables(vertex_means, edge_means);

    // Ideal matrix: each edge set at its cheapest cell.
    StructureMatrix ideal(n, m);
    for (int k = 1; k <= m; ++k) {
        int bi = -1, bj = -1;
        double bc = kInf;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i != j && tables.at(k, i, j) < bc) {
                    bc = tables.at(k, i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        ideal.at(bi, bj) = k;
    }
    if (is_valid(ideal).ok) return ideal;

    for (int num = 1; num <= m; ++num) {
        SolveSearch search{tables, {}, kInf, false};
        std::vector<int> cur;
        subsets(m, num, 1, cur, [&](const std::vector<int>& selected) {
            StructureMatrix trial = ideal;
            for (int k : selected) {
                for (int& cell : trial.cells) {
                    if (cell == k) cell = 0;
                }
            }
            search.change(trial, selected, 0);
        });
        if (search.found) return search.best;
    }
    throw std::runtime_error("no valid structure");
}

StructureMatrix brute_force_solve(const std::vector<Vec>& vertex_means,
                                  const std::vector<Vec>& edge_means) {
    const int n = static_cast<int>(vertex_means.size());
    const int m = static_cast<int>(edge_means.size());
    if (n < 2 || m < 1) throw std::runtime_error("structure solving needs n >= 2 and m >= 1");
    if (std::pow(static_cast<double>(n), 2.0 * m) > 1e7)
        throw std::runtime_error("search space too large for brute force");
    CostTables tables = build_cost_tables(vertex_means, edge_means);

    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j) pairs.emplace_back(i, j);
        }
    }
    StructureMatrix best;
    double best_cost = kInf;
    bool found = false;
    std::vector<std::size_t> choice(m, 0);  // pair index per edge set
    while (true) {
        StructureMatrix trial(n, m);
        bool collision = false;
        for (int k = 0; k < m && !collision; ++k) {
            auto [i, j] = pairs[choice[k]];
            if (trial.at(i, j) != 0) {
                collision = true;  // a cell cannot hold two edge sets
            } else {
                trial.at(i, j) = k + 1;
            }
        }
        if (!collision && is_valid(trial).ok) {
            double c = cost_score(trial, tables);
            if (!found || better(c, trial, best_cost, best)) {
                best = trial;
                best_cost = c;
                found = true;
            }
        }
        int k = m - 1;
        while (k >= 0 && ++choice[k] == pairs.size()) {
            choice[k] = 0;
            --k;
        }
        if (k < 0) break;
    }
    if (!found) throw std::runtime_error("no valid structure");
    return best;
}

std::string dump_structure(const StructureMatrix& m, const CostTables& tables) {
    std::ostringstream out;
    for (int k = 1; k <= tables.m; ++k) {
        out << "cost_table\t" << k << '\n';
        for (int i = 0; i < tables.n; ++i) {
            for (int j = 0; j < tables.n; ++j) {
                if (j) out << '\t';
                out << tables.at(k, i, j);
            }
            out << '\n';
        }
    }
    out << "structure_matrix\n";
    for (int i = 0; i < m.n; ++i) {
        for (int j = 0; j < m.n; ++j) {
            if (j) out << '\t';
            out << m.at(i, j);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace gsq
