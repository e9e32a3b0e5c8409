#include "pairlearn/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pairlearn/error.hpp"
#include "pairlearn/numeric.hpp"

namespace pairlearn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest-augmenting-path assignment with potentials; requires R <= C.
// Returns row -> col, every row matched.
std::vector<int> solve_rows_le_cols(const Matrix& cost) {
    const std::size_t r_count = cost.rows, c_count = cost.cols;
    std::vector<double> u(r_count + 1, 0.0), v(c_count + 1, 0.0);
    std::vector<std::size_t> col_row(c_count + 1, 0), way(c_count + 1, 0);
    for (std::size_t i = 1; i <= r_count; ++i) {
        col_row[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(c_count + 1, kInf);
        std::vector<char> used(c_count + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = col_row[j0];
            std::size_t j1 = 0;
            double delta = kInf;
            for (std::size_t j = 1; j <= c_count; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= c_count; ++j) {
                if (used[j]) {
                    u[col_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (col_row[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            col_row[j0] = col_row[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> row_to_col(r_count, -1);
    for (std::size_t j = 1; j <= c_count; ++j) {
        if (col_row[j] != 0) row_to_col[col_row[j] - 1] = static_cast<int>(j - 1);
    }
    return row_to_col;
}

// Optimal node -> class map on an arbitrary rectangle (no tie polish).
std::vector<int> solve_rect(const Matrix& cost) {
    if (cost.rows <= cost.cols) return solve_rows_le_cols(cost);
    Matrix t(cost.cols, cost.rows);
    for (std::size_t r = 0; r < cost.rows; ++r) {
        for (std::size_t c = 0; c < cost.cols; ++c) t(c, r) = cost(r, c);
    }
    const std::vector<int> col_to_row = solve_rows_le_cols(t);
    std::vector<int> row_to_col(cost.rows, -1);
    for (std::size_t c = 0; c < col_to_row.size(); ++c) {
        row_to_col[static_cast<std::size_t>(col_to_row[c])] = static_cast<int>(c);
    }
    return row_to_col;
}

// Totals are always accumulated in ascending node order so equal assignments
// produce bit-identical sums.
double assignment_total(const Matrix& cost, const std::vector<int>& node_to_class) {
    double acc = 0.0;
    for (std::size_t i = 0; i < node_to_class.size(); ++i) {
        if (node_to_class[i] >= 0) acc += cost(i, static_cast<std::size_t>(node_to_class[i]));
    }
    return acc;
}

// Best completion for nodes [from..K) over the classes not yet taken; returns
// false when the required match count cannot be reached.
bool solve_remainder(const Matrix& cost, std::size_t from, const std::vector<char>& class_taken,
                     std::size_t required, std::vector<int>& completion) {
    const std::size_t k_count = cost.rows, c_count = cost.cols;
    std::vector<std::size_t> free_classes;
    for (std::size_t c = 0; c < c_count; ++c) {
        if (!class_taken[c]) free_classes.push_back(c);
    }
    const std::size_t nr = k_count - from;
    completion.assign(nr, -1);
    if (std::min(nr, free_classes.size()) != required) return false;
    if (required == 0) return true;
    Matrix sub(nr, free_classes.size());
    for (std::size_t r = 0; r < nr; ++r) {
        for (std::size_t c = 0; c < free_classes.size(); ++c) {
            sub(r, c) = cost(from + r, free_classes[c]);
        }
    }
    const std::vector<int> sub_assign = solve_rect(sub);
    for (std::size_t r = 0; r < nr; ++r) {
        if (sub_assign[r] >= 0) {
            completion[r] = static_cast<int>(free_classes[static_cast<std::size_t>(sub_assign[r])]);
        }
    }
    return true;
}

} // namespace

ContingencyTable ContingencyTable::from_assignments(const std::vector<int>& node_of_sample,
                                                    const std::vector<int>& class_of_sample,
                                                    std::size_t num_nodes,
                                                    std::size_t num_classes) {
    if (node_of_sample.size() != class_of_sample.size()) {
        throw ContractError("ContingencyTable: node/class vectors differ in length");
    }
    ContingencyTable t(num_nodes, num_classes);
    for (std::size_t s = 0; s < node_of_sample.size(); ++s) {
        const int k = node_of_sample[s];
        const int c = class_of_sample[s];
        if (k < 0 || static_cast<std::size_t>(k) >= num_nodes || c < 0 ||
            static_cast<std::size_t>(c) >= num_classes) {
            throw ContractError("ContingencyTable: sample assignment out of range");
        }
        ++t.at(static_cast<std::size_t>(k), static_cast<std::size_t>(c));
    }
    t.total = static_cast<long long>(node_of_sample.size());
    return t;
}

std::vector<long long> ContingencyTable::node_totals() const {
    std::vector<long long> r(nodes, 0);
    for (std::size_t k = 0; k < nodes; ++k) {
        for (std::size_t c = 0; c < classes; ++c) r[k] += at(k, c);
    }
    return r;
}

std::vector<long long> ContingencyTable::class_totals() const {
    std::vector<long long> r(classes, 0);
    for (std::size_t k = 0; k < nodes; ++k) {
        for (std::size_t c = 0; c < classes; ++c) r[c] += at(k, c);
    }
    return r;
}

Assignment hungarian(const Matrix& cost) {
    if (cost.rows == 0 || cost.cols == 0) throw ContractError("hungarian: empty cost matrix");
    for (double v : cost.data) {
        if (!std::isfinite(v)) throw DomainError("hungarian: costs must be finite");
    }
    const std::size_t k_count = cost.rows, c_count = cost.cols;
    const std::size_t target_matches = std::min(k_count, c_count);

    std::vector<int> best = solve_rect(cost);
    const double optimal_total = assignment_total(cost, best);

    // Lexicographic polish: for each node in order, adopt the smallest class
    // (unmatched sorts last) whose best completion still hits the optimal
    // total exactly.
    std::vector<char> class_taken(c_count, 0);
    std::size_t matched_prefix = 0;
    for (std::size_t i = 0; i < k_count; ++i) {
        const int current = best[i];
        const int current_rank = current < 0 ? static_cast<int>(c_count) : current;
        for (int cand = 0; cand <= static_cast<int>(c_count); ++cand) {
            if (cand >= current_rank) break; // current choice already minimal
            const bool unmatched = cand == static_cast<int>(c_count);
            if (!unmatched && class_taken[static_cast<std::size_t>(cand)]) continue;
            std::vector<char> taken = class_taken;
            std::size_t required = target_matches - matched_prefix;
            if (!unmatched) {
                taken[static_cast<std::size_t>(cand)] = 1;
                if (required == 0) continue;
                --required;
            }
            std::vector<int> completion;
            if (!solve_remainder(cost, i + 1, taken, required, completion)) continue;
            std::vector<int> candidate = best;
            candidate[i] = unmatched ? -1 : cand;
            for (std::size_t r = 0; r < completion.size(); ++r) candidate[i + 1 + r] = completion[r];
            if (assignment_total(cost, candidate) == optimal_total) {
                best = std::move(candidate);
                break;
            }
        }
        if (best[i] >= 0) {
            class_taken[static_cast<std::size_t>(best[i])] = 1;
            ++matched_prefix;
        }
    }

    Assignment out;
    out.node_to_class = std::move(best);
    out.total_cost = assignment_total(cost, out.node_to_class);
    out.matches = matched_prefix;
    return out;
}

double clustering_accuracy(const ContingencyTable& table) {
    if (table.total == 0) throw ContractError("clustering_accuracy: empty table");
    Matrix cost(table.nodes, table.classes);
    for (std::size_t k = 0; k < table.nodes; ++k) {
        for (std::size_t c = 0; c < table.classes; ++c) {
            cost(k, c) = -static_cast<double>(table.at(k, c));
        }
    }
    const Assignment a = hungarian(cost);
    long long matched = 0;
    for (std::size_t k = 0; k < table.nodes; ++k) {
        if (a.node_to_class[k] >= 0) {
            matched += table.at(k, static_cast<std::size_t>(a.node_to_class[k]));
        }
    }
    return static_cast<double>(matched) / static_cast<double>(table.total);
}

double nmi(const ContingencyTable& table) {
    if (table.total <= 0) throw ContractError("nmi: empty table");
    const double n = static_cast<double>(table.total);
    const std::vector<long long> row = table.node_totals();
    const std::vector<long long> col = table.class_totals();

    std::vector<double> h_terms;
    for (long long r : row) {
        if (r > 0) {
            const double p = static_cast<double>(r) / n;
            h_terms.push_back(-p * std::log(p));
        }
    }
    const double h_u = canonical_sum(h_terms);
    h_terms.clear();
    for (long long c : col) {
        if (c > 0) {
            const double p = static_cast<double>(c) / n;
            h_terms.push_back(-p * std::log(p));
        }
    }
    const double h_v = canonical_sum(h_terms);

    if (h_u == 0.0 && h_v == 0.0) return 1.0; // both single-cluster: identical partitions
    if (h_u == 0.0 || h_v == 0.0) return 0.0;

    std::vector<double> mi_terms;
    for (std::size_t k = 0; k < table.nodes; ++k) {
        for (std::size_t c = 0; c < table.classes; ++c) {
            const long long cell = table.at(k, c);
            if (cell <= 0) continue;
            const double p = static_cast<double>(cell) / n;
            const double ratio = (static_cast<double>(cell) * n) /
                                 (static_cast<double>(row[k]) * static_cast<double>(col[c]));
            mi_terms.push_back(p * std::log(ratio));
        }
    }
    const double mi = canonical_sum(mi_terms);
    return mi / std::sqrt(h_u * h_v);
}

int ndc(const std::vector<long long>& cluster_sizes, long long total, std::size_t num_nodes) {
    if (cluster_sizes.size() != num_nodes) {
        throw ContractError("ndc: size vector length must equal the node count");
    }
    long long sum = 0;
    for (long long s : cluster_sizes) {
        if (s < 0) throw ContractError("ndc: negative cluster size");
        sum += s;
    }
    if (sum != total) throw ContractError("ndc: cluster sizes do not sum to the total");
    int dominant = 0;
    for (long long s : cluster_sizes) {
        // size >= N/K, kept in integers
        if (s * static_cast<long long>(num_nodes) >= total) ++dominant;
    }
    return dominant;
}

double adif(const std::vector<int>& estimates, const std::vector<int>& truths) {
    if (estimates.size() != truths.size()) {
        throw ContractError("adif: estimate and truth lists differ in length");
    }
    if (estimates.empty()) throw ContractError("adif: empty lists");
    double acc = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        acc += std::fabs(static_cast<double>(estimates[i]) - static_cast<double>(truths[i]));
    }
    return acc / static_cast<double>(estimates.size());
}

EvalResult evaluate_predictions(const Matrix& probs, const std::vector<int>& labels,
                                std::size_t num_classes) {
    if (probs.rows != labels.size()) {
        throw ContractError("evaluate_predictions: one label per prediction row required");
    }
    std::vector<int> node_of_sample(probs.rows);
    for (std::size_t r = 0; r < probs.rows; ++r) {
        std::size_t arg = 0;
        for (std::size_t c = 1; c < probs.cols; ++c) {
            if (probs(r, c) > probs(r, arg)) arg = c;
        }
        node_of_sample[r] = static_cast<int>(arg);
    }
    const ContingencyTable table =
        ContingencyTable::from_assignments(node_of_sample, labels, probs.cols, num_classes);
    EvalResult out;
    out.accuracy = clustering_accuracy(table);
    out.nmi_value = nmi(table);
    out.cluster_sizes = table.node_totals();
    out.ndc_value = ndc(out.cluster_sizes, table.total, table.nodes);
    return out;
}

} // namespace pairlearn
