#include "zsl/eval.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace zsl {

double per_class_accuracy(const std::vector<ClassId>& preds, const std::vector<ClassId>& labels,
                          const std::vector<ClassId>& classes) {
    if (preds.size() != labels.size())
        throw DataError("per_class_accuracy: length mismatch");
    std::map<ClassId, std::pair<Index, Index>> counts; // class -> (correct, total)
    for (ClassId c : classes) counts[c] = {0, 0};
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto it = counts.find(labels[i]);
        if (it == counts.end()) continue;
        ++it->second.second;
        if (preds[i] == labels[i]) ++it->second.first;
    }
    double sum = 0.0;
    for (ClassId c : classes) {
        const auto& [correct, total] = counts[c];
        if (total == 0)
            throw DataError("per_class_accuracy: class " + std::to_string(c) +
                            " has no test samples");
        sum += double(correct) / double(total);
    }
    if (classes.empty()) throw DataError("per_class_accuracy: empty class list");
    return sum / double(classes.size());
}

double per_sample_accuracy(const std::vector<ClassId>& preds,
                           const std::vector<ClassId>& labels) {
    if (preds.size() != labels.size())
        throw DataError("per_sample_accuracy: length mismatch");
    if (labels.empty()) throw DataError("per_sample_accuracy: empty input");
    Index correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (preds[i] == labels[i]) ++correct;
    return double(correct) / double(labels.size());
}

namespace {

// Candidate indices of the top-k scores; ties rank the smaller class id first.
std::vector<Index> top_k_indices(const ScoreTable& table, Index row, Index k) {
    std::vector<Index> order(static_cast<std::size_t>(table.scores.cols()));
    std::iota(order.begin(), order.end(), Index(0));
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (table.scores(row, a) != table.scores(row, b))
            return table.scores(row, a) > table.scores(row, b);
        return table.candidate_ids[a] < table.candidate_ids[b];
    });
    order.resize(static_cast<std::size_t>(k));
    return order;
}

} // namespace

double flat_hit_at_k(const ScoreTable& table, Index k) {
    const Index n = table.scores.rows();
    const Index c = table.scores.cols();
    if (k < 1 || k > c) throw DataError("flat_hit_at_k: k out of range");
    if (static_cast<Index>(table.true_labels.size()) != n)
        throw DataError("flat_hit_at_k: label count mismatch");
    Index hits = 0;
    for (Index i = 0; i < n; ++i) {
        for (Index j : top_k_indices(table, i, k))
            if (table.candidate_ids[j] == table.true_labels[static_cast<std::size_t>(i)]) {
                ++hits;
                break;
            }
    }
    return double(hits) / double(n);
}

std::set<ClassId> h_correct_set(const LabelHierarchy& hierarchy, ClassId c, Index k,
                                const std::set<ClassId>& valid) {
    if (!valid.count(c)) throw DataError("h_correct_set: true class not in valid set");
    const auto adj = hierarchy.adjacency();

    std::set<ClassId> collected;
    std::set<ClassId> visited{c};
    std::vector<ClassId> frontier{c};
    if (valid.count(c)) collected.insert(c);
    while (static_cast<Index>(collected.size()) < k) {
        std::vector<ClassId> next;
        for (ClassId node : frontier) {
            auto it = adj.find(node);
            if (it == adj.end()) continue;
            for (ClassId nb : it->second)
                if (visited.insert(nb).second) next.push_back(nb);
        }
        if (next.empty())
            throw DataError("h_correct_set: only " + std::to_string(collected.size()) +
                            " valid nodes reachable, need " + std::to_string(k));
        for (ClassId node : next)
            if (valid.count(node)) collected.insert(node);
        frontier = std::move(next);
    }
    return collected;
}

double hierarchical_precision_at_k(const ScoreTable& table, const LabelHierarchy& hierarchy,
                                   Index k) {
    const Index n = table.scores.rows();
    if (k < 1 || k > table.scores.cols())
        throw DataError("hierarchical_precision_at_k: k out of range");
    const std::set<ClassId> valid(table.candidate_ids.begin(), table.candidate_ids.end());
    double sum = 0.0;
    for (Index i = 0; i < n; ++i) {
        const auto correct =
            h_correct_set(hierarchy, table.true_labels[static_cast<std::size_t>(i)], k, valid);
        Index overlap = 0;
        for (Index j : top_k_indices(table, i, k))
            if (correct.count(table.candidate_ids[j])) ++overlap;
        sum += double(overlap) / double(k);
    }
    return sum / double(n);
}

std::vector<ClassId> argmax_labels(const ScoreTable& table) {
    std::vector<ClassId> out;
    out.reserve(static_cast<std::size_t>(table.scores.rows()));
    for (Index i = 0; i < table.scores.rows(); ++i)
        out.push_back(table.candidate_ids[top_k_indices(table, i, 1).front()]);
    return out;
}

} // namespace zsl
