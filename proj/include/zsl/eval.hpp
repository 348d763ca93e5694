#pragma once

#include <set>
#include <vector>

#include "zsl/data.hpp"
#include "zsl/types.hpp"

namespace zsl {

struct ScoreTable {
    Matrix scores;                   // N x C, higher = better
    std::vector<ClassId> candidate_ids;
    std::vector<ClassId> true_labels;
};

/// Mean over `classes` of that class's correct fraction.
double per_class_accuracy(const std::vector<ClassId>& preds, const std::vector<ClassId>& labels,
                          const std::vector<ClassId>& classes);

double per_sample_accuracy(const std::vector<ClassId>& preds,
                           const std::vector<ClassId>& labels);

/// Fraction of samples whose true label ranks in the top k; score ties rank
/// the smaller class id first.
double flat_hit_at_k(const ScoreTable& table, Index k);

/// Algorithm: grow the undirected-hop radius around c, collecting valid
/// nodes, until at least k are gathered.
std::set<ClassId> h_correct_set(const LabelHierarchy& hierarchy, ClassId c, Index k,
                                const std::set<ClassId>& valid);

/// Mean over samples of |top-k predictions ∩ h_correct_set(true, k)| / k.
double hierarchical_precision_at_k(const ScoreTable& table, const LabelHierarchy& hierarchy,
                                   Index k);

/// Argmax labels of a score table, ties to the smallest class id.
std::vector<ClassId> argmax_labels(const ScoreTable& table);

} // namespace zsl
