#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zsl/data.hpp"
#include "zsl/types.hpp"

namespace zsl {

struct FoldPlan {
    std::vector<std::vector<ClassId>> folds; // disjoint class groups
    // Per fold, per class: (train-sample indices, held-sample indices).
    struct SampleSplit {
        std::vector<Index> train;
        std::vector<Index> held;
    };
    std::vector<std::map<ClassId, SampleSplit>> per_fold_sample_split; // empty unless gzsl
};

/// Seeded uniform partition of the seen classes into k near-equal groups.
FoldPlan class_wise_folds(const std::vector<ClassId>& seen_classes, Index k,
                          std::uint64_t seed);

/// Class-wise folds plus a per-class 80/20 sample split (80% side rounds up).
FoldPlan gzsl_folds(const Dataset& dataset, Index k, std::uint64_t seed);

enum class CvObjective { Accuracy, Distance, Ausuc };

CvObjective cv_objective_from_string(const std::string& s);
std::string to_string(CvObjective objective);

using Hyper = std::map<std::string, double>;

/// Cartesian product of the grid in deterministic order: keys sorted, last
/// key varying fastest.
std::vector<Hyper> expand_grid(const std::map<std::string, std::vector<double>>& grid);

/// One CV training/validation task: train on the pseudo-seen classes, score
/// on the pseudo-unseen fold.
struct CvTask {
    std::vector<ClassId> train_classes; // pseudo-seen
    std::vector<ClassId> val_classes;   // pseudo-unseen (held-out fold)
    std::vector<Index> train_samples;
    std::vector<Index> val_samples;
};

struct FoldScore {
    double score = 0.0;
    bool failed = false;
    std::string warning;
    std::optional<double> gamma_star; // set by cv-ausuc evaluators
};

using CellEvaluator = std::function<FoldScore(const Hyper&, const CvTask&)>;

struct CellRecord {
    Hyper hyper;
    std::vector<FoldScore> fold_scores;
    double mean_score = 0.0; // +-infinity when any fold failed
};

struct GridSearchResult {
    Hyper best;
    double best_score = 0.0;
    std::optional<double> gamma_star;
    std::vector<CellRecord> cells;
    std::vector<std::string> warnings;
};

/// Builds the per-fold tasks from the plan, runs every (cell, fold), averages
/// and returns the argmax (argmin for cv-distance; ties to the first cell in
/// grid order). Throws if a pseudo-unseen sample leaks into training.
GridSearchResult grid_search(const Dataset& dataset,
                             const std::map<std::string, std::vector<double>>& grid,
                             const FoldPlan& plan, CvObjective objective,
                             const CellEvaluator& evaluator);

/// Throws DataError if any training sample belongs to a held-out class.
void check_no_leakage(const Dataset& dataset, const CvTask& task);

/// One row per (cell, fold) plus a summary row.
void write_cv_report(const std::filesystem::path& path, const GridSearchResult& result);

} // namespace zsl
