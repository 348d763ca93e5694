#include "zsl/cv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace zsl {

FoldPlan class_wise_folds(const std::vector<ClassId>& seen_classes, Index k,
                          std::uint64_t seed) {
    const Index s = static_cast<Index>(seen_classes.size());
    if (k < 2 || k > s) throw DataError("class_wise_folds: k outside [2, |classes|]");
    std::vector<ClassId> shuffled = seen_classes;
    std::mt19937_64 rng(seed);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);

    FoldPlan plan;
    plan.folds.resize(static_cast<std::size_t>(k));
    for (Index i = 0; i < s; ++i)
        plan.folds[static_cast<std::size_t>(i % k)].push_back(shuffled[static_cast<std::size_t>(i)]);
    for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
    return plan;
}

FoldPlan gzsl_folds(const Dataset& dataset, Index k, std::uint64_t seed) {
    FoldPlan plan = class_wise_folds(dataset.split.seen, k, seed);
    std::mt19937_64 rng(seed + 1);

    std::map<ClassId, std::vector<Index>> by_class;
    for (Index i = 0; i < dataset.num_samples(); ++i)
        by_class[dataset.labels[i]].push_back(i);

    plan.per_fold_sample_split.resize(plan.folds.size());
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        for (ClassId c : plan.folds[f]) {
            auto samples = by_class[c];
            if (samples.size() < 2)
                throw DataError("gzsl_folds: class " + std::to_string(c) +
                                " has fewer than 2 samples");
            std::shuffle(samples.begin(), samples.end(), rng);
            const std::size_t train_count =
                (samples.size() * 4 + 4) / 5; // 80%, ceil on the train side
            FoldPlan::SampleSplit split;
            split.train.assign(samples.begin(), samples.begin() + train_count);
            split.held.assign(samples.begin() + train_count, samples.end());
            std::sort(split.train.begin(), split.train.end());
            std::sort(split.held.begin(), split.held.end());
            plan.per_fold_sample_split[f][c] = std::move(split);
        }
    }
    return plan;
}

CvObjective cv_objective_from_string(const std::string& s) {
    if (s == "cv-accuracy") return CvObjective::Accuracy;
    if (s == "cv-distance") return CvObjective::Distance;
    if (s == "cv-ausuc") return CvObjective::Ausuc;
    throw DataError("unknown cv objective: " + s);
}

std::string to_string(CvObjective objective) {
    switch (objective) {
    case CvObjective::Accuracy: return "cv-accuracy";
    case CvObjective::Distance: return "cv-distance";
    default: return "cv-ausuc";
    }
}

std::vector<Hyper> expand_grid(const std::map<std::string, std::vector<double>>& grid) {
    if (grid.empty()) throw DataError("expand_grid: empty grid");
    for (const auto& [name, values] : grid)
        if (values.empty()) throw DataError("expand_grid: empty value list for " + name);
    std::vector<Hyper> cells{Hyper{}};
    for (const auto& [name, values] : grid) { // std::map iterates keys sorted
        std::vector<Hyper> next;
        next.reserve(cells.size() * values.size());
        for (const auto& cell : cells)
            for (double v : values) {
                Hyper h = cell;
                h[name] = v;
                next.push_back(std::move(h));
            }
        cells = std::move(next);
    }
    return cells;
}

void check_no_leakage(const Dataset& dataset, const CvTask& task) {
    const std::set<ClassId> held(task.val_classes.begin(), task.val_classes.end());
    for (Index i : task.train_samples)
        if (held.count(dataset.labels[i]))
            throw DataError("cv leakage: training sample " + std::to_string(i) +
                            " belongs to held-out class " +
                            std::to_string(dataset.labels[i]));
}

namespace {

std::vector<CvTask> build_tasks(const Dataset& dataset, const FoldPlan& plan) {
    std::vector<CvTask> tasks;
    const bool gzsl = !plan.per_fold_sample_split.empty();
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        CvTask task;
        task.val_classes = plan.folds[f];
        for (std::size_t g = 0; g < plan.folds.size(); ++g)
            if (g != f)
                task.train_classes.insert(task.train_classes.end(), plan.folds[g].begin(),
                                          plan.folds[g].end());
        std::sort(task.train_classes.begin(), task.train_classes.end());

        const std::set<ClassId> train_set(task.train_classes.begin(),
                                          task.train_classes.end());
        const std::set<ClassId> val_set(task.val_classes.begin(), task.val_classes.end());
        if (gzsl) {
            // Train on the 80% side of the retained folds; validate on the
            // held 20% of those classes plus the whole pseudo-unseen fold.
            for (std::size_t g = 0; g < plan.folds.size(); ++g) {
                if (g == f) continue;
                for (const auto& [cls, split] : plan.per_fold_sample_split[g]) {
                    task.train_samples.insert(task.train_samples.end(), split.train.begin(),
                                              split.train.end());
                    task.val_samples.insert(task.val_samples.end(), split.held.begin(),
                                            split.held.end());
                }
            }
            for (Index i = 0; i < dataset.num_samples(); ++i)
                if (val_set.count(dataset.labels[i])) task.val_samples.push_back(i);
        } else {
            for (Index i = 0; i < dataset.num_samples(); ++i) {
                if (train_set.count(dataset.labels[i])) task.train_samples.push_back(i);
                else if (val_set.count(dataset.labels[i])) task.val_samples.push_back(i);
            }
        }
        std::sort(task.train_samples.begin(), task.train_samples.end());
        std::sort(task.val_samples.begin(), task.val_samples.end());
        tasks.push_back(std::move(task));
    }
    return tasks;
}

} // namespace

GridSearchResult grid_search(const Dataset& dataset,
                             const std::map<std::string, std::vector<double>>& grid,
                             const FoldPlan& plan, CvObjective objective,
                             const CellEvaluator& evaluator) {
    const auto cells = expand_grid(grid);
    const auto tasks = build_tasks(dataset, plan);
    const bool minimize = objective == CvObjective::Distance;
    const double failed_score = minimize ? std::numeric_limits<double>::infinity()
                                         : -std::numeric_limits<double>::infinity();

    GridSearchResult result;
    result.best_score = failed_score;
    for (const auto& hyper : cells) {
        CellRecord record;
        record.hyper = hyper;
        bool any_failed = false;
        double sum = 0.0;
        std::optional<double> gamma;
        for (const auto& task : tasks) {
            check_no_leakage(dataset, task);
            FoldScore fs;
            try {
                fs = evaluator(hyper, task);
            } catch (const std::exception& e) {
                fs.failed = true;
                fs.warning = e.what();
            }
            if (fs.failed) {
                any_failed = true;
                std::ostringstream msg;
                msg << "cell";
                for (const auto& [name, value] : hyper) msg << " " << name << "=" << value;
                msg << " fold failed: " << fs.warning;
                result.warnings.push_back(msg.str());
            } else {
                sum += fs.score;
                if (fs.gamma_star) gamma = fs.gamma_star;
            }
            record.fold_scores.push_back(std::move(fs));
        }
        record.mean_score = any_failed ? failed_score : sum / double(tasks.size());
        const bool better = minimize ? record.mean_score < result.best_score
                                     : record.mean_score > result.best_score;
        if (result.best.empty() || better) {
            result.best = hyper;
            result.best_score = record.mean_score;
            result.gamma_star = gamma;
        }
        result.cells.push_back(std::move(record));
    }
    return result;
}

void write_cv_report(const std::filesystem::path& path, const GridSearchResult& result) {
    std::ostringstream out;
    out << "cell,fold";
    std::vector<std::string> names;
    if (!result.cells.empty())
        for (const auto& [name, value] : result.cells.front().hyper) names.push_back(name);
    for (const auto& name : names) out << "," << name;
    out << ",score,failed,warning\n";
    for (std::size_t c = 0; c < result.cells.size(); ++c) {
        const auto& record = result.cells[c];
        for (std::size_t f = 0; f < record.fold_scores.size(); ++f) {
            const auto& fs = record.fold_scores[f];
            out << c << "," << f;
            for (const auto& name : names) out << "," << record.hyper.at(name);
            out << "," << fs.score << "," << (fs.failed ? 1 : 0) << ",\""
                << fs.warning << "\"\n";
        }
    }
    out << "summary,";
    for (const auto& name : names) out << "," << (result.best.count(name) ? result.best.at(name) : 0.0);
    out << "," << result.best_score << ",0,\"best cell\"\n";

    if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp);
        if (!f) throw DataError("write_cv_report: cannot open " + tmp.string());
        f << out.str();
    }
    std::filesystem::rename(tmp, path);
}

} // namespace zsl
