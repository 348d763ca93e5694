#pragma once

#include <optional>
#include <string>

#include "zsl/conse.hpp"
#include "zsl/cv.hpp"
#include "zsl/data.hpp"
#include "zsl/exem.hpp"
#include "zsl/sync.hpp"

namespace zsl {

enum class MethodName {
    SyncOvo,
    SyncCs,
    SyncStructured,
    Exem1nn,
    Exem1nns,
    ExemSyncOvo,
    ExemSyncCs,
    ExemSyncStructured,
    ExemConse,
    Conse,
};

MethodName method_from_string(const std::string& s);
std::string to_string(MethodName name);

/// Hypers (defaults in parentheses): sigma (1), lambda (1), nu (0.5),
/// bandwidth (0: median heuristic), d (0: min(S, D, 25)), top_t (10),
/// reg (1e-3), phantom_count (0: R = S), eta (0), gamma_reg (0).
struct MethodConfig {
    MethodName name = MethodName::SyncOvo;
    Hyper hypers;
    std::uint64_t seed = 0;

    double get(const std::string& key, double fallback) const;
};

struct TrainedMethod {
    MethodName name = MethodName::SyncOvo;
    std::optional<SyncModel> sync;
    std::optional<ExemplarPredictor> exem;
    std::optional<ConseModel> conse;
    bool converged = true;
};

/// Trains the method on the dataset's seen classes. For exem-* composites
/// the downstream model consumes predicted exemplars as semantics, with
/// sigma/bandwidth grids rescaled by the median pairwise exemplar distance.
TrainedMethod train_method(const Dataset& dataset, const SemanticMatrix& semantics,
                           const MethodConfig& config);

/// Scores `x` against the candidate classes; higher is better for every
/// method (distances are negated).
Prediction score_method(const TrainedMethod& trained, const SemanticMatrix& semantics,
                        const Matrix& x, const std::vector<ClassId>& restrict_ids);

/// Rows of `dataset.features` whose label is in `classes`, with labels.
std::pair<Matrix, std::vector<ClassId>> samples_of(const Dataset& dataset,
                                                   const std::vector<ClassId>& classes);

} // namespace zsl
