#include "zsl/pipeline.hpp"

#include <algorithm>
#include <set>

#include "zsl/linalg.hpp"

namespace zsl {

MethodName method_from_string(const std::string& s) {
    if (s == "sync-ovo") return MethodName::SyncOvo;
    if (s == "sync-cs") return MethodName::SyncCs;
    if (s == "sync-structured") return MethodName::SyncStructured;
    if (s == "exem-1nn") return MethodName::Exem1nn;
    if (s == "exem-1nns") return MethodName::Exem1nns;
    if (s == "exem-sync-ovo") return MethodName::ExemSyncOvo;
    if (s == "exem-sync-cs") return MethodName::ExemSyncCs;
    if (s == "exem-sync-structured") return MethodName::ExemSyncStructured;
    if (s == "exem-conse") return MethodName::ExemConse;
    if (s == "conse") return MethodName::Conse;
    throw DataError("unknown method: " + s);
}

std::string to_string(MethodName name) {
    switch (name) {
    case MethodName::SyncOvo: return "sync-ovo";
    case MethodName::SyncCs: return "sync-cs";
    case MethodName::SyncStructured: return "sync-structured";
    case MethodName::Exem1nn: return "exem-1nn";
    case MethodName::Exem1nns: return "exem-1nns";
    case MethodName::ExemSyncOvo: return "exem-sync-ovo";
    case MethodName::ExemSyncCs: return "exem-sync-cs";
    case MethodName::ExemSyncStructured: return "exem-sync-structured";
    case MethodName::ExemConse: return "exem-conse";
    default: return "conse";
    }
}

double MethodConfig::get(const std::string& key, double fallback) const {
    auto it = hypers.find(key);
    return it == hypers.end() ? fallback : it->second;
}

namespace {

bool is_sync(MethodName n) {
    return n == MethodName::SyncOvo || n == MethodName::SyncCs ||
           n == MethodName::SyncStructured;
}
bool is_exem_sync(MethodName n) {
    return n == MethodName::ExemSyncOvo || n == MethodName::ExemSyncCs ||
           n == MethodName::ExemSyncStructured;
}
bool is_exem(MethodName n) { return !is_sync(n) && n != MethodName::Conse; }

SyncLoss loss_of(MethodName n) {
    if (n == MethodName::SyncOvo || n == MethodName::ExemSyncOvo) return SyncLoss::OneVsOther;
    if (n == MethodName::SyncCs || n == MethodName::ExemSyncCs) return SyncLoss::CrammerSinger;
    return SyncLoss::Structured;
}

SyncConfig sync_config_from(const MethodConfig& config, const SemanticMatrix& semantics) {
    SyncConfig sc;
    sc.sigma = config.get("sigma", 1.0);
    if (semantics.exemplar_space)
        sc.sigma *= median_pairwise_distance(semantics.vectors);
    sc.lambda = config.get("lambda", 1.0);
    sc.loss_variant = loss_of(config.name);
    sc.regularize_bases = config.get("regularize_bases", 0.0) != 0.0;
    sc.eta = config.get("eta", 0.0);
    sc.gamma_reg = config.get("gamma_reg", 0.0);
    sc.phantom_count = static_cast<Index>(config.get("phantom_count", 0.0));
    if (sc.phantom_count > 0) sc.init = PhantomInit::KMeans;
    sc.seed = config.seed;
    return sc;
}

SyncModel train_sync_part(const Dataset& dataset, const SemanticMatrix& semantics,
                          const MethodConfig& config) {
    const SyncConfig sc = sync_config_from(config, semantics);
    const bool learn_phantoms =
        sc.eta > 0.0 || sc.gamma_reg > 0.0 || config.get("learn_phantoms", 0.0) != 0.0;
    return learn_phantoms ? learn_phantom_semantics(dataset, semantics, sc)
                          : train_sync(dataset, semantics, sc);
}

ExemplarPredictor train_exem_part(const Dataset& dataset, const SemanticMatrix& semantics,
                                  const MethodConfig& config) {
    const Index s = dataset.split.num_seen();
    Index d = static_cast<Index>(config.get("d", 0.0));
    if (d <= 0) d = std::min({s, dataset.num_dims(), Index(25)});

    Matrix a_seen;
    if (semantics.rows_for(dataset.split.seen, a_seen) != s)
        throw DataError("train_method: semantics missing for a seen class");

    ExemHyper hyper;
    hyper.lambda = config.get("lambda_svr", double(s));
    hyper.nu = config.get("nu", 0.5);
    hyper.kernel.bandwidth = config.get("bandwidth", 0.0);
    if (hyper.kernel.bandwidth <= 0.0)
        hyper.kernel.bandwidth = median_pairwise_distance(a_seen);
    return fit_exemplar_predictor(dataset, semantics, d, hyper);
}

SemanticMatrix exem_semantics(const ExemplarPredictor& p, const SemanticMatrix& semantics) {
    return exemplars_as_semantics(predict_exemplars(p, semantics));
}

SemanticMatrix subset_semantics(const SemanticMatrix& semantics,
                                const std::vector<ClassId>& ids) {
    SemanticMatrix out;
    if (semantics.rows_for(ids, out.vectors) != static_cast<Index>(ids.size()))
        throw DataError("score_method: semantics missing for a candidate class");
    out.class_ids = ids;
    out.exemplar_space = semantics.exemplar_space;
    return out;
}

} // namespace

TrainedMethod train_method(const Dataset& dataset, const SemanticMatrix& semantics,
                           const MethodConfig& config) {
    TrainedMethod t;
    t.name = config.name;
    if (is_sync(config.name)) {
        t.sync = train_sync_part(dataset, semantics, config);
        t.converged = t.sync->converged;
        return t;
    }
    if (config.name == MethodName::Conse) {
        ConseConfig cc;
        cc.reg = config.get("reg", 1e-3);
        cc.top_t = static_cast<Index>(config.get("top_t", 10.0));
        cc.top_t = std::min(cc.top_t, dataset.split.num_seen());
        t.conse = train_conse(dataset, semantics, cc);
        t.converged = t.conse->converged;
        return t;
    }

    t.exem = train_exem_part(dataset, semantics, config);
    for (const auto& r : t.exem->regressors)
        if (!r.converged) t.converged = false;

    if (is_exem_sync(config.name)) {
        const SemanticMatrix es = exem_semantics(*t.exem, semantics);
        t.sync = train_sync_part(dataset, es, config);
        t.converged = t.converged && t.sync->converged;
    } else if (config.name == MethodName::ExemConse) {
        const SemanticMatrix es = exem_semantics(*t.exem, semantics);
        ConseConfig cc;
        cc.reg = config.get("reg", 1e-3);
        cc.top_t = static_cast<Index>(config.get("top_t", 10.0));
        cc.top_t = std::min(cc.top_t, dataset.split.num_seen());
        t.conse = train_conse(dataset, es, cc);
        t.converged = t.converged && t.conse->converged;
    }
    return t;
}

Prediction score_method(const TrainedMethod& trained, const SemanticMatrix& semantics,
                        const Matrix& x, const std::vector<ClassId>& restrict_ids) {
    if (restrict_ids.empty()) throw DataError("score_method: empty candidate set");
    switch (trained.name) {
    case MethodName::SyncOvo:
    case MethodName::SyncCs:
    case MethodName::SyncStructured:
        return predict_sync(*trained.sync, semantics, x, restrict_ids);
    case MethodName::Exem1nn:
    case MethodName::Exem1nns: {
        const ExemplarSet exemplars =
            predict_exemplars(*trained.exem, subset_semantics(semantics, restrict_ids));
        const bool standardized = trained.name == MethodName::Exem1nns;
        const NearestExemplarResult r = classify_nearest_exemplar(
            exemplars, x, trained.exem->pca,
            standardized ? ExemplarMetric::Standardized : ExemplarMetric::Euclidean,
            trained.exem->intra_class_std);
        Prediction p;
        p.labels = r.labels;
        p.scores = -r.distances;
        p.candidates = restrict_ids;
        return p;
    }
    case MethodName::ExemSyncOvo:
    case MethodName::ExemSyncCs:
    case MethodName::ExemSyncStructured: {
        const SemanticMatrix es = exem_semantics(*trained.exem, semantics);
        return predict_sync(*trained.sync, es, x, restrict_ids);
    }
    case MethodName::ExemConse: {
        const SemanticMatrix es = exem_semantics(*trained.exem, semantics);
        return predict_conse(*trained.conse, es, x, restrict_ids);
    }
    default:
        return predict_conse(*trained.conse, semantics, x, restrict_ids);
    }
}

std::pair<Matrix, std::vector<ClassId>> samples_of(const Dataset& dataset,
                                                   const std::vector<ClassId>& classes) {
    const std::set<ClassId> wanted(classes.begin(), classes.end());
    std::vector<Index> rows;
    std::vector<ClassId> labels;
    for (Index i = 0; i < dataset.num_samples(); ++i)
        if (wanted.count(dataset.labels[i])) {
            rows.push_back(i);
            labels.push_back(dataset.labels[i]);
        }
    Matrix x(static_cast<Index>(rows.size()), dataset.num_dims());
    for (Index i = 0; i < x.rows(); ++i) x.row(i) = dataset.features.row(rows[i]);
    return {std::move(x), std::move(labels)};
}

} // namespace zsl
