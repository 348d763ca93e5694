#pragma once

#include <filesystem>

#include "zsl/conse.hpp"
#include "zsl/exem.hpp"
#include "zsl/sync.hpp"

namespace zsl {

// Models persist as a directory: model.json metadata plus one ZSFM block per
// matrix. Blocks are float32, so a load/save round trip is idempotent after
// the first save.

void save_sync_model(const std::filesystem::path& dir, const SyncModel& model);
SyncModel load_sync_model(const std::filesystem::path& dir);

void save_exemplar_predictor(const std::filesystem::path& dir, const ExemplarPredictor& p);
ExemplarPredictor load_exemplar_predictor(const std::filesystem::path& dir);

void save_conse_model(const std::filesystem::path& dir, const ConseModel& model);
ConseModel load_conse_model(const std::filesystem::path& dir);

/// Reads model.json's "type" field: "sync", "exem", or "conse".
std::string model_type(const std::filesystem::path& dir);

} // namespace zsl
