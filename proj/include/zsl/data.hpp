#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "zsl/types.hpp"

namespace zsl {

struct ClassSplit {
    std::vector<ClassId> seen;   // ordered, disjoint from unseen
    std::vector<ClassId> unseen;

    Index num_seen() const { return static_cast<Index>(seen.size()); }
    Index num_unseen() const { return static_cast<Index>(unseen.size()); }
};

/// Undirected label taxonomy stored as parent->child edges.
struct LabelHierarchy {
    std::vector<std::pair<ClassId, ClassId>> edges;

    /// Adjacency over the undirected graph induced by the edges.
    std::map<ClassId, std::vector<ClassId>> adjacency() const;
};

struct Dataset {
    Matrix features;              // N x D, one row per sample
    std::vector<ClassId> labels;  // dense ids 0..C-1 after loading
    ClassSplit split;             // in dense ids after loading
    std::optional<LabelHierarchy> hierarchy;
    std::vector<ClassId> id_map;  // dense id -> original id

    Index num_samples() const { return features.rows(); }
    Index num_dims() const { return features.cols(); }
};

struct SemanticMatrix {
    Matrix vectors;                 // C x A, row c = a_c
    std::vector<ClassId> class_ids; // dense ids, unique
    // Set when the rows live in predicted-exemplar space: downstream sigma
    // grids must re-scale by the median pairwise distance instead of
    // assuming unit-norm rows.
    bool exemplar_space = false;

    Index rows_for(const std::vector<ClassId>& ids, Matrix& out) const;
};

struct SplitReport {
    std::map<ClassId, Index> seen_counts;
    std::map<ClassId, Index> unseen_counts;
    std::vector<std::string> warnings;
};

struct DataConfig {
    std::filesystem::path features;   // CSV or ZSFM binary
    std::filesystem::path labels;     // one integer per line
    std::filesystem::path attributes; // CSV, first column = class id
    std::filesystem::path split;      // JSON {"seen":[...],"unseen":[...]}
    std::filesystem::path hierarchy;  // optional, "parent child" lines
};

/// Divides each row by its l2 norm. Throws NumericError naming the first
/// zero row.
Matrix l2_normalize_rows(const Matrix& m);

/// Loads features/labels/split (and hierarchy if given), remaps labels to
/// dense 0..C-1 ids and validates every Dataset invariant.
Dataset load_dataset(const DataConfig& config);

/// Loads the semantic CSV against a dataset's id map. Attribute files with
/// one row per image (matched by sample count) are averaged per class before
/// normalization.
SemanticMatrix load_semantics(const std::filesystem::path& path, const Dataset& dataset);

SplitReport validate_split(const Dataset& dataset);

// Raw matrix I/O. The binary format is magic "ZSFM", two uint32 LE
// (rows, cols), then rows*cols float32 LE in row-major order.
Matrix read_matrix_csv(const std::filesystem::path& path);
Matrix read_matrix_zsfm(const std::filesystem::path& path);
void write_matrix_zsfm(const std::filesystem::path& path, const Matrix& m);
Matrix read_feature_matrix(const std::filesystem::path& path);

std::vector<ClassId> read_labels(const std::filesystem::path& path);
ClassSplit read_split_json(const std::filesystem::path& path);
LabelHierarchy read_hierarchy(const std::filesystem::path& path);

} // namespace zsl
