#include "zsl/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace zsl {

namespace {

void require_file(const std::filesystem::path& p) {
    if (!std::filesystem::exists(p))
        throw DataError("missing file: " + p.string());
}

std::uint32_t read_u32_le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw DataError("truncated ZSFM header");
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
           std::uint32_t(b[3]) << 24;
}

void write_u32_le(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

} // namespace

std::map<ClassId, std::vector<ClassId>> LabelHierarchy::adjacency() const {
    std::map<ClassId, std::vector<ClassId>> adj;
    for (const auto& [p, c] : edges) {
        adj[p].push_back(c);
        adj[c].push_back(p);
    }
    return adj;
}

Index SemanticMatrix::rows_for(const std::vector<ClassId>& ids, Matrix& out) const {
    std::unordered_map<ClassId, Index> pos;
    for (Index i = 0; i < static_cast<Index>(class_ids.size()); ++i) pos[class_ids[i]] = i;
    out.resize(static_cast<Index>(ids.size()), vectors.cols());
    for (Index i = 0; i < static_cast<Index>(ids.size()); ++i) {
        auto it = pos.find(ids[i]);
        if (it == pos.end())
            throw DataError("class id " + std::to_string(ids[i]) + " has no semantic vector");
        out.row(i) = vectors.row(it->second);
    }
    return out.rows();
}

Matrix l2_normalize_rows(const Matrix& m) {
    Matrix out = m;
    for (Index r = 0; r < m.rows(); ++r) {
        const double n = m.row(r).norm();
        if (n == 0.0)
            throw NumericError("cannot normalize all-zero row " + std::to_string(r));
        out.row(r) /= n;
    }
    return out;
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
    require_file(path);
    std::ifstream in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw DataError("ragged CSV row in " + path.string());
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("empty CSV file: " + path.string());
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index r = 0; r < m.rows(); ++r)
        for (Index c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
    return m;
}

Matrix read_matrix_zsfm(const std::filesystem::path& path) {
    require_file(path);
    std::ifstream in(path, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "ZSFM", 4) != 0)
        throw DataError("bad magic in " + path.string());
    const std::uint32_t rows = read_u32_le(in);
    const std::uint32_t cols = read_u32_le(in);
    const std::size_t expect = std::size_t(rows) * cols * 4;
    std::vector<float> buf(std::size_t(rows) * cols);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(expect));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got != expect)
        throw DataError("payload size mismatch in " + path.string() + ": expected " +
                        std::to_string(expect) + " bytes, got " + std::to_string(got));
    Matrix m(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r)
        for (std::uint32_t c = 0; c < cols; ++c)
            m(r, c) = static_cast<double>(buf[std::size_t(r) * cols + c]);
    return m;
}

void write_matrix_zsfm(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    out.write("ZSFM", 4);
    write_u32_le(out, static_cast<std::uint32_t>(m.rows()));
    write_u32_le(out, static_cast<std::uint32_t>(m.cols()));
    std::vector<float> buf(static_cast<std::size_t>(m.rows()) * m.cols());
    for (Index r = 0; r < m.rows(); ++r)
        for (Index c = 0; c < m.cols(); ++c)
            buf[std::size_t(r) * m.cols() + c] = static_cast<float>(m(r, c));
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * 4));
}

Matrix read_feature_matrix(const std::filesystem::path& path) {
    require_file(path);
    std::ifstream in(path, std::ios::binary);
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 4);
    in.close();
    if (std::memcmp(magic, "ZSFM", 4) == 0) return read_matrix_zsfm(path);
    return read_matrix_csv(path);
}

std::vector<ClassId> read_labels(const std::filesystem::path& path) {
    require_file(path);
    std::ifstream in(path);
    std::vector<ClassId> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        labels.push_back(std::stoll(line));
    }
    if (labels.empty()) throw DataError("empty label file: " + path.string());
    return labels;
}

ClassSplit read_split_json(const std::filesystem::path& path) {
    require_file(path);
    std::ifstream in(path);
    nlohmann::json j;
    in >> j;
    ClassSplit split;
    split.seen = j.at("seen").get<std::vector<ClassId>>();
    split.unseen = j.at("unseen").get<std::vector<ClassId>>();
    return split;
}

LabelHierarchy read_hierarchy(const std::filesystem::path& path) {
    require_file(path);
    std::ifstream in(path);
    LabelHierarchy h;
    ClassId parent, child;
    while (in >> parent >> child) {
        if (parent == child) throw DataError("self-loop in hierarchy at node " + std::to_string(parent));
        h.edges.emplace_back(parent, child);
    }
    return h;
}

Dataset load_dataset(const DataConfig& config) {
    Dataset ds;
    ds.features = read_feature_matrix(config.features);
    std::vector<ClassId> raw_labels = read_labels(config.labels);
    ClassSplit raw_split = read_split_json(config.split);

    if (static_cast<Index>(raw_labels.size()) != ds.features.rows())
        throw DataError("dimension mismatch: " + std::to_string(ds.features.rows()) +
                        " feature rows vs " + std::to_string(raw_labels.size()) + " labels");
    if (!ds.features.allFinite()) throw DataError("non-finite value in feature matrix");
    if (raw_split.seen.empty()) throw DataError("split has no seen classes");

    std::unordered_set<ClassId> seen_set(raw_split.seen.begin(), raw_split.seen.end());
    for (ClassId u : raw_split.unseen)
        if (seen_set.count(u))
            throw DataError("class " + std::to_string(u) + " appears in both seen and unseen");

    // Dense remap: seen classes first (in split order), then unseen.
    std::unordered_map<ClassId, ClassId> to_dense;
    for (ClassId c : raw_split.seen) {
        to_dense.emplace(c, static_cast<ClassId>(ds.id_map.size()));
        ds.id_map.push_back(c);
        ds.split.seen.push_back(to_dense[c]);
    }
    for (ClassId c : raw_split.unseen) {
        if (to_dense.count(c)) throw DataError("duplicate class id in split: " + std::to_string(c));
        to_dense.emplace(c, static_cast<ClassId>(ds.id_map.size()));
        ds.id_map.push_back(c);
        ds.split.unseen.push_back(to_dense[c]);
    }

    ds.labels.reserve(raw_labels.size());
    for (ClassId y : raw_labels) {
        auto it = to_dense.find(y);
        if (it == to_dense.end())
            throw DataError("label outside split: " + std::to_string(y));
        ds.labels.push_back(it->second);
    }

    if (!config.hierarchy.empty()) {
        LabelHierarchy raw = read_hierarchy(config.hierarchy);
        LabelHierarchy dense;
        for (auto [p, c] : raw.edges) {
            // Hierarchy nodes that are not classes keep their original ids
            // offset into a disjoint range to avoid colliding with dense ids.
            auto remap = [&](ClassId n) {
                auto it = to_dense.find(n);
                if (it != to_dense.end()) return it->second;
                return n + static_cast<ClassId>(ds.id_map.size());
            };
            dense.edges.emplace_back(remap(p), remap(c));
        }
        ds.hierarchy = std::move(dense);
    }
    return ds;
}

SemanticMatrix load_semantics(const std::filesystem::path& path, const Dataset& dataset) {
    Matrix raw = read_matrix_csv(path);
    if (raw.cols() < 2) throw DataError("semantic CSV needs an id column plus values");
    const Index num_classes = static_cast<Index>(dataset.id_map.size());

    std::unordered_map<ClassId, ClassId> to_dense;
    for (Index i = 0; i < num_classes; ++i) to_dense[dataset.id_map[i]] = i;

    Matrix values = raw.rightCols(raw.cols() - 1);
    if (!values.allFinite()) throw DataError("non-finite value in semantic matrix");

    Matrix per_class;
    if (raw.rows() == dataset.num_samples() && raw.rows() > num_classes) {
        // One row per image: average raw vectors per class, then normalize.
        per_class = Matrix::Zero(num_classes, values.cols());
        Eigen::VectorXi counts = Eigen::VectorXi::Zero(num_classes);
        for (Index r = 0; r < raw.rows(); ++r) {
            auto it = to_dense.find(static_cast<ClassId>(std::llround(raw(r, 0))));
            if (it == to_dense.end())
                throw DataError("semantic row references unknown class id");
            per_class.row(it->second) += values.row(r);
            counts(it->second) += 1;
        }
        for (Index c = 0; c < num_classes; ++c) {
            if (counts(c) == 0)
                throw DataError("no semantic rows for class " + std::to_string(dataset.id_map[c]));
            per_class.row(c) /= counts(c);
        }
    } else {
        per_class.resize(num_classes, values.cols());
        std::vector<bool> filled(num_classes, false);
        for (Index r = 0; r < raw.rows(); ++r) {
            auto id = static_cast<ClassId>(std::llround(raw(r, 0)));
            auto it = to_dense.find(id);
            if (it == to_dense.end())
                throw DataError("semantic row references unknown class id " + std::to_string(id));
            if (filled[it->second])
                throw DataError("duplicate semantic row for class " + std::to_string(id));
            per_class.row(it->second) = values.row(r);
            filled[it->second] = true;
        }
        for (Index c = 0; c < num_classes; ++c)
            if (!filled[c])
                throw DataError("missing semantic vector for class " +
                                std::to_string(dataset.id_map[c]));
    }

    SemanticMatrix sem;
    sem.vectors = l2_normalize_rows(per_class);
    sem.class_ids.resize(num_classes);
    for (Index c = 0; c < num_classes; ++c) sem.class_ids[c] = c;
    return sem;
}

SplitReport validate_split(const Dataset& dataset) {
    SplitReport report;
    std::unordered_set<ClassId> seen(dataset.split.seen.begin(), dataset.split.seen.end());
    std::unordered_set<ClassId> unseen(dataset.split.unseen.begin(), dataset.split.unseen.end());
    for (ClassId c : dataset.split.seen)
        if (unseen.count(c)) throw DataError("class " + std::to_string(c) + " on both sides of the split");
    for (ClassId c : dataset.split.seen) report.seen_counts[c] = 0;
    for (ClassId c : dataset.split.unseen) report.unseen_counts[c] = 0;
    for (ClassId y : dataset.labels) {
        if (seen.count(y)) ++report.seen_counts[y];
        else ++report.unseen_counts[y];
    }
    for (const auto& [c, n] : report.seen_counts)
        if (n == 0)
            report.warnings.push_back("seen class " + std::to_string(c) + " has zero samples");
    return report;
}

} // namespace zsl
