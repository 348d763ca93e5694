#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace zsl {

// All numerics run in double; 32-bit inputs are widened at ingestion.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

using ClassId = std::int64_t;

/// Argmax classification over a candidate set.
struct Prediction {
    std::vector<ClassId> labels;    // one per sample
    Matrix scores;                  // N x |candidates|
    std::vector<ClassId> candidates;
};

/// Thrown on malformed inputs (missing files, bad dimensions, invalid ids).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on invalid numeric arguments or numeric invariant breaches.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace zsl
