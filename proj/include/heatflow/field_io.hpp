#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace heatflow {

/// Per-vertex real values aligned with a mesh (vertex i at row i).
using ScalarField = Eigen::VectorXd;

enum class StackAxis { subjects, scales };

/// N x S matrix of per-vertex values; one column per subject or per scale.
struct FieldStack {
  Eigen::MatrixXd values;
  std::vector<std::string> labels;  // one per column
  StackAxis axis = StackAxis::scales;

  Eigen::Index num_vertices() const { return values.rows(); }
  Eigen::Index num_columns() const { return values.cols(); }

  /// Throws DimensionError / NumericError when labels and columns disagree or
  /// values are not finite.
  void validate() const;
};

/// Shortest decimal text with 17 significant digits ("%.17g").
std::string format_double(double value);

/// One value per line, row i = vertex i.
void write_field_csv(const std::filesystem::path& path, const ScalarField& field);
ScalarField read_field_csv(const std::filesystem::path& path);

/// Header row of column labels followed by one comma-separated row per vertex.
void write_stack_csv(const std::filesystem::path& path, const FieldStack& stack);

/// Reads a comma-separated table whose first non-empty row is the header.
FieldStack read_stack_csv(const std::filesystem::path& path, StackAxis axis);

}  // namespace heatflow
