#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "psyling/common.hpp"
#include "psyling/features.hpp"

namespace psyling {

enum class Provenance { computed, ingested };
std::string_view to_string(Provenance p);

/// Rectangular, fully populated design matrix. Transformations return new
/// matrices.
struct FeatureMatrix {
  std::vector<std::string> row_ids;
  std::vector<SourceLabel> labels;
  std::vector<std::string> columns;
  std::vector<Provenance> provenance;        // per column
  std::vector<std::size_t> imputed_counts;   // per column
  Eigen::MatrixXd values;                    // rows x columns

  std::size_t rows() const { return row_ids.size(); }
  std::size_t cols() const { return columns.size(); }
  /// Index of a column; throws ValidationError listing the columns when absent.
  std::size_t column_index(std::string_view name) const;
  bool has_column(std::string_view name) const;
  /// Labels as +1 (human) / -1 (llm).
  Eigen::VectorXd encoded_labels() const;
  /// Throws ValidationError unless the shapes agree and every value is finite.
  void validate() const;
};

/// Builds the matrix from feature vectors. Cells flagged as imputed are
/// replaced with the mean of the unflagged cells of their column (0 when
/// the whole column is flagged) and counted.
FeatureMatrix assemble_matrix(const std::vector<FeatureVector>& vectors);

struct VarianceFilterResult {
  FeatureMatrix matrix;
  std::vector<std::string> dropped;
  std::vector<double> dropped_variances;
};

/// Drops columns whose sample variance is below `threshold`. Throws
/// DegenerateError when every column would be dropped.
VarianceFilterResult variance_filter(const FeatureMatrix& m, double threshold);

struct ScalerParams {
  std::vector<std::string> columns;
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;  // sample SD

  /// Applies the stored transform; columns must match in order.
  FeatureMatrix apply(const FeatureMatrix& m) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

/// Fits mean/sample-SD per column. With `allow_constant`, a zero-variance
/// column gets sd = 1 instead of raising DegenerateError.
ScalerParams fit_scaler(const std::vector<std::string>& columns, const Eigen::MatrixXd& x,
                        bool allow_constant = false);

struct StandardizeResult {
  FeatureMatrix matrix;
  ScalerParams params;
};

/// Columns to mean 0, sample SD 1. Throws DegenerateError on a zero-variance column.
StandardizeResult standardize(const FeatureMatrix& m);

/// Column subset without `ids`. Throws ValidationError for a name not in the matrix.
FeatureMatrix drop_features(const FeatureMatrix& m, const std::set<std::string>& ids);
/// Keeps only `ids`, in matrix column order.
FeatureMatrix select_features(const FeatureMatrix& m, const std::vector<std::string>& ids);

enum class DropPreset { a1, a2, a3 };
std::string_view to_string(DropPreset p);
DropPreset parse_drop_preset(std::string_view text);
/// a1: nothing; a2: word count and sentence length; a3: a2 plus word length.
std::set<std::string> preset_columns(DropPreset p);

/// Reads a table with a header. `label_column` and `id_column` name the
/// label and id columns; every other column is a feature. Blank cells are
/// imputed with the column mean and counted. Non-numeric cells throw
/// SchemaError naming the row and column.
FeatureMatrix ingest_external_matrix(const std::string& path, const std::string& label_column = "label",
                                     const std::string& id_column = "id");
FeatureMatrix parse_external_matrix(std::string_view csv_content, const std::string& label_column = "label",
                                    const std::string& id_column = "id", const std::string& origin = "<memory>");

/// Matrix CSV: id,label,<features...>; doubles in shortest round-trip form.
std::string matrix_to_csv(const FeatureMatrix& m);
void write_matrix_csv(const FeatureMatrix& m, const std::string& path);
/// Reads the format written by write_matrix_csv (provenance = computed).
FeatureMatrix read_matrix_csv(const std::string& path);

}  // namespace psyling
