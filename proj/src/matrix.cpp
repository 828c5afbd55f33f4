#include "psyling/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>

namespace psyling {

std::string_view to_string(Provenance p) { return p == Provenance::computed ? "computed" : "ingested"; }

std::size_t FeatureMatrix::column_index(std::string_view name) const {
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] == name) return j;
  }
  throw ValidationError("unknown feature '" + std::string(name) + "'; valid: " + join(columns, ", "));
}

bool FeatureMatrix::has_column(std::string_view name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

Eigen::VectorXd FeatureMatrix::encoded_labels() const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) y[static_cast<Eigen::Index>(i)] = encode_label(labels[i]);
  return y;
}

void FeatureMatrix::validate() const {
  const auto r = static_cast<Eigen::Index>(rows());
  const auto c = static_cast<Eigen::Index>(cols());
  if (labels.size() != rows() || provenance.size() != cols() || imputed_counts.size() != cols() ||
      values.rows() != r || values.cols() != c) {
    throw ValidationError("feature matrix shape mismatch");
  }
  if (!values.allFinite()) throw ValidationError("feature matrix contains non-finite values");
}

FeatureMatrix assemble_matrix(const std::vector<FeatureVector>& vectors) {
  FeatureMatrix m;
  for (const auto& info : feature_catalog()) m.columns.emplace_back(info.name);
  m.provenance.assign(kFeatureCount, Provenance::computed);
  m.imputed_counts.assign(kFeatureCount, 0);
  m.values.resize(static_cast<Eigen::Index>(vectors.size()), static_cast<Eigen::Index>(kFeatureCount));

  std::vector<double> sums(kFeatureCount, 0.0);
  std::vector<std::size_t> present(kFeatureCount, 0);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto& v = vectors[i];
    m.row_ids.push_back(v.unit_id);
    m.labels.push_back(v.label);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v.values[j];
    }
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      if (!v.is_imputed(static_cast<FeatureId>(j))) {
        sums[j] += v.values[j];
        ++present[j];
      }
    }
  }
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      if (!vectors[i].is_imputed(static_cast<FeatureId>(j))) continue;
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          present[j] ? sums[j] / static_cast<double>(present[j]) : 0.0;
      ++m.imputed_counts[j];
    }
  }
  m.validate();
  return m;
}

namespace {

FeatureMatrix take_columns(const FeatureMatrix& m, const std::vector<std::size_t>& keep) {
  FeatureMatrix out;
  out.row_ids = m.row_ids;
  out.labels = m.labels;
  out.values.resize(m.values.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const std::size_t j = keep[k];
    out.columns.push_back(m.columns[j]);
    out.provenance.push_back(m.provenance[j]);
    out.imputed_counts.push_back(m.imputed_counts[j]);
    out.values.col(static_cast<Eigen::Index>(k)) = m.values.col(static_cast<Eigen::Index>(j));
  }
  return out;
}

double column_variance(const Eigen::MatrixXd& x, Eigen::Index j) {
  const auto n = x.rows();
  if (n < 2) throw InvalidInput("column variance needs at least two rows");
  const double mean = x.col(j).mean();
  return (x.col(j).array() - mean).square().sum() / static_cast<double>(n - 1);
}

}  // namespace

VarianceFilterResult variance_filter(const FeatureMatrix& m, double threshold) {
  if (!(threshold >= 0.0)) throw InvalidInput("variance threshold must be >= 0");
  m.validate();
  VarianceFilterResult result;
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const double var = column_variance(m.values, static_cast<Eigen::Index>(j));
    if (var < threshold) {
      result.dropped.push_back(m.columns[j]);
      result.dropped_variances.push_back(var);
    } else {
      keep.push_back(j);
    }
  }
  if (keep.empty()) {
    throw DegenerateError("variance filter at " + format_double(threshold) + " would drop all " +
                          std::to_string(m.cols()) + " columns");
  }
  result.matrix = take_columns(m, keep);
  return result;
}

ScalerParams fit_scaler(const std::vector<std::string>& columns, const Eigen::MatrixXd& x, bool allow_constant) {
  if (x.rows() < 2) throw InvalidInput("scaling needs at least two rows");
  ScalerParams p;
  p.columns = columns;
  p.mean = x.colwise().mean().transpose();
  p.sd.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double sd = std::sqrt((x.col(j).array() - p.mean[j]).square().sum() / static_cast<double>(x.rows() - 1));
    if (!(sd > 0.0)) {
      if (!allow_constant) {
        throw DegenerateError("column '" + columns[static_cast<std::size_t>(j)] +
                              "' has zero variance; apply the variance filter first");
      }
      p.sd[j] = 1.0;
    } else {
      p.sd[j] = sd;
    }
  }
  return p;
}

Eigen::MatrixXd ScalerParams::apply(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.size()) throw ValidationError("scaler column count mismatch");
  return (x.rowwise() - mean.transpose()).array().rowwise() / sd.transpose().array();
}

FeatureMatrix ScalerParams::apply(const FeatureMatrix& m) const {
  if (m.columns != columns) throw ValidationError("scaler columns do not match the matrix columns");
  FeatureMatrix out = m;
  out.values = apply(m.values);
  return out;
}

StandardizeResult standardize(const FeatureMatrix& m) {
  m.validate();
  StandardizeResult r;
  r.params = fit_scaler(m.columns, m.values);
  r.matrix = r.params.apply(m);
  return r;
}

FeatureMatrix drop_features(const FeatureMatrix& m, const std::set<std::string>& ids) {
  for (const auto& id : ids) {
    if (!m.has_column(id)) {
      throw ValidationError("cannot drop unknown feature '" + id + "'; valid: " + join(m.columns, ", "));
    }
  }
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (!ids.count(m.columns[j])) keep.push_back(j);
  }
  return take_columns(m, keep);
}

FeatureMatrix select_features(const FeatureMatrix& m, const std::vector<std::string>& ids) {
  std::set<std::string> wanted;
  for (const auto& id : ids) {
    m.column_index(id);
    wanted.insert(id);
  }
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (wanted.count(m.columns[j])) keep.push_back(j);
  }
  return take_columns(m, keep);
}

std::string_view to_string(DropPreset p) {
  switch (p) {
    case DropPreset::a1:
      return "a1";
    case DropPreset::a2:
      return "a2";
    case DropPreset::a3:
      return "a3";
  }
  return "a1";
}

DropPreset parse_drop_preset(std::string_view text) {
  const std::string t = to_lower(trim(text));
  if (t == "a1") return DropPreset::a1;
  if (t == "a2") return DropPreset::a2;
  if (t == "a3") return DropPreset::a3;
  throw ValidationError("unknown analysis preset '" + std::string(text) + "' (expected a1, a2 or a3)");
}

std::set<std::string> preset_columns(DropPreset p) {
  std::set<std::string> out;
  if (p == DropPreset::a1) return out;
  out = {"WC_TOTAL", "SL_MEAN", "SL_SD"};
  if (p == DropPreset::a3) out.insert({"WL_SYL_MEAN", "WL_SYL_SD", "WL_LET_MEAN", "WL_LET_SD"});
  return out;
}

FeatureMatrix parse_external_matrix(std::string_view csv_content, const std::string& label_column,
                                    const std::string& id_column, const std::string& origin) {
  const auto rows = parse_csv(csv_content);
  if (rows.empty()) throw SchemaError(origin + ": empty table");
  const auto& header = rows.front().fields;
  std::optional<std::size_t> label_at, id_at;
  std::vector<std::size_t> feature_at;
  FeatureMatrix m;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name(trim(header[c]));
    if (name == label_column) {
      label_at = c;
    } else if (name == id_column) {
      id_at = c;
    } else {
      feature_at.push_back(c);
      m.columns.push_back(name);
    }
  }
  if (!label_at) throw SchemaError(origin + ": missing label column '" + label_column + "'");
  if (!id_at) throw SchemaError(origin + ": missing id column '" + id_column + "'");
  if (feature_at.empty()) throw SchemaError(origin + ": no feature columns");

  const std::size_t n = rows.size() - 1;
  std::vector<std::vector<std::optional<double>>> cells(n, std::vector<std::optional<double>>(feature_at.size()));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != header.size()) {
      throw SchemaError(origin + ": row at line " + std::to_string(row.line) + " has " +
                        std::to_string(row.fields.size()) + " cells, expected " + std::to_string(header.size()));
    }
    m.row_ids.emplace_back(trim(row.fields[*id_at]));
    m.labels.push_back(parse_source_label(row.fields[*label_at]));
    for (std::size_t k = 0; k < feature_at.size(); ++k) {
      const std::string_view cell = trim(row.fields[feature_at[k]]);
      if (cell.empty()) continue;
      try {
        const double v = parse_double(cell);
        if (!std::isfinite(v)) throw ValidationError("non-finite");
        cells[r - 1][k] = v;
      } catch (const ValidationError&) {
        throw SchemaError(origin + ": non-numeric cell '" + std::string(cell) + "' at line " +
                          std::to_string(row.line) + ", column '" + m.columns[k] + "'");
      }
    }
  }

  m.provenance.assign(m.columns.size(), Provenance::ingested);
  m.imputed_counts.assign(m.columns.size(), 0);
  m.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m.columns.size()));
  for (std::size_t k = 0; k < m.columns.size(); ++k) {
    double sum = 0.0;
    std::size_t present = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (cells[i][k]) {
        sum += *cells[i][k];
        ++present;
      }
    }
    if (present == 0) throw SchemaError(origin + ": column '" + m.columns[k] + "' has no values");
    const double fill = sum / static_cast<double>(present);
    for (std::size_t i = 0; i < n; ++i) {
      double v = fill;
      if (cells[i][k]) {
        v = *cells[i][k];
      } else {
        ++m.imputed_counts[k];
      }
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v;
    }
  }
  m.validate();
  return m;
}

FeatureMatrix ingest_external_matrix(const std::string& path, const std::string& label_column,
                                     const std::string& id_column) {
  return parse_external_matrix(read_file(path), label_column, id_column, path);
}

std::string matrix_to_csv(const FeatureMatrix& m) {
  m.validate();
  std::string out = "id,label";
  for (const auto& c : m.columns) out += "," + csv_escape(c);
  out += "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out += csv_escape(m.row_ids[i]);
    out += ",";
    out += to_string(m.labels[i]);
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out += ",";
      out += format_double(m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out += "\n";
  }
  return out;
}

void write_matrix_csv(const FeatureMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << matrix_to_csv(m);
  if (!out) throw Error("failed writing " + path);
}

FeatureMatrix read_matrix_csv(const std::string& path) {
  FeatureMatrix m = parse_external_matrix(read_file(path), "label", "id", path);
  m.provenance.assign(m.cols(), Provenance::computed);
  return m;
}

}  // namespace psyling
