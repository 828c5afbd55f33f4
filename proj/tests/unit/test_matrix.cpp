#include <cmath>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "psyling/matrix.hpp"
#include "synthetic.hpp"

using namespace psyling;
using testsupport::make_matrix;
using testsupport::random_normal;

namespace {

const std::vector<std::string> kPresetNames = {"WC_TOTAL",    "SL_MEAN",   "SL_SD",       "WL_SYL_MEAN",
                                               "WL_SYL_SD",   "WL_LET_MEAN", "WL_LET_SD"};

std::vector<int> alternating(std::size_t n) {
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = i % 2 ? -1 : 1;
  return y;
}

// Two-pass sample variance.
double variance_scan(const Eigen::MatrixXd& x, Eigen::Index j) {
  double m = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) m += x(i, j);
  m /= static_cast<double>(x.rows());
  double ss = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) ss += (x(i, j) - m) * (x(i, j) - m);
  return ss / static_cast<double>(x.rows() - 1);
}

}  // namespace

TEST(VarianceFilter, Fixture108To78) {
  const auto m = testsupport::variance_fixture(200, 108, 30, 1);
  const auto r = variance_filter(m, 0.01);
  EXPECT_EQ(r.matrix.cols(), 78u);
  ASSERT_EQ(r.dropped.size(), 30u);
  for (std::size_t j = 0; j < 30; ++j) EXPECT_EQ(r.dropped[j], m.columns[j]);
  for (double v : r.dropped_variances) EXPECT_LT(v, 0.01);
}

TEST(VarianceFilter, ConstantColumnAndZeroThreshold) {
  Eigen::MatrixXd x = random_normal(10, 3, 2);
  x.col(1).setConstant(4.0);
  const auto m = make_matrix(x, alternating(10));
  EXPECT_EQ(variance_filter(m, 1e-12).matrix.cols(), 2u);
  const auto same = variance_filter(m, 0.0);
  EXPECT_EQ(same.matrix.columns, m.columns);
  EXPECT_EQ(same.matrix.values, m.values);
  Eigen::MatrixXd flat = Eigen::MatrixXd::Ones(6, 2);
  EXPECT_THROW(variance_filter(make_matrix(flat, alternating(6)), 0.01), DegenerateError);
}

TEST(Presets, ColumnCounts) {
  const auto m = testsupport::variance_fixture(100, 108, 30, 3, kPresetNames);
  const auto filtered = variance_filter(m, 0.01).matrix;
  ASSERT_EQ(filtered.cols(), 78u);
  EXPECT_EQ(drop_features(filtered, preset_columns(DropPreset::a2)).cols(), 75u);
  EXPECT_EQ(drop_features(filtered, preset_columns(DropPreset::a3)).cols(), 71u);
  EXPECT_EQ(drop_features(filtered, preset_columns(DropPreset::a1)).cols(), 78u);
  EXPECT_EQ(preset_columns(DropPreset::a2), (std::set<std::string>{"WC_TOTAL", "SL_MEAN", "SL_SD"}));
  EXPECT_EQ(parse_drop_preset("a3"), DropPreset::a3);
  EXPECT_THROW(parse_drop_preset("a4"), ValidationError);
}

TEST(Drop, IdentityUnknownAndSelect) {
  const auto m = make_matrix(random_normal(8, 4, 4), alternating(8));
  const auto same = drop_features(m, {});
  EXPECT_EQ(same.columns, m.columns);
  EXPECT_EQ(same.values, m.values);
  EXPECT_THROW(drop_features(m, {"nope"}), ValidationError);
  const auto sel = select_features(m, {"c3", "c1"});
  EXPECT_EQ(sel.columns, (std::vector<std::string>{"c1", "c3"}));
  EXPECT_EQ(sel.values.col(1), m.values.col(3));
}

TEST(Standardize, HandArithmetic) {
  Eigen::MatrixXd x(3, 1);
  x << 1, 2, 3;
  const auto s = standardize(make_matrix(x, {1, -1, 1}));
  EXPECT_NEAR(s.matrix.values(0, 0), -1.0, 1e-15);
  EXPECT_NEAR(s.matrix.values(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(s.matrix.values(2, 0), 1.0, 1e-15);
}

TEST(Standardize, ColumnStatsTwoPassOracle) {
  Eigen::MatrixXd x = random_normal(57, 9, 5);
  for (Eigen::Index j = 0; j < x.cols(); ++j) x.col(j) = x.col(j) * (j + 1) * 3.0 + Eigen::VectorXd::Constant(57, j * 10.0);
  const auto s = standardize(make_matrix(x, alternating(57)));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double m = 0;
    for (Eigen::Index i = 0; i < 57; ++i) m += s.matrix.values(i, j);
    EXPECT_LT(std::abs(m / 57), 1e-9);
    EXPECT_LT(std::abs(std::sqrt(variance_scan(s.matrix.values, j)) - 1.0), 1e-9);
    EXPECT_NEAR(s.params.sd(j), std::sqrt(variance_scan(x, j)), 1e-9);
  }
}

TEST(Standardize, Idempotent) {
  const auto once = standardize(make_matrix(random_normal(30, 5, 6) * 4.0, alternating(30))).matrix;
  const auto twice = standardize(once).matrix;
  EXPECT_LT((once.values - twice.values).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Standardize, ZeroVarianceThrows) {
  Eigen::MatrixXd x = random_normal(6, 2, 7);
  x.col(0).setConstant(1.0);
  EXPECT_THROW(standardize(make_matrix(x, alternating(6))), DegenerateError);
}

TEST(Standardize, NeverFailsAfterFilter) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd x = random_normal(12, 6, 100 + trial);
    for (Eigen::Index j = 0; j < 6; ++j)
      if (rng.below(3) == 0) x.col(j).setConstant(rng.normal());
    x.col(0) = random_normal(12, 1, trial);
    const auto m = make_matrix(x, alternating(12));
    EXPECT_NO_THROW(standardize(variance_filter(m, 1e-6).matrix));
  }
}

TEST(Standardize, DropCommutes) {
  const auto m = make_matrix(random_normal(40, 6, 9) * 2.5, alternating(40));
  const std::set<std::string> ids = {"c1", "c4"};
  const auto a = standardize(drop_features(m, ids)).matrix;
  const auto b = drop_features(standardize(m).matrix, ids);
  EXPECT_EQ(a.columns, b.columns);
  EXPECT_LT((a.values - b.values).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Scaler, AppliesTrainingStatistics) {
  const Eigen::MatrixXd train = random_normal(20, 3, 10);
  const Eigen::MatrixXd test = random_normal(5, 3, 11);
  const auto params = fit_scaler({"a", "b", "c"}, train);
  const Eigen::MatrixXd out = params.apply(test);
  for (Eigen::Index j = 0; j < 3; ++j)
    for (Eigen::Index i = 0; i < 5; ++i)
      EXPECT_NEAR(out(i, j), (test(i, j) - train.col(j).mean()) / std::sqrt(variance_scan(train, j)), 1e-12);
  Eigen::MatrixXd flat = train;
  flat.col(2).setConstant(3.0);
  EXPECT_DOUBLE_EQ(fit_scaler({"a", "b", "c"}, flat, true).sd(2), 1.0);
}

TEST(Ingest, RoundTrip) {
  const auto m = parse_external_matrix("id,label,x,y\na,human,1,2\nb,llm,3,4\nc,human,5,6\n");
  ASSERT_EQ(m.rows(), 3u);
  EXPECT_EQ(m.columns, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(m.labels[1], SourceLabel::llm);
  EXPECT_DOUBLE_EQ(m.values(2, 1), 6.0);
  EXPECT_EQ(m.provenance[0], Provenance::ingested);
  EXPECT_EQ(m.imputed_counts, (std::vector<std::size_t>{0, 0}));
}

TEST(Ingest, BlankImputedToMean) {
  const auto m = parse_external_matrix("id,label,x,y\na,human,1,2\nb,llm,,4\nc,human,5,6\n");
  EXPECT_DOUBLE_EQ(m.values(1, 0), 3.0);
  EXPECT_EQ(m.imputed_counts[0], 1u);
  EXPECT_EQ(m.imputed_counts[1], 0u);
}

TEST(Ingest, CustomColumnsAndErrors) {
  const auto m = parse_external_matrix("Group,x,Unit\nllm,1,u1\nhuman,2,u2\n", "Group", "Unit");
  EXPECT_EQ(m.row_ids, (std::vector<std::string>{"u1", "u2"}));
  try {
    parse_external_matrix("id,label,x\na,human,1\nb,llm,oops\n");
    FAIL();
  } catch (const SchemaError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'x'"), std::string::npos) << msg;
  }
  EXPECT_THROW(parse_external_matrix("id,x\na,1\n"), SchemaError);
}

// A 108-column export filtered at 0.01 keeps exactly the columns a direct
// variance scan keeps.
TEST(Ingest, ExportFilterMatchesScan) {
  Rng rng(12);
  std::ostringstream csv;
  csv << "id,label";
  for (int j = 0; j < 108; ++j) csv << ",m" << j;
  csv << "\n";
  Eigen::MatrixXd x(150, 108);
  std::vector<double> scale(108);
  for (auto& s : scale) s = std::pow(10.0, -3.0 + 3.5 * rng.uniform());
  for (int i = 0; i < 150; ++i) {
    csv << "r" << i << "," << (i % 3 ? "human" : "llm");
    for (int j = 0; j < 108; ++j) {
      x(i, j) = scale[j] * rng.normal();
      csv << "," << format_double(x(i, j));
    }
    csv << "\n";
  }
  std::size_t expected = 0;
  for (int j = 0; j < 108; ++j) expected += variance_scan(x, j) >= 0.01;
  const auto m = parse_external_matrix(csv.str());
  EXPECT_EQ(variance_filter(m, 0.01).matrix.cols(), expected);
}

TEST(Assemble, ImputedCellsTakeColumnMean) {
  std::vector<FeatureVector> vs(3);
  for (std::size_t i = 0; i < 3; ++i) {
    vs[i].unit_id = "u" + std::to_string(i);
    vs[i].values.fill(static_cast<double>(i + 1));
  }
  vs[2].values[static_cast<std::size_t>(FeatureId::VOCD_D)] = 0.0;
  vs[2].flags.push_back({FeatureId::VOCD_D, true, "too short"});
  const auto m = assemble_matrix(vs);
  EXPECT_EQ(m.cols(), kFeatureCount);
  const auto j = m.column_index("VOCD_D");
  EXPECT_DOUBLE_EQ(m.values(2, j), 1.5);
  EXPECT_EQ(m.imputed_counts[j], 1u);
}

TEST(MatrixCsv, RoundTripExact) {
  auto m = make_matrix(random_normal(7, 3, 13), alternating(7));
  const auto path = (std::filesystem::temp_directory_path() / "psyling_matrix_roundtrip.csv").string();
  write_matrix_csv(m, path);
  const auto back = read_matrix_csv(path);
  EXPECT_EQ(back.columns, m.columns);
  EXPECT_EQ(back.row_ids, m.row_ids);
  EXPECT_EQ(back.labels, m.labels);
  EXPECT_EQ(back.values, m.values);
  std::filesystem::remove(path);
}
