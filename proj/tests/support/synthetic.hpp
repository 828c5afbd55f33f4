#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "psyling/corpus.hpp"
#include "psyling/matrix.hpp"

namespace psyling::testsupport {

/// Writing style of one synthetic class.
struct Style {
  double pronoun_subject = 0.5;  // share of sentences opening with a personal pronoun
  double connective = 0.1;       // share of sentences opening with a causal/logical connective
  int min_words = 8;             // sentence length range before punctuation
  int max_words = 14;
};

struct CorpusSpec {
  std::size_t human_units = 734;
  std::size_t llm_units = 366;
  int min_sentences = 3;
  int max_sentences = 5;
  Style human{0.65, 0.05, 4, 24};
  Style llm{0.08, 0.65, 12, 16};
  std::uint64_t seed = 7;
};

/// Documents alternating in label, drawn from two templated styles over a
/// small analogy vocabulary. One document is one unit at document granularity.
std::vector<LabeledDocument> synthetic_corpus(const CorpusSpec& spec);

/// Replaces the named columns with seeded standard-normal noise.
FeatureMatrix degrade_columns(const FeatureMatrix& m, const std::vector<std::string>& columns, std::uint64_t seed);

/// Matrix with `rows` rows (alternating labels), `cols` columns named
/// f000..., of which the first `low` have sample variance 0.005 and the
/// rest variance between 0.5 and 2. The names in `rename` replace the
/// first high-variance names in order.
FeatureMatrix variance_fixture(std::size_t rows, std::size_t cols, std::size_t low, std::uint64_t seed,
                               const std::vector<std::string>& rename = {});

/// Rows x sum(block_sizes) matrix in which each block is a noisy copy of
/// its own latent variable; blocks are mutually independent.
Eigen::MatrixXd block_matrix(std::size_t rows, const std::vector<std::size_t>& block_sizes, double noise,
                             std::uint64_t seed);

/// Token stream drawn from a Zipf(s) vocabulary of `vocabulary` types.
std::vector<std::string> zipf_stream(std::size_t tokens, std::size_t vocabulary, double s, std::uint64_t seed);

/// Two Gaussian blobs of `per_blob` points in `dims` dimensions with centers
/// `separation` apart along every axis; labels +1 then -1.
Eigen::MatrixXd blobs(std::size_t per_blob, std::size_t dims, double separation, std::uint64_t seed);

Eigen::MatrixXd random_normal(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// FeatureMatrix wrapper around raw values, columns c0.., labels from +1/-1.
FeatureMatrix make_matrix(const Eigen::MatrixXd& x, const std::vector<int>& labels);

}  // namespace psyling::testsupport
