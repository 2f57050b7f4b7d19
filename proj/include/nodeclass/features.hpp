#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nodeclass/community.hpp"
#include "nodeclass/graph.hpp"

namespace nodeclass {

enum class Feature : std::uint8_t {
  kDegree,
  kClustering,
  kBetweenness,
  kEigenvector,
  kCloseness,
  kCoreness,
  kLinkDiversity,
};

inline constexpr std::size_t kNumFeatures = 7;

std::string_view feature_name(Feature f);
// Column set in canonical order; lightweight drops betweenness and closeness.
std::vector<Feature> feature_set(bool lightweight);

struct FeatureVector {
  double degree_centrality = 0.0;
  double clustering = 0.0;
  double betweenness = 0.0;
  double eigenvector = 0.0;
  double closeness = 0.0;
  std::uint32_t coreness = 0;
  double link_diversity = 0.0;

  double get(Feature f) const;
};

/// Node-by-feature matrix, row-major. Row i describes node i.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<FeatureVector> rows, bool lightweight);

  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_cols() const { return columns_.size(); }
  bool lightweight() const { return lightweight_; }
  std::span<const Feature> columns() const { return columns_; }
  std::vector<std::string> feature_names() const;

  const FeatureVector& row(std::size_t i) const { return rows_[i]; }
  double at(std::size_t row, std::size_t col) const { return rows_[row].get(columns_[col]); }
  // Flattened row-major values restricted to the active columns.
  std::vector<double> values() const;

  // `node_id,<feature names...>` with one line per node.
  std::string to_csv() const;

 private:
  std::vector<FeatureVector> rows_;
  std::vector<Feature> columns_;
  bool lightweight_ = false;
};

std::vector<double> degree_centrality(const Graph& g);
std::vector<double> local_clustering(const Graph& g);
std::vector<double> betweenness(const Graph& g);
std::vector<double> closeness(const Graph& g);

struct EigenvectorResult {
  std::vector<double> values;
  bool converged = false;
  std::size_t iterations = 0;
};

inline constexpr double kEigenTolerance = 1e-8;
inline constexpr std::size_t kEigenMaxIterations = 1000;

EigenvectorResult eigenvector_centrality(const Graph& g, double tol = kEigenTolerance,
                                         std::size_t max_iter = kEigenMaxIterations);

std::vector<std::uint32_t> coreness(const Graph& g);
std::vector<double> link_diversity(const Graph& g, const Partition& partition);

FeatureMatrix extract_features(const Graph& g, bool lightweight, std::uint64_t seed);

}  // namespace nodeclass
