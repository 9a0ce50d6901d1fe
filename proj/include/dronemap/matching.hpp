#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "dronemap/features.hpp"

namespace dronemap {

struct Match {
  std::size_t query_index = 0;
  std::size_t train_index = 0;
  double distance = 0.0;
  // best / second-best distance; 0 when there is no second candidate.
  double ratio = 0.0;

  friend bool operator==(const Match&, const Match&) = default;
};

struct MatchParams {
  double ratio_threshold = 0.8;
  bool use_laplacian_prefilter = true;
  bool cross_check = false;

  void validate() const;
};

struct NearestNeighbors {
  std::size_t best_index = 0;
  double best_distance = 0.0;
  // +infinity when the candidate set has a single element.
  double second_distance = std::numeric_limits<double>::infinity();

  double ratio() const;
};

// Exhaustive nearest and second-nearest search. Ties resolve to the lower index.
NearestNeighbors brute_force_nn(const Descriptor& query, std::span<const Descriptor> train);

// Ratio-test matching of query features against train features. Non-matchable
// (all-zero) descriptors are skipped on both sides. Sorted by ascending
// distance, ties by (query_index, train_index).
std::vector<Match> match_descriptors(std::span<const Feature> query, std::span<const Feature> train,
                                     const MatchParams& params);

}  // namespace dronemap
