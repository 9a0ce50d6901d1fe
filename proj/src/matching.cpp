#include "dronemap/matching.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>

namespace dronemap {

void MatchParams::validate() const {
  if (!(ratio_threshold > 0.0 && ratio_threshold <= 1.0)) {
    throw Error(Errc::InvalidConfig, "matcher.ratio_threshold must be in (0, 1]");
  }
}

double NearestNeighbors::ratio() const {
  if (std::isinf(second_distance)) return 0.0;
  if (second_distance == 0.0) return best_distance == 0.0 ? 1.0 : 0.0;
  return best_distance / second_distance;
}

NearestNeighbors brute_force_nn(const Descriptor& query, std::span<const Descriptor> train) {
  if (train.empty()) throw Error(Errc::EmptyInput, "nearest-neighbor search needs a non-empty train set");
  NearestNeighbors nn;
  nn.best_distance = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < train.size(); ++k) {
    const double d = descriptor_distance(query, train[k]);
    if (d < nn.best_distance) {
      nn.second_distance = nn.best_distance;
      nn.best_distance = d;
      nn.best_index = k;
    } else if (d < nn.second_distance) {
      nn.second_distance = d;
    }
  }
  return nn;
}

namespace {

struct Candidate {
  std::size_t index;
  double best;
  double second;
};

// Nearest and second-nearest among matchable train features passing the prefilter.
std::optional<Candidate> search(const Feature& q, std::span<const Feature> train, bool prefilter) {
  std::optional<Candidate> out;
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  std::size_t best_index = 0;
  for (std::size_t k = 0; k < train.size(); ++k) {
    const Feature& t = train[k];
    if (prefilter && t.point.laplacian_sign != q.point.laplacian_sign) continue;
    if (!t.descriptor.matchable()) continue;
    const double d = descriptor_distance(q.descriptor, t.descriptor);
    if (d < best) {
      second = best;
      best = d;
      best_index = k;
    } else if (d < second) {
      second = d;
    }
  }
  if (std::isinf(best)) return out;
  return Candidate{best_index, best, second};
}

}  // namespace

std::vector<Match> match_descriptors(std::span<const Feature> query, std::span<const Feature> train,
                                     const MatchParams& params) {
  params.validate();
  if (query.empty() || train.empty()) throw Error(Errc::EmptyInput, "matching needs two non-empty feature sets");

  std::vector<Match> matches;
  for (std::size_t qi = 0; qi < query.size(); ++qi) {
    const Feature& q = query[qi];
    if (!q.descriptor.matchable()) continue;
    const auto c = search(q, train, params.use_laplacian_prefilter);
    if (!c) continue;
    const NearestNeighbors nn{c->index, c->best, c->second};
    const double ratio = nn.ratio();
    if (!(ratio < params.ratio_threshold)) continue;
    if (params.cross_check) {
      const auto back = search(train[c->index], query, params.use_laplacian_prefilter);
      // Both directions must pass the ratio test so the result is symmetric under swapping.
      if (!back || back->index != qi) continue;
      if (!(NearestNeighbors{back->index, back->best, back->second}.ratio() < params.ratio_threshold)) continue;
    }
    matches.push_back({qi, c->index, c->best, ratio});
  }

  std::sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) {
    return std::tie(a.distance, a.query_index, a.train_index) < std::tie(b.distance, b.query_index, b.train_index);
  });
  return matches;
}

}  // namespace dronemap
