#pragma once

#include "gnar/gnar.hpp"

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

namespace gnar::testing {

inline std::string data_dir() {
  if (const char* env = std::getenv("GNAR_FIXTURE_DIR"); env && *env) return env;
  return GNAR_TEST_DATA_DIR;
}

// Connected random graph: a random spanning tree plus extra edges with probability p_extra.
inline Network random_network(std::mt19937_64& rng, int d, double p_extra) {
  std::vector<std::pair<int, int>> edges;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int v = 2; v <= d; ++v) {
    std::uniform_int_distribution<int> pick(1, v - 1);
    edges.emplace_back(pick(rng), v);
  }
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j)
      if (U(rng) < p_extra) {
        bool dup = false;
        for (auto [a, b] : edges) dup |= (a == i && b == j);
        if (!dup) edges.emplace_back(i, j);
      }
  return build_network(edges, d);
}

// Every community gets at least one node.
inline CommunityPartition random_partition(std::mt19937_64& rng, int d, int C) {
  std::vector<int> labels(d);
  std::uniform_int_distribution<int> pick(1, C);
  for (int i = 0; i < d; ++i) labels[i] = i < C ? i + 1 : pick(rng);
  std::shuffle(labels.begin(), labels.end(), rng);
  return CommunityPartition(labels, C);
}

inline ModelOrder random_order(std::mt19937_64& rng, int C, int max_p, int max_s, bool interactions) {
  ModelOrder order;
  std::uniform_int_distribution<int> P(1, max_p), S(0, max_s);
  std::bernoulli_distribution coin(0.5);
  for (int c = 0; c < C; ++c) {
    CommunityOrder co;
    co.p = P(rng);
    for (int k = 0; k < co.p; ++k) co.s.push_back(S(rng));
    if (interactions)
      for (int o = 0; o < C; ++o)
        if (o != c && coin(rng)) co.interactions.push_back(o);
    order.communities.push_back(co);
  }
  return order;
}

}  // namespace gnar::testing
