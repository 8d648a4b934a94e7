//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Writes a seeded corpus of small C/N/O/F molecules in the dataset format:
// random tree growth under the valence table plus occasional ring closures
// of size 3 to 7, deduplicated by canonical key.

#include <array>
#include <iostream>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "moldream/molgraph.h"
#include "moldream/rng.h"

namespace {

using namespace moldream;

Element pick_element(std::mt19937_64 &rng) {
  const double u = uniform01(rng);
  if (u < 0.66)
    return Element::kC;
  if (u < 0.80)
    return Element::kN;
  if (u < 0.96)
    return Element::kO;
  return Element::kF;
}

int pick_order(std::mt19937_64 &rng, int limit) {
  const double u = uniform01(rng);
  int order = u < 0.78 ? 1 : (u < 0.94 ? 2 : 3);
  return std::min(order, limit);
}

int graph_distance(const MolecularGraph &g, int a, int b) {
  std::vector<int> dist(g.num_atoms(), -1);
  std::queue<int> q;
  dist[a] = 0;
  q.push(a);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v: g.neighbors(u)) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  return dist[b];
}

MolecularGraph grow(int n, std::mt19937_64 &rng) {
  MolecularGraph g;
  g.add_atom(pick_element(rng));
  int guard = 0;
  while (g.num_atoms() < n && guard++ < 200) {
    std::vector<int> open;
    for (int i = 0; i < g.num_atoms(); ++i) {
      if (g.remaining_valence(i) > 0)
        open.push_back(i);
    }
    if (open.empty())
      break;
    const int parent = open[rng() % open.size()];
    const Element e = pick_element(rng);
    const int order = pick_order(
        rng, std::min(g.remaining_valence(parent), max_valence(e)));
    // Keep a valence slot on the new atom unless this is the last one.
    if (max_valence(e) - order == 0 && g.num_atoms() + 1 < n
        && uniform01(rng) < 0.7) {
      continue;
    }
    const int child = g.add_atom(e);
    g.add_bond(parent, child, order);
  }

  const int rings = uniform01(rng) < 0.45 ? (uniform01(rng) < 0.2 ? 2 : 1) : 0;
  for (int r = 0; r < rings; ++r) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      const int a = static_cast<int>(rng() % g.num_atoms());
      const int b = static_cast<int>(rng() % g.num_atoms());
      if (!g.can_add_bond(a, b, 1))
        continue;
      const int d = graph_distance(g, a, b);
      if (d < 2 || d > 6)
        continue;
      g.add_bond(a, b, 1);
      break;
    }
  }
  return g;
}

std::vector<int> random_permutation(int n, std::mt19937_64 &rng) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i)
    perm[i] = i;
  shuffle(std::span<int>(perm), rng);
  return perm;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app { "Generate a small-molecule SMILES corpus" };
  std::uint64_t seed = 2020;
  int max_atoms = 9;
  double scale = 1.0;
  app.add_option("--seed", seed, "Generator seed");
  app.add_option("--max-atoms", max_atoms, "Largest heavy-atom count");
  app.add_option("--scale", scale, "Multiplier on per-size quotas");
  CLI11_PARSE(app, argc, argv);

  // Per heavy-atom-count quotas, skewed towards larger molecules.
  const std::array<int, 10> quota = { 0, 4, 15, 50, 140, 300, 480, 650, 750, 750 };

  std::mt19937_64 rng(seed);
  std::set<std::string> seen;
  std::cout << "# Synthetic C/N/O/F small-molecule corpus, one SMILES per line\n"
            << "# generated by gen_corpus --seed " << seed << '\n';

  for (int n = 1; n <= max_atoms && n < static_cast<int>(quota.size()); ++n) {
    const int want = static_cast<int>(quota[n] * scale);
    int have = 0;
    for (int attempt = 0; attempt < want * 200 && have < want; ++attempt) {
      MolecularGraph g = grow(n, rng);
      if (g.num_atoms() != n)
        continue;
      const std::string key = canonical_key(g).text;
      if (!seen.insert(key).second)
        continue;
      std::cout << write_smiles(g.relabeled(random_permutation(n, rng)))
                << '\n';
      ++have;
    }
  }

  // Lines the ingestion step is expected to reject.
  std::cout << "c1ccccc1\n"
            << "[NH4+]\n"
            << "CCl\n"
            << "C.C\n"
            << "CCCC1CCCCCC\n"
            << "C(C)(C)(C)(C)C\n";
  return 0;
}
