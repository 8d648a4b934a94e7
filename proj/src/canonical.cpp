//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <numeric>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "moldream/molgraph.h"

namespace moldream {
namespace {

// Dense rank of each item under the ordering of its key; equal keys share a
// rank. Returns the number of distinct ranks.
template <class Key>
int dense_rank(const std::vector<Key> &keys, std::vector<int> &rank) {
  const int n = static_cast<int>(keys.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return keys[a] < keys[b]; });
  rank.assign(n, 0);
  int r = 0;
  for (int i = 0; i < n; ++i) {
    if (i > 0 && keys[order[i - 1]] < keys[order[i]])
      ++r;
    rank[order[i]] = r;
  }
  return n == 0 ? 0 : r + 1;
}

class Canonicalizer {
public:
  explicit Canonicalizer(const MolecularGraph &g): g_(g) { }

  std::vector<int> run();

private:
  int refine(std::vector<int> &cls) const;
  void search(std::vector<int> cls, int ncls);

  const MolecularGraph &g_;
  std::string best_text_;
  std::vector<int> best_perm_;
  bool have_best_ = false;
};

int Canonicalizer::refine(std::vector<int> &cls) const {
  const int n = g_.num_atoms();
  int ncls = *std::max_element(cls.begin(), cls.end()) + 1;
  using Signature = std::pair<int, std::vector<std::pair<int, int>>>;
  std::vector<Signature> sig(n);
  while (true) {
    for (int i = 0; i < n; ++i) {
      sig[i].first = cls[i];
      auto &nb = sig[i].second;
      nb.clear();
      for (int j: g_.neighbors(i))
        nb.emplace_back(cls[j], g_.bond_order(i, j));
      std::sort(nb.begin(), nb.end());
    }
    std::vector<int> next;
    int nnext = dense_rank(sig, next);
    cls = std::move(next);
    if (nnext == ncls)
      return ncls;
    ncls = nnext;
  }
}

void Canonicalizer::search(std::vector<int> cls, int ncls) {
  ncls = refine(cls);
  const int n = g_.num_atoms();
  if (ncls == n) {
    std::string text = write_smiles(g_.relabeled(cls));
    if (!have_best_ || text < best_text_) {
      best_text_ = std::move(text);
      best_perm_ = cls;
      have_best_ = true;
    }
    return;
  }

  // Target cell: the lowest class with more than one member.
  std::vector<int> size(ncls, 0);
  for (int c: cls)
    ++size[c];
  int target = 0;
  while (size[target] < 2)
    ++target;

  for (int v = 0; v < n; ++v) {
    if (cls[v] != target)
      continue;
    std::vector<int> split(cls);
    for (int u = 0; u < n; ++u) {
      if (u != v && cls[u] >= target)
        ++split[u];
    }
    search(std::move(split), ncls + 1);
  }
}

std::vector<int> Canonicalizer::run() {
  const int n = g_.num_atoms();
  if (n == 0)
    return {};

  using Invariant = std::tuple<int, int, int, std::vector<int>>;
  std::vector<Invariant> inv(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> orders;
    for (int j: g_.neighbors(i))
      orders.push_back(g_.bond_order(i, j));
    std::sort(orders.begin(), orders.end());
    inv[i] = { element_index(g_.atom(i)),
               static_cast<int>(g_.neighbors(i).size()), g_.bonded_valence(i),
               std::move(orders) };
  }
  std::vector<int> cls;
  int ncls = dense_rank(inv, cls);
  search(std::move(cls), ncls);
  return best_perm_;
}

}  // namespace

std::vector<int> canonical_order(const MolecularGraph &g) {
  return Canonicalizer(g).run();
}

CanonicalKey canonical_key(const MolecularGraph &g) {
  if (g.empty())
    return {};
  return { write_smiles(g.relabeled(canonical_order(g))) };
}

}  // namespace moldream
