//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDREAM_MOLGRAPH_H_
#define MOLDREAM_MOLGRAPH_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "moldream/error.h"

namespace moldream {

enum class Element : std::uint8_t {
  kC = 0,
  kN = 1,
  kO = 2,
  kF = 3,
};

inline constexpr int kNumElements = 4;
inline constexpr std::array<Element, kNumElements> kAllElements = {
  Element::kC, Element::kN, Element::kO, Element::kF
};

constexpr int max_valence(Element e) {
  constexpr std::array<int, kNumElements> table = { 4, 3, 2, 1 };
  return table[static_cast<int>(e)];
}

constexpr char element_symbol(Element e) {
  constexpr std::array<char, kNumElements> table = { 'C', 'N', 'O', 'F' };
  return table[static_cast<int>(e)];
}

constexpr int element_index(Element e) {
  return static_cast<int>(e);
}

struct Bond {
  int src;  // always < dst
  int dst;
  int order;

  friend bool operator==(const Bond &, const Bond &) = default;
};

/// Heavy-atom molecular graph with implicit hydrogens.
///
/// The mutators enforce the structural invariants (no self bonds, no
/// duplicate pairs, bond orders in 1..3, per-atom valence within the table)
/// as bonds are added, so a graph that was built without an exception is
/// valid except possibly for connectivity, which validate() checks.
class MolecularGraph {
public:
  MolecularGraph() = default;

  int add_atom(Element e);

  // Throws ValidationError if the bond would violate an invariant.
  void add_bond(int a, int b, int order);

  bool can_add_bond(int a, int b, int order) const;

  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }
  bool empty() const { return atoms_.empty(); }

  Element atom(int i) const { return atoms_[i]; }
  const std::vector<Element> &atoms() const { return atoms_; }
  const std::vector<Bond> &bonds() const { return bonds_; }

  // Neighbor indices of atom i in ascending order.
  const std::vector<int> &neighbors(int i) const { return adj_[i]; }

  // 0 if the atoms are not bonded.
  int bond_order(int a, int b) const;

  int bonded_valence(int i) const { return used_[i]; }
  int remaining_valence(int i) const {
    return max_valence(atoms_[i]) - used_[i];
  }
  int implicit_hydrogens(int i) const { return remaining_valence(i); }

  bool is_connected() const;

  // Throws ValidationError on any invariant violation, including a
  // disconnected graph.
  void validate() const;

  // perm[old] is the index of that atom in the returned graph.
  MolecularGraph relabeled(const std::vector<int> &perm) const;

  friend bool operator==(const MolecularGraph &,
                         const MolecularGraph &) = default;

private:
  std::vector<Element> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> used_;
};

/// Parses the supported SMILES subset: organic-subset atoms C, N, O, F
/// without brackets, bond symbols `-`, `=`, `#`, parenthesized branches and
/// ring-closure digits 1 through 9.
///
/// Every input either yields a valid graph or throws SmilesError.
MolecularGraph parse_smiles(std::string_view text);

/// Depth-first from atom 0 with neighbors visited in ascending index order.
/// The empty graph is written as an empty string.
std::string write_smiles(const MolecularGraph &g);

struct CanonicalKey {
  std::string text;

  friend auto operator<=>(const CanonicalKey &,
                          const CanonicalKey &) = default;
};

/// Isomorphism-invariant key: equal iff the graphs are isomorphic with
/// elements and bond orders preserved.
CanonicalKey canonical_key(const MolecularGraph &g);

/// Canonical atom order (perm[old] = new) used to build the key.
std::vector<int> canonical_order(const MolecularGraph &g);

struct Composition {
  std::array<int, kNumElements> heavy {};
  int hydrogens = 0;

  int count(Element e) const { return heavy[element_index(e)]; }
  int heavy_atoms() const { return heavy[0] + heavy[1] + heavy[2] + heavy[3]; }
};

Composition composition(const MolecularGraph &g);

}  // namespace moldream

#endif  // MOLDREAM_MOLGRAPH_H_
