//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldream/molgraph.h"

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace moldream {

const char *to_string(SmilesError::Kind kind) {
  switch (kind) {
  case SmilesError::Kind::kUnsupportedFeature:
    return "UnsupportedFeature";
  case SmilesError::Kind::kSyntax:
    return "SyntaxError";
  case SmilesError::Kind::kUnclosedRing:
    return "UnclosedRing";
  case SmilesError::Kind::kValenceExceeded:
    return "ValenceExceeded";
  }
  return "Unknown";
}

int MolecularGraph::add_atom(Element e) {
  atoms_.push_back(e);
  adj_.emplace_back();
  used_.push_back(0);
  return num_atoms() - 1;
}

bool MolecularGraph::can_add_bond(int a, int b, int order) const {
  if (a == b || a < 0 || b < 0 || a >= num_atoms() || b >= num_atoms())
    return false;
  if (order < 1 || order > 3)
    return false;
  if (bond_order(a, b) != 0)
    return false;
  return remaining_valence(a) >= order && remaining_valence(b) >= order;
}

void MolecularGraph::add_bond(int a, int b, int order) {
  if (!can_add_bond(a, b, order)) {
    throw ValidationError("invalid bond " + std::to_string(a) + "-"
                          + std::to_string(b) + " of order "
                          + std::to_string(order));
  }
  if (a > b)
    std::swap(a, b);
  bonds_.push_back({ a, b, order });
  adj_[a].insert(std::upper_bound(adj_[a].begin(), adj_[a].end(), b), b);
  adj_[b].insert(std::upper_bound(adj_[b].begin(), adj_[b].end(), a), a);
  used_[a] += order;
  used_[b] += order;
}

int MolecularGraph::bond_order(int a, int b) const {
  if (a > b)
    std::swap(a, b);
  for (const Bond &bond: bonds_) {
    if (bond.src == a && bond.dst == b)
      return bond.order;
  }
  return 0;
}

bool MolecularGraph::is_connected() const {
  if (atoms_.empty())
    return true;

  std::vector<char> seen(atoms_.size(), 0);
  std::vector<int> stack { 0 };
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v: adj_[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == num_atoms();
}

void MolecularGraph::validate() const {
  std::vector<int> used(atoms_.size(), 0);
  std::vector<std::pair<int, int>> pairs;
  for (const Bond &b: bonds_) {
    if (b.src >= b.dst || b.src < 0 || b.dst >= num_atoms())
      throw ValidationError("malformed bond endpoints");
    if (b.order < 1 || b.order > 3)
      throw ValidationError("bond order out of range");
    pairs.emplace_back(b.src, b.dst);
    used[b.src] += b.order;
    used[b.dst] += b.order;
  }
  std::sort(pairs.begin(), pairs.end());
  if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end())
    throw ValidationError("duplicate bond");

  for (int i = 0; i < num_atoms(); ++i) {
    if (used[i] > max_valence(atoms_[i]))
      throw ValidationError("valence exceeded at atom " + std::to_string(i));
  }
  if (!is_connected())
    throw ValidationError("graph has more than one fragment");
}

MolecularGraph MolecularGraph::relabeled(const std::vector<int> &perm) const {
  std::vector<Element> elems(atoms_.size());
  for (int i = 0; i < num_atoms(); ++i)
    elems[perm[i]] = atoms_[i];

  MolecularGraph out;
  for (Element e: elems)
    out.add_atom(e);

  std::vector<Bond> sorted;
  sorted.reserve(bonds_.size());
  for (const Bond &b: bonds_) {
    int x = perm[b.src], y = perm[b.dst];
    if (x > y)
      std::swap(x, y);
    sorted.push_back({ x, y, b.order });
  }
  std::sort(sorted.begin(), sorted.end(), [](const Bond &l, const Bond &r) {
    return std::pair(l.src, l.dst) < std::pair(r.src, r.dst);
  });
  for (const Bond &b: sorted)
    out.add_bond(b.src, b.dst, b.order);
  return out;
}

Composition composition(const MolecularGraph &g) {
  Composition comp;
  for (int i = 0; i < g.num_atoms(); ++i) {
    ++comp.heavy[element_index(g.atom(i))];
    comp.hydrogens += g.implicit_hydrogens(i);
  }
  return comp;
}

// SMILES reading --------------------------------------------------------------

namespace {

[[noreturn]] void fail(SmilesError::Kind kind, std::string_view text,
                       size_t pos, std::string_view what) {
  std::string msg(what);
  msg += " at position ";
  msg += std::to_string(pos);
  msg += " in \"";
  msg += text;
  msg += '"';
  throw SmilesError(kind, msg);
}

std::optional<Element> organic_atom(char c) {
  switch (c) {
  case 'C':
    return Element::kC;
  case 'N':
    return Element::kN;
  case 'O':
    return Element::kO;
  case 'F':
    return Element::kF;
  default:
    return std::nullopt;
  }
}

int bond_symbol_order(char c) {
  switch (c) {
  case '-':
    return 1;
  case '=':
    return 2;
  case '#':
    return 3;
  default:
    return 0;
  }
}

struct PendingBond {
  int from;
  int order;  // 0 when no explicit bond symbol was given
  size_t pos;
};

struct OpenRing {
  int atom = -1;
  int order = 0;
  size_t pos = 0;
};

class SmilesReader {
public:
  explicit SmilesReader(std::string_view text): text_(text) { }

  MolecularGraph read();

private:
  void add_bond_checked(int a, int b, int order, size_t pos);

  std::string_view text_;
  MolecularGraph g_;
  std::vector<std::pair<int, int>> raw_bonds_;  // (a,b) packed
  std::vector<int> raw_orders_;
};

void SmilesReader::add_bond_checked(int a, int b, int order, size_t pos) {
  if (a == b)
    fail(SmilesError::Kind::kSyntax, text_, pos, "ring closure onto itself");
  auto key = std::minmax(a, b);
  for (const auto &p: raw_bonds_) {
    if (p == std::pair(key.first, key.second))
      fail(SmilesError::Kind::kSyntax, text_, pos, "duplicate bond");
  }
  raw_bonds_.emplace_back(key.first, key.second);
  raw_orders_.push_back(order);
}

MolecularGraph SmilesReader::read() {
  std::vector<int> branch_stack;
  std::array<OpenRing, 10> rings;
  int prev = -1;
  int pending_order = 0;
  size_t pending_pos = 0;
  // True right after '(' until the first atom of the branch.
  bool branch_open = false;
  // Ring labels must follow their atom directly, not a closed branch.
  bool after_branch = false;

  for (size_t i = 0; i < text_.size(); ++i) {
    const char c = text_[i];

    if (auto elem = organic_atom(c)) {
      if (i + 1 < text_.size() && (c == 'C' && text_[i + 1] == 'l')) {
        fail(SmilesError::Kind::kUnsupportedFeature, text_, i,
             "unsupported element Cl");
      }
      int idx = g_.add_atom(*elem);
      if (prev >= 0)
        add_bond_checked(prev, idx, pending_order == 0 ? 1 : pending_order, i);
      prev = idx;
      pending_order = 0;
      branch_open = false;
      after_branch = false;
      continue;
    }

    if (int order = bond_symbol_order(c); order != 0) {
      if (prev < 0)
        fail(SmilesError::Kind::kSyntax, text_, i, "bond without left atom");
      if (pending_order != 0)
        fail(SmilesError::Kind::kSyntax, text_, i, "consecutive bond symbols");
      pending_order = order;
      pending_pos = i;
      continue;
    }

    if (c >= '1' && c <= '9') {
      if (prev < 0 || branch_open || after_branch)
        fail(SmilesError::Kind::kSyntax, text_, i, "ring label without atom");
      OpenRing &ring = rings[c - '0'];
      if (ring.atom < 0) {
        ring = { prev, pending_order, i };
      } else {
        int order = ring.order;
        if (pending_order != 0) {
          if (order != 0 && order != pending_order) {
            fail(SmilesError::Kind::kSyntax, text_, i,
                 "conflicting ring-closure bond orders");
          }
          order = pending_order;
        }
        add_bond_checked(ring.atom, prev, order == 0 ? 1 : order, i);
        ring = OpenRing {};
      }
      pending_order = 0;
      continue;
    }

    switch (c) {
    case '(':
      if (prev < 0 || branch_open)
        fail(SmilesError::Kind::kSyntax, text_, i, "branch without atom");
      if (pending_order != 0)
        fail(SmilesError::Kind::kSyntax, text_, pending_pos, "dangling bond");
      branch_stack.push_back(prev);
      branch_open = true;
      continue;
    case ')':
      if (branch_stack.empty())
        fail(SmilesError::Kind::kSyntax, text_, i, "unbalanced ')'");
      if (branch_open)
        fail(SmilesError::Kind::kSyntax, text_, i, "empty branch");
      if (pending_order != 0)
        fail(SmilesError::Kind::kSyntax, text_, pending_pos, "dangling bond");
      prev = branch_stack.back();
      branch_stack.pop_back();
      after_branch = true;
      continue;
    case '0':
    case '%':
      fail(SmilesError::Kind::kUnsupportedFeature, text_, i,
           "ring label outside 1-9");
    case '[':
      fail(SmilesError::Kind::kUnsupportedFeature, text_, i,
           "bracket atom (charge, isotope, explicit H or element)");
    case '.':
      fail(SmilesError::Kind::kUnsupportedFeature, text_, i,
           "multi-fragment input");
    case '/':
    case '\\':
    case '@':
      fail(SmilesError::Kind::kUnsupportedFeature, text_, i, "stereochemistry");
    case ':':
    case '$':
      fail(SmilesError::Kind::kUnsupportedFeature, text_, i,
           "aromatic or quadruple bond");
    case '+':
      fail(SmilesError::Kind::kUnsupportedFeature, text_, i, "charge");
    default:
      break;
    }

    if (c >= 'a' && c <= 'z') {
      fail(SmilesError::Kind::kUnsupportedFeature, text_, i,
           "aromatic atom or unsupported element");
    }
    if (c >= 'A' && c <= 'Z') {
      fail(SmilesError::Kind::kUnsupportedFeature, text_, i,
           "unsupported element");
    }
    fail(SmilesError::Kind::kSyntax, text_, i, "unexpected character");
  }

  if (pending_order != 0)
    fail(SmilesError::Kind::kSyntax, text_, pending_pos, "dangling bond");
  if (!branch_stack.empty())
    fail(SmilesError::Kind::kSyntax, text_, text_.size(), "unbalanced '('");
  for (const OpenRing &ring: rings) {
    if (ring.atom >= 0)
      fail(SmilesError::Kind::kUnclosedRing, text_, ring.pos, "unclosed ring");
  }

  for (size_t k = 0; k < raw_bonds_.size(); ++k) {
    auto [a, b] = raw_bonds_[k];
    int order = raw_orders_[k];
    if (g_.remaining_valence(a) < order || g_.remaining_valence(b) < order) {
      fail(SmilesError::Kind::kValenceExceeded, text_, 0,
           "valence exceeded on atom "
               + std::to_string(g_.remaining_valence(a) < order ? a : b));
    }
    g_.add_bond(a, b, order);
  }
  return std::move(g_);
}

// SMILES writing --------------------------------------------------------------

class SmilesWriter {
public:
  explicit SmilesWriter(const MolecularGraph &g)
      : g_(g), disc_(g.num_atoms(), -1), parent_(g.num_atoms(), -1),
        ring_edges_(g.num_atoms()) { }

  std::string write();

private:
  void discover(int v);
  void emit(int v);

  const MolecularGraph &g_;
  std::vector<int> disc_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
  // Per atom: ring partners, in ascending partner index.
  std::vector<std::vector<int>> ring_edges_;
  int clock_ = 0;

  std::vector<std::vector<std::pair<int, int>>> open_labels_;  // (partner, label)
  std::array<bool, 10> label_used_ {};
  std::string out_;
};

void SmilesWriter::discover(int v) {
  disc_[v] = clock_++;
  for (int w: g_.neighbors(v)) {
    if (disc_[w] < 0) {
      parent_[w] = v;
      children_[v].push_back(w);
      discover(w);
    } else if (w != parent_[v] && disc_[w] < disc_[v]) {
      // Back edge: both endpoints record it once.
      ring_edges_[v].push_back(w);
      ring_edges_[w].push_back(v);
    }
  }
}

char bond_char(int order) {
  switch (order) {
  case 2:
    return '=';
  case 3:
    return '#';
  default:
    return 0;
  }
}

void SmilesWriter::emit(int v) {
  out_ += element_symbol(g_.atom(v));

  std::vector<int> partners = ring_edges_[v];
  std::sort(partners.begin(), partners.end(),
            [&](int a, int b) { return disc_[a] < disc_[b]; });

  // Closures first so that a label freed here may be reused by an opening
  // on the same atom; this is the order a reader resolves them in.
  for (int w: partners) {
    if (disc_[w] > disc_[v])
      continue;
    auto &labels = open_labels_[w];
    auto it = std::find_if(labels.begin(), labels.end(),
                           [v](const auto &p) { return p.first == v; });
    if (char bc = bond_char(g_.bond_order(v, w)); bc != 0)
      out_ += bc;
    out_ += static_cast<char>('0' + it->second);
    label_used_[it->second] = false;
    labels.erase(it);
  }
  for (int w: partners) {
    if (disc_[w] < disc_[v])
      continue;
    int label = 1;
    while (label <= 9 && label_used_[label])
      ++label;
    if (label > 9)
      throw std::logic_error("more than 9 ring closures open at once");
    label_used_[label] = true;
    open_labels_[v].emplace_back(w, label);
    out_ += static_cast<char>('0' + label);
  }

  const auto &kids = children_[v];
  for (size_t i = 0; i < kids.size(); ++i) {
    const bool last = i + 1 == kids.size();
    if (!last)
      out_ += '(';
    if (char bc = bond_char(g_.bond_order(v, kids[i])); bc != 0)
      out_ += bc;
    emit(kids[i]);
    if (!last)
      out_ += ')';
  }
}

std::string SmilesWriter::write() {
  if (g_.empty())
    return {};
  children_.assign(g_.num_atoms(), {});
  open_labels_.assign(g_.num_atoms(), {});
  discover(0);
  if (clock_ != g_.num_atoms())
    throw ValidationError("cannot write a disconnected graph as SMILES");
  emit(0);
  return std::move(out_);
}

}  // namespace

MolecularGraph parse_smiles(std::string_view text) {
  return SmilesReader(text).read();
}

std::string write_smiles(const MolecularGraph &g) {
  return SmilesWriter(g).write();
}

}  // namespace moldream
