//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldream/selfies.h"

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace moldream {

const char *to_string(EncodingError::Kind kind) {
  switch (kind) {
  case EncodingError::Kind::kTooLong:
    return "TooLong";
  case EncodingError::Kind::kUnencodable:
    return "Unencodable";
  }
  return "Unknown";
}

namespace {

constexpr std::array<std::string_view, kAlphabetSize> kTokenText = {
  "[PAD]", "[C]", "[=C]", "[#C]", "[N]", "[=N]",
  "[#N]", "[O]", "[=O]", "[F]", "[Branch1]", "[Ring1]",
};

struct AtomToken {
  Element element;
  int order;
};

std::optional<AtomToken> atom_token(Token t) {
  switch (t) {
  case Token::kC:
    return AtomToken { Element::kC, 1 };
  case Token::kDoubleC:
    return AtomToken { Element::kC, 2 };
  case Token::kTripleC:
    return AtomToken { Element::kC, 3 };
  case Token::kN:
    return AtomToken { Element::kN, 1 };
  case Token::kDoubleN:
    return AtomToken { Element::kN, 2 };
  case Token::kTripleN:
    return AtomToken { Element::kN, 3 };
  case Token::kO:
    return AtomToken { Element::kO, 1 };
  case Token::kDoubleO:
    return AtomToken { Element::kO, 2 };
  case Token::kF:
    return AtomToken { Element::kF, 1 };
  default:
    return std::nullopt;
  }
}

std::optional<Token> token_for(Element e, int order) {
  switch (e) {
  case Element::kC:
    return token_at(token_index(Token::kC) + order - 1);
  case Element::kN:
    return token_at(token_index(Token::kN) + order - 1);
  case Element::kO:
    if (order <= 2)
      return token_at(token_index(Token::kO) + order - 1);
    return std::nullopt;
  case Element::kF:
    if (order == 1)
      return Token::kF;
    return std::nullopt;
  }
  return std::nullopt;
}

// Derivation state machine. Atoms are created in index order, so an atom's
// index is also its creation step.
class Deriver {
public:
  explicit Deriver(std::span<const Token> tokens): tokens_(tokens) { }

  MolecularGraph run() {
    derive(0, tokens_.size());
    return std::move(g_);
  }

private:
  // Derives tokens_[begin, end) with `current_` as the attachment point.
  // Stops at the first terminating condition inside this span only.
  void derive(size_t begin, size_t end);

  std::span<const Token> tokens_;
  MolecularGraph g_;
  int current_ = -1;
};

void Deriver::derive(size_t begin, size_t end) {
  size_t i = begin;
  while (i < end) {
    const Token t = tokens_[i];

    if (auto atom = atom_token(t)) {
      if (g_.empty()) {
        current_ = g_.add_atom(atom->element);
        ++i;
        continue;
      }
      const int room = g_.remaining_valence(current_);
      if (room == 0)
        return;
      const int order =
          std::min({ atom->order, room, max_valence(atom->element) });
      const int next = g_.add_atom(atom->element);
      g_.add_bond(current_, next, order);
      current_ = next;
      ++i;
      continue;
    }

    if (t == Token::kPad)
      return;

    // Branch and ring operators always consume their operand token, even
    // when they end up being skipped.
    if (i + 1 >= end)
      return;
    const int operand = token_index(tokens_[i + 1]);

    if (t == Token::kBranch1) {
      const size_t len = static_cast<size_t>(operand) + 1;
      const size_t body = i + 2;
      const size_t body_end = std::min(end, body + len);
      if (!g_.empty() && g_.remaining_valence(current_) >= 2) {
        const int root = current_;
        derive(body, body_end);
        current_ = root;
      }
      i = body_end;
      continue;
    }

    // t == Token::kRing1
    const int distance = operand + 2;
    const int target = g_.num_atoms() - distance;
    if (!g_.empty() && target >= 0 && target != current_
        && g_.remaining_valence(current_) >= 1
        && g_.remaining_valence(target) >= 1
        && g_.bond_order(current_, target) == 0) {
      g_.add_bond(current_, target, 1);
    }
    i += 2;
  }
}

// Encoding of one DFS spanning tree. Ring closures can only carry single
// bonds and operands must fit one index token; violations throw.
class Encoder {
public:
  Encoder(const MolecularGraph &g, int root, bool prefer_multiple_bonds)
      : g_(g), root_(root), prefer_multiple_(prefer_multiple_bonds),
        disc_(g.num_atoms(), -1), children_(g.num_atoms()),
        ring_partners_(g.num_atoms()) { }

  TokenSequence run() {
    discover(root_, -1);
    TokenSequence out;
    emit(root_, 0, out);
    return out;
  }

private:
  std::vector<int> neighbor_order(int v) const {
    std::vector<int> nb = g_.neighbors(v);
    if (prefer_multiple_) {
      std::stable_sort(nb.begin(), nb.end(), [&](int a, int b) {
        return g_.bond_order(v, a) > g_.bond_order(v, b);
      });
    }
    return nb;
  }

  void discover(int v, int parent) {
    disc_[v] = clock_++;
    for (int w: neighbor_order(v)) {
      if (disc_[w] < 0) {
        children_[v].push_back(w);
        discover(w, v);
      } else if (w != parent && disc_[w] < disc_[v]) {
        ring_partners_[v].push_back(w);
      }
    }
  }

  void emit(int v, int order, TokenSequence &out) {
    const Element e = g_.atom(v);
    auto tok = token_for(e, order == 0 ? 1 : order);
    if (!tok) {
      throw EncodingError(EncodingError::Kind::kUnencodable,
                          "no token for bond order");
    }
    out.push_back(*tok);

    std::vector<int> partners = ring_partners_[v];
    std::sort(partners.begin(), partners.end(),
              [&](int a, int b) { return disc_[a] < disc_[b]; });
    for (int w: partners) {
      if (g_.bond_order(v, w) != 1) {
        throw EncodingError(EncodingError::Kind::kUnencodable,
                            "ring closure with a multiple bond");
      }
      const int distance = disc_[v] - disc_[w] + 1;
      if (distance > kMaxRingDistance) {
        throw EncodingError(EncodingError::Kind::kUnencodable,
                            "ring span " + std::to_string(distance)
                                + " exceeds "
                                + std::to_string(kMaxRingDistance));
      }
      out.push_back(Token::kRing1);
      out.push_back(token_at(distance - 2));
    }

    const auto &kids = children_[v];
    for (size_t i = 0; i < kids.size(); ++i) {
      const int order_to_kid = g_.bond_order(v, kids[i]);
      if (i + 1 == kids.size()) {
        emit(kids[i], order_to_kid, out);
        break;
      }
      TokenSequence branch;
      emit(kids[i], order_to_kid, branch);
      if (static_cast<int>(branch.size()) > kMaxBranchLength) {
        throw EncodingError(EncodingError::Kind::kUnencodable,
                            "branch of " + std::to_string(branch.size())
                                + " tokens exceeds "
                                + std::to_string(kMaxBranchLength));
      }
      out.push_back(Token::kBranch1);
      out.push_back(token_at(static_cast<int>(branch.size()) - 1));
      out.insert(out.end(), branch.begin(), branch.end());
    }
  }

  const MolecularGraph &g_;
  int root_;
  bool prefer_multiple_;
  std::vector<int> disc_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<int>> ring_partners_;
  int clock_ = 0;
};

}  // namespace

std::string_view token_text(Token t) {
  return kTokenText[token_index(t)];
}

std::string to_text(std::span<const Token> tokens) {
  std::string out;
  for (Token t: tokens)
    out += token_text(t);
  return out;
}

TokenSequence parse_tokens(std::string_view text) {
  TokenSequence out;
  size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    if (c != '[')
      throw TokenParseError("expected '[' at position " + std::to_string(i));
    const size_t close = text.find(']', i);
    if (close == std::string_view::npos)
      throw TokenParseError("unterminated token at position "
                            + std::to_string(i));
    const std::string_view tok = text.substr(i, close - i + 1);
    auto it = std::find(kTokenText.begin(), kTokenText.end(), tok);
    if (it == kTokenText.end())
      throw TokenParseError("unknown token " + std::string(tok));
    out.push_back(token_at(static_cast<int>(it - kTokenText.begin())));
    i = close + 1;
  }
  return out;
}

MolecularGraph decode(std::span<const Token> tokens) {
  return Deriver(tokens).run();
}

TokenSequence encode(const MolecularGraph &g, int max_length) {
  if (g.empty())
    return {};
  if (!g.is_connected()) {
    throw EncodingError(EncodingError::Kind::kUnencodable,
                        "graph has more than one fragment");
  }

  // The canonical tree is rooted at atom 0 with ascending neighbors. When a
  // ring closure lands on a multiple bond or an operand overflows, retry with
  // multiple bonds routed into the tree first, then from other roots.
  TokenSequence tokens;
  std::optional<EncodingError> first_error;
  bool found = false;
  for (int root = 0; root < g.num_atoms() && !found; ++root) {
    for (bool prefer_multiple: { false, true }) {
      try {
        tokens = Encoder(g, root, prefer_multiple).run();
        found = true;
        break;
      } catch (const EncodingError &e) {
        if (!first_error)
          first_error = e;
      }
    }
  }
  if (!found)
    throw *first_error;
  if (static_cast<int>(tokens.size()) > max_length) {
    throw EncodingError(EncodingError::Kind::kTooLong,
                        std::to_string(tokens.size()) + " tokens exceed "
                            + std::to_string(max_length));
  }
  return tokens;
}

bool OneHotMatrix::is_exact_onehot() const {
  for (int r = 0; r < rows_; ++r) {
    int ones = 0;
    for (double v: row(r)) {
      if (v == 1.0)
        ++ones;
      else if (v != 0.0)
        return false;
    }
    if (ones != 1)
      return false;
  }
  return true;
}

OneHotMatrix to_onehot(std::span<const Token> tokens, int max_length) {
  if (static_cast<int>(tokens.size()) > max_length) {
    throw EncodingError(EncodingError::Kind::kTooLong,
                        std::to_string(tokens.size()) + " tokens exceed "
                            + std::to_string(max_length));
  }
  OneHotMatrix m(max_length);
  for (int r = 0; r < max_length; ++r) {
    const int idx = r < static_cast<int>(tokens.size())
                        ? token_index(tokens[r])
                        : token_index(Token::kPad);
    m(r, idx) = 1.0;
  }
  return m;
}

TokenSequence from_onehot_argmax(std::span<const double> values) {
  const size_t rows = values.size() / kAlphabetSize;
  TokenSequence out(rows);
  for (size_t r = 0; r < rows; ++r) {
    const double *row = values.data() + r * kAlphabetSize;
    int best = 0;
    for (int c = 1; c < kAlphabetSize; ++c) {
      if (row[c] > row[best])
        best = c;
    }
    out[r] = token_at(best);
  }
  while (!out.empty() && out.back() == Token::kPad)
    out.pop_back();
  return out;
}

}  // namespace moldream
