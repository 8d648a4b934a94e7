//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDREAM_SELFIES_H_
#define MOLDREAM_SELFIES_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moldream/molgraph.h"

namespace moldream {

// The alphabet is fixed; a token's position doubles as its numeric value
// when it is read as a branch length or ring distance operand.
enum class Token : std::uint8_t {
  kPad = 0,
  kC = 1,
  kDoubleC = 2,
  kTripleC = 3,
  kN = 4,
  kDoubleN = 5,
  kTripleN = 6,
  kO = 7,
  kDoubleO = 8,
  kF = 9,
  kBranch1 = 10,
  kRing1 = 11,
};

inline constexpr int kAlphabetSize = 12;
inline constexpr int kDefaultMaxLength = 20;

// Largest operand value an index token can express.
inline constexpr int kMaxIndexValue = kAlphabetSize - 1;
inline constexpr int kMaxBranchLength = kMaxIndexValue + 1;
inline constexpr int kMaxRingDistance = kMaxIndexValue + 2;

constexpr int token_index(Token t) {
  return static_cast<int>(t);
}

constexpr Token token_at(int index) {
  return static_cast<Token>(index);
}

std::string_view token_text(Token t);

using TokenSequence = std::vector<Token>;

/// Concatenated bracket form, e.g. "[C][=O]".
std::string to_text(std::span<const Token> tokens);

/// Inverse of to_text. Whitespace between tokens is ignored; anything else
/// that is not a known bracketed token throws TokenParseError.
TokenSequence parse_tokens(std::string_view text);

/// Derives a molecular graph from any token sequence. Total: never throws
/// and always returns a graph satisfying every MolecularGraph invariant.
MolecularGraph decode(std::span<const Token> tokens);

/// Spanning-tree encoding with decode(encode(g)) isomorphic to g.
///
/// Throws EncodingError (kTooLong) when the result exceeds max_length, or
/// (kUnencodable) when a branch or ring operand does not fit one index token.
TokenSequence encode(const MolecularGraph &g,
                     int max_length = kDefaultMaxLength);

/// Row-major rows x kAlphabetSize real matrix. Holds an exact one-hot
/// encoding right after to_onehot and arbitrary reals once dreaming starts.
class OneHotMatrix {
public:
  OneHotMatrix() = default;
  explicit OneHotMatrix(int rows)
      : rows_(rows), values_(static_cast<size_t>(rows) * kAlphabetSize, 0.0) { }

  int rows() const { return rows_; }
  static constexpr int cols() { return kAlphabetSize; }
  size_t size() const { return values_.size(); }

  double &operator()(int r, int c) { return values_[r * kAlphabetSize + c]; }
  double operator()(int r, int c) const {
    return values_[r * kAlphabetSize + c];
  }

  std::span<double> flat() { return values_; }
  std::span<const double> flat() const { return values_; }

  std::span<const double> row(int r) const {
    return std::span<const double>(values_).subspan(r * kAlphabetSize,
                                                    kAlphabetSize);
  }

  // Exactly one 1.0 per row and 0.0 elsewhere.
  bool is_exact_onehot() const;

  friend bool operator==(const OneHotMatrix &,
                         const OneHotMatrix &) = default;

private:
  int rows_ = 0;
  std::vector<double> values_;
};

/// Rows beyond the sequence are one-hot [PAD]. Throws EncodingError
/// (kTooLong) if the sequence is longer than max_length.
OneHotMatrix to_onehot(std::span<const Token> tokens, int max_length);

/// Row-wise argmax (lowest index wins ties) with trailing [PAD] rows
/// trimmed. `values` is read as rows of kAlphabetSize entries.
TokenSequence from_onehot_argmax(std::span<const double> values);

inline TokenSequence from_onehot_argmax(const OneHotMatrix &m) {
  return from_onehot_argmax(m.flat());
}

}  // namespace moldream

#endif  // MOLDREAM_SELFIES_H_
