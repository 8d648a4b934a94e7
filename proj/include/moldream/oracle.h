//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDREAM_ORACLE_H_
#define MOLDREAM_ORACLE_H_

#include <array>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "moldream/molgraph.h"

namespace moldream {

/// Additive lipophilicity surrogate: per-element contributions, a per
/// implicit hydrogen term and corrections for double and triple bonds.
///
/// The defaults are configuration, not fitted values. They keep carbon
/// lipophilic and the heteroatoms hydrophilic so that swapping C for N
/// always lowers the score.
struct PropertyTable {
  std::array<double, kNumElements> element { 0.20, -0.70, -0.40, -0.20 };
  double hydrogen = 0.10;
  double bond2 = -0.05;
  double bond3 = -0.10;

  double contribution(Element e) const { return element[element_index(e)]; }

  // Throws ConfigError if a value is not finite.
  void validate() const;
};

/// Reads `key = value` lines with keys C, N, O, F, H, bond2, bond3. All keys
/// are required; `#` starts a comment.
PropertyTable load_property_table(const std::string &path);
PropertyTable parse_property_table(std::string_view text);

double surrogate_logp(const MolecularGraph &g, const PropertyTable &table);

/// Source of ground-truth labels for molecules.
class PropertyOracle {
public:
  virtual ~PropertyOracle() = default;

  // Throws LookupError if the oracle cannot label the molecule.
  virtual double evaluate(const MolecularGraph &g) const = 0;

  virtual std::string describe() const = 0;
};

class SurrogateOracle: public PropertyOracle {
public:
  explicit SurrogateOracle(PropertyTable table = {});

  double evaluate(const MolecularGraph &g) const override {
    return surrogate_logp(g, table_);
  }

  std::string describe() const override;

  const PropertyTable &table() const { return table_; }

private:
  PropertyTable table_;
};

/// Labels looked up by canonical key from `SMILES<TAB>value` lines.
class ExternalLabelOracle: public PropertyOracle {
public:
  explicit ExternalLabelOracle(std::map<std::string, double> labels)
      : labels_(std::move(labels)) { }

  static ExternalLabelOracle load(const std::string &path);
  static ExternalLabelOracle parse(std::string_view text);

  double evaluate(const MolecularGraph &g) const override;
  std::string describe() const override;

  size_t size() const { return labels_.size(); }

private:
  std::map<std::string, double> labels_;
};

struct Stats {
  double mean = 0;
  double std = 0;  // population
  double min = 0;
  double max = 0;
  long count = 0;
};

/// Throws EmptyInputError on an empty range.
Stats dataset_stats(std::span<const double> values);

}  // namespace moldream

#endif  // MOLDREAM_ORACLE_H_
