//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldream/oracle.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "moldream/config.h"

namespace moldream {

void PropertyTable::validate() const {
  for (double v: element) {
    if (!std::isfinite(v))
      throw ConfigError("property table: non-finite element contribution");
  }
  if (!std::isfinite(hydrogen) || !std::isfinite(bond2)
      || !std::isfinite(bond3)) {
    throw ConfigError("property table: non-finite value");
  }
}

PropertyTable parse_property_table(std::string_view text) {
  const KeyValueConfig kv = KeyValueConfig::parse(text);
  for (const auto &[key, _]: kv.entries()) {
    if (key != "C" && key != "N" && key != "O" && key != "F" && key != "H"
        && key != "bond2" && key != "bond3") {
      throw ConfigError("property table: unknown key '" + key + "'");
    }
  }

  PropertyTable t;
  for (Element e: kAllElements)
    t.element[element_index(e)] = kv.require_double(std::string(1, element_symbol(e)));
  t.hydrogen = kv.require_double("H");
  t.bond2 = kv.require_double("bond2");
  t.bond3 = kv.require_double("bond3");
  t.validate();
  return t;
}

PropertyTable load_property_table(const std::string &path) {
  return parse_property_table(read_file(path));
}

double surrogate_logp(const MolecularGraph &g, const PropertyTable &table) {
  double sum = 0.0;
  for (int i = 0; i < g.num_atoms(); ++i) {
    sum += table.contribution(g.atom(i));
    sum += g.implicit_hydrogens(i) * table.hydrogen;
  }
  for (const Bond &b: g.bonds()) {
    if (b.order == 2)
      sum += table.bond2;
    else if (b.order == 3)
      sum += table.bond3;
  }
  return sum;
}

SurrogateOracle::SurrogateOracle(PropertyTable table)
    : table_(std::move(table)) {
  table_.validate();
}

std::string SurrogateOracle::describe() const {
  std::string out = "surrogate(";
  for (Element e: kAllElements) {
    out += element_symbol(e);
    out += '=';
    out += format_double(table_.contribution(e));
    out += ',';
  }
  out += "H=" + format_double(table_.hydrogen);
  out += ",bond2=" + format_double(table_.bond2);
  out += ",bond3=" + format_double(table_.bond3) + ")";
  return out;
}

ExternalLabelOracle ExternalLabelOracle::parse(std::string_view text) {
  std::map<std::string, double> labels;
  int lineno = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos)
      nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    if (line.empty() || line.front() == '#')
      continue;

    const size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ConfigError("label file line " + std::to_string(lineno)
                        + ": expected SMILES<TAB>value");
    }
    const MolecularGraph g = parse_smiles(line.substr(0, tab));
    const double value = parse_double(line.substr(tab + 1));
    if (!std::isfinite(value)) {
      throw ConfigError("label file line " + std::to_string(lineno)
                        + ": non-finite value");
    }
    labels[canonical_key(g).text] = value;
  }
  return ExternalLabelOracle(std::move(labels));
}

ExternalLabelOracle ExternalLabelOracle::load(const std::string &path) {
  return parse(read_file(path));
}

double ExternalLabelOracle::evaluate(const MolecularGraph &g) const {
  const std::string key = canonical_key(g).text;
  auto it = labels_.find(key);
  if (it == labels_.end())
    throw LookupError("no label for " + key);
  return it->second;
}

std::string ExternalLabelOracle::describe() const {
  return "external(" + std::to_string(labels_.size()) + " labels)";
}

Stats dataset_stats(std::span<const double> values) {
  if (values.empty())
    throw EmptyInputError("statistics of an empty list");

  Stats s;
  s.count = static_cast<long>(values.size());
  s.min = values[0];
  s.max = values[0];
  double sum = 0.0;
  for (double v: values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(s.count);
  double ss = 0.0;
  for (double v: values) {
    const double d = v - s.mean;
    ss += d * d;
  }
  s.std = std::sqrt(ss / static_cast<double>(s.count));
  // Rounding can push the mean a hair outside [min, max] for constant input.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

}  // namespace moldream
