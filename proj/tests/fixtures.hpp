#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "causalbn/dataset.hpp"
#include "causalbn/random.hpp"

namespace fixture {

inline causalbn::Variable var(const std::string& name, std::size_t card) {
  causalbn::Variable v;
  v.name = name;
  for (std::size_t s = 0; s < card; ++s) v.states.push_back(std::to_string(s));
  return v;
}

// Dataset from named integer columns; cardinalities are given explicitly.
inline causalbn::CategoricalDataset table(const std::vector<std::string>& names, const std::vector<std::size_t>& cards,
                                          const std::vector<std::vector<std::int32_t>>& columns) {
  std::vector<causalbn::Variable> vars;
  for (std::size_t i = 0; i < names.size(); ++i) vars.push_back(var(names[i], cards[i]));
  return causalbn::CategoricalDataset(vars, columns);
}

// Independent uniform columns.
inline causalbn::CategoricalDataset uniform(const std::vector<std::string>& names, const std::vector<std::size_t>& cards,
                                            std::size_t rows, std::uint64_t seed) {
  causalbn::Rng rng(seed);
  std::vector<std::vector<std::int32_t>> cols(names.size());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t v = 0; v < names.size(); ++v) cols[v].push_back(static_cast<std::int32_t>(rng.below(cards[v])));
  return table(names, cards, cols);
}

inline std::string data_path(const std::string& file) { return std::string(CAUSALBN_DATA_DIR) + "/" + file; }

}  // namespace fixture
