#pragma once

#include <string>
#include <vector>

#include "coax/coax_index.hpp"
#include "coax/softfd.hpp"

namespace coax {

// Model file: the `detect` output and the optional `build` input.
//
//   {
//     "format": "coax-models", "version": 1,
//     "n_dims": 4, "names": ["a", "b", "c", "d"],
//     "groups": [
//       {"predictor": 0,
//        "dependents": [{"dim": 1, "m": 2.0, "b": 0.1, "eps_lb": 0.5,
//                        "eps_ub": 0.5, "fit_quality": 0.9}]}
//     ]
//   }
std::string groups_to_json(const std::vector<CorrelationGroup>& groups, std::size_t n_dims,
                           const std::vector<std::string>& names);

/// Parses a model file. Throws Error(Parse) on malformed documents and
/// Error(InvalidArgument) when `expected_dims` is nonzero and differs.
std::vector<CorrelationGroup> groups_from_json(const std::string& text, std::size_t expected_dims = 0);

std::string stats_to_json(const IndexStats& s);

}  // namespace coax
