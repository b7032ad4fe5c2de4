#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coax/dataset.hpp"
#include "coax/geometry.hpp"

namespace coax {

enum class QueryKind { Point, Range };

const char* to_string(QueryKind k);
QueryKind parse_query_kind(const std::string& s);

struct Workload {
  std::vector<QueryRect> queries;
  QueryKind kind = QueryKind::Range;
  std::size_t k = 1;
  std::uint64_t seed = 0;
};

/// Each query starts from a uniformly drawn record. Range queries span the
/// per-dimension [min, max] of that record's k nearest neighbours (itself
/// included) under Euclidean distance on min-max normalized attributes; point
/// queries are the record itself. Neighbours are found by brute force.
///
/// When `seed_rows` is given, starting records are drawn from it instead of
/// the whole dataset; neighbours always come from the whole dataset.
Workload gen_workload(const Dataset& d, std::size_t k, std::size_t n_queries, QueryKind kind,
                      std::uint64_t seed, std::optional<std::span<const RowId>> seed_rows = std::nullopt);

}  // namespace coax
