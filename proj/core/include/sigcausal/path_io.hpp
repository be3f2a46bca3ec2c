#pragma once

#include <filesystem>
#include <iosfwd>

#include "sigcausal/paths.hpp"

namespace sigcausal {

/// JSON Lines, one path per line:
///   {"t": [...], "x": [[...], ...], "coord_map": [[k, start, len], ...]}
/// A path carrying an auxiliary time column additionally has "aux_time": true.
void write_sample_jsonl(const PathSample& sample, std::ostream& os);
PathSample read_sample_jsonl(std::istream& is);

void save_sample_jsonl(const PathSample& sample, const std::filesystem::path& file);
PathSample load_sample_jsonl(const std::filesystem::path& file);

/// Long-format CSV with header `path_id,t,coord,value`.
///
/// Rows sharing (path_id, t) form one observation. `coord` is a column index;
/// every column becomes its own variable. When a column is not observed at a
/// time where others are, it is linearly interpolated from its own neighbouring
/// observations (held constant beyond its first/last one). Paths are ordered by
/// ascending path_id. The horizon is the largest time stamp in the file unless
/// `horizon` is positive.
PathSample read_sample_csv_long(std::istream& is, double horizon = 0.0);

}  // namespace sigcausal
