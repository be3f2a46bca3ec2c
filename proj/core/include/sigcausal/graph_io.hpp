#pragma once

#include <filesystem>
#include <string>

#include "sigcausal/graph.hpp"

namespace sigcausal {

/// {"d": int, "edges": [[i, j], ...], "loops": [k, ...]}
std::string digraph_to_json(const Digraph& g, int indent = -1);
Digraph digraph_from_json(const std::string& text);

/// {"d": int, "marks": [[i, j, "tail|arrow|circle", "tail|arrow|circle"], ...], "loops": [k, ...]}
std::string mixed_graph_to_json(const MixedGraph& g, int indent = -1);
MixedGraph mixed_graph_from_json(const std::string& text);

std::string read_text_file(const std::filesystem::path& file);
void write_text_file(const std::filesystem::path& file, const std::string& text);

}  // namespace sigcausal
