#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "jkl/network.hpp"

namespace jkl {

struct SourceLocation {
  std::size_t line = 0;
  std::size_t column = 0;
};

/// A parsed `.rxn` file together with where each declaration came from.
struct ModelDocument {
  std::string text;
  ReactionNetwork network;
  std::vector<SourceLocation> species_locations;
  std::vector<std::pair<std::string, SourceLocation>> parameter_locations;
  std::vector<SourceLocation> reaction_locations;
};

/// Throws ParseError (1-based line/column) on any syntax or reference error.
ModelDocument parse_document(std::string_view text);
ReactionNetwork parse_model(std::string_view text);

/// Canonical text: header comment, species line, parameters sorted by name,
/// reactions in order. Throws std::invalid_argument for networks whose columns
/// cannot be written as reactant/product sides.
std::string serialize_model(const ReactionNetwork& net);

ReactionNetwork load_model_file(const std::string& path);

}  // namespace jkl
