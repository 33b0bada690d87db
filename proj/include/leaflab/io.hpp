#pragma once

#include <string>

#include <json.hpp>

#include "leaflab/ratmap.hpp"

namespace leaflab {

using Json = nlohmann::ordered_json;

Json to_json(Complex z);
Json to_json(const SpherePoint& p);
Complex complex_from_json(const Json& j);
SpherePoint sphere_point_from_json(const Json& j);

/// Maps are given either by name ("chebyshev:3", "quad:-1", "quad:0.25+0.1i")
/// or as {"num": [[re, im], ...], "den": [...]} with ascending coefficients.
RationalMap map_from_spec(const std::string& spec);
RationalMap map_from_json(const Json& j);
Json map_to_json(const RationalMap& f);

/// Parse "a", "a+bi", "a-bi", "bi", "i".
Complex parse_complex(const std::string& text);

Json cycle_to_json(const CycleInfo& c);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace leaflab
