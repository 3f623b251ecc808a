#pragma once

// Thin helpers over Boost.PropertyTree's XML reader: namespace-prefix
// stripping and attribute access.

#include <optional>
#include <string>
#include <string_view>

#include <boost/property_tree/ptree.hpp>

namespace chor2teal::xml {

using Tree = boost::property_tree::ptree;

// Parses a document. Throws ParseError with the parser's line information.
Tree parse(std::string_view text, std::string_view what);

std::string_view local_name(std::string_view tag);
bool is_meta(std::string_view tag); // <xmlattr>, <xmlcomment>

std::optional<std::string> attribute(const Tree& node, const std::string& name);
std::string escape(std::string_view text);

} // namespace chor2teal::xml
