#include "xml.hpp"

#include <sstream>

#include <boost/property_tree/xml_parser.hpp>

#include "chor2teal/errors.hpp"

namespace chor2teal::xml {

Tree parse(std::string_view text, std::string_view what) {
  std::istringstream in{std::string(text)};
  Tree tree;
  try {
    boost::property_tree::read_xml(in, tree,
                                   boost::property_tree::xml_parser::no_comments |
                                       boost::property_tree::xml_parser::trim_whitespace);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw ParseError("malformed " + std::string(what) + " XML (line " + std::to_string(e.line()) +
                     "): " + e.message());
  }
  return tree;
}

std::string_view local_name(std::string_view tag) {
  const auto colon = tag.find(':');
  return colon == std::string_view::npos ? tag : tag.substr(colon + 1);
}

bool is_meta(std::string_view tag) { return tag == "<xmlattr>" || tag == "<xmlcomment>"; }

std::optional<std::string> attribute(const Tree& node, const std::string& name) {
  // '/' separator: attribute names may contain dots.
  if (auto value = node.get_optional<std::string>(Tree::path_type("<xmlattr>/" + name, '/'))) return *value;
  return std::nullopt;
}

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    case '\'': out += "&apos;"; break;
    default: out.push_back(c);
    }
  }
  return out;
}

} // namespace chor2teal::xml
