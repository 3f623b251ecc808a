#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace chor2teal::tmpl {

// Logic-less templates: {{name}}, {{#section}}...{{/section}},
// {{^inverted}}...{{/inverted}}, {{! comment}}. Sections iterate arrays,
// enter objects, and test other values for truthiness. Section and comment
// tags alone on a line consume that line. Values are inserted verbatim.
// Unknown names and unbalanced sections throw EmissionError.
std::string render(std::string_view tpl, const nlohmann::json& data);

} // namespace chor2teal::tmpl
