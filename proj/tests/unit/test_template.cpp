#include <doctest.h>

#include "chor2teal/errors.hpp"
#include "chor2teal/template.hpp"

using namespace chor2teal;
using nlohmann::json;

TEST_CASE("variables") {
  CHECK(tmpl::render("int {{n}}", json{{"n", 5}}) == "int 5");
  CHECK(tmpl::render("{{ a.b }}", json{{"a", {{"b", "x"}}}}) == "x");
  CHECK(tmpl::render("{{s}}", json{{"s", "<&>"}}) == "<&>");
  CHECK(tmpl::render("{{t}}{{f}}", json{{"t", true}, {"f", false}}) == "10");
  CHECK(tmpl::render("{{n}}", json{{"n", 18446744073709551615ULL}}) == "18446744073709551615");
  CHECK(tmpl::render("no tags", json::object()) == "no tags");
}

TEST_CASE("sections") {
  const json data{{"items", {{{"v", 1}}, {{"v", 2}}}}, {"on", true}, {"off", false}, {"empty", json::array()},
                  {"outer", 9}};
  CHECK(tmpl::render("{{#items}}[{{v}}{{outer}}]{{/items}}", data) == "[19][29]");
  CHECK(tmpl::render("{{#on}}yes{{/on}}{{#off}}no{{/off}}", data) == "yes");
  CHECK(tmpl::render("{{^off}}inv{{/off}}{{^empty}}!{{/empty}}{{^on}}x{{/on}}", data) == "inv!");
  CHECK(tmpl::render("{{#items}}{{.}}{{/items}}", json{{"items", {1, 2, 3}}}) == "123");
  CHECK(tmpl::render("a{{! ignored }}b", data) == "ab");
}

TEST_CASE("standalone section lines vanish") {
  const json data{{"xs", {1, 2}}, {"on", false}};
  CHECK(tmpl::render("start\n{{#xs}}\nint {{.}}\n{{/xs}}\nend\n", data) == "start\nint 1\nint 2\nend\n");
  CHECK(tmpl::render("a\n  {{#on}}  \nhidden\n{{/on}}\nb\n", data) == "a\nb\n");
  CHECK(tmpl::render("{{#xs}}{{.}} {{/xs}}\n", data) == "1 2 \n");
}

TEST_CASE("template errors") {
  CHECK_THROWS_AS(tmpl::render("{{missing}}", json::object()), EmissionError);
  CHECK_THROWS_AS(tmpl::render("{{#a}}", json{{"a", true}}), EmissionError);
  CHECK_THROWS_AS(tmpl::render("{{/a}}", json::object()), EmissionError);
  CHECK_THROWS_AS(tmpl::render("{{#a}}{{/b}}", json{{"a", true}}), EmissionError);
  CHECK_THROWS_AS(tmpl::render("{{a", json::object()), EmissionError);
  CHECK_THROWS_AS(tmpl::render("{{obj}}", json{{"obj", json::object()}}), EmissionError);
}
