#include "chor2teal/template.hpp"

#include <memory>
#include <vector>

#include "chor2teal/errors.hpp"

namespace chor2teal::tmpl {

namespace {

using nlohmann::json;

struct Node {
  enum class Kind { text, variable, section, inverted } kind = Kind::text;
  std::string value; // literal text or tag name
  std::vector<Node> children;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

class Parser {
public:
  explicit Parser(std::string_view tpl) : tpl_(tpl) {}

  std::vector<Node> parse() {
    std::vector<Node> root;
    std::vector<std::vector<Node>*> stack{&root};
    std::vector<std::string> open;
    std::size_t pos = 0;
    while (pos < tpl_.size()) {
      const auto start = tpl_.find("{{", pos);
      if (start == std::string_view::npos) {
        append_text(*stack.back(), tpl_.substr(pos));
        break;
      }
      const auto end = tpl_.find("}}", start + 2);
      if (end == std::string_view::npos) throw EmissionError("template: unterminated tag at offset " + std::to_string(start));
      const auto body = trim(tpl_.substr(start + 2, end - start - 2));
      if (body.empty()) throw EmissionError("template: empty tag at offset " + std::to_string(start));
      const char sigil = body.front();
      const bool block = sigil == '#' || sigil == '^' || sigil == '/' || sigil == '!';

      auto text_end = start;
      auto next = end + 2;
      if (block) {
        const auto nl = start == 0 ? std::string_view::npos : tpl_.rfind('\n', start - 1);
        const auto line_start = nl == std::string_view::npos ? 0 : nl + 1;
        const auto le = tpl_.find('\n', next);
        const auto line_end = le == std::string_view::npos ? tpl_.size() : le;
        const auto before = tpl_.substr(line_start, start - line_start);
        const auto after = tpl_.substr(next, line_end - next);
        if (line_start >= pos && before.find_first_not_of(" \t") == std::string_view::npos &&
            after.find_first_not_of(" \t\r") == std::string_view::npos) {
          text_end = line_start;
          next = le == std::string_view::npos ? tpl_.size() : le + 1;
        }
      }
      append_text(*stack.back(), tpl_.substr(pos, text_end - pos));
      pos = next;

      const auto name = std::string(trim(body.substr(block ? 1 : 0)));
      switch (sigil) {
      case '!': break;
      case '#':
      case '^': {
        auto& list = *stack.back();
        list.push_back({sigil == '#' ? Node::Kind::section : Node::Kind::inverted, name, {}});
        stack.push_back(&list.back().children);
        open.push_back(name);
        break;
      }
      case '/':
        if (open.empty() || open.back() != name)
          throw EmissionError("template: unexpected closing tag {{/" + name + "}}");
        open.pop_back();
        stack.pop_back();
        break;
      default: stack.back()->push_back({Node::Kind::variable, name, {}});
      }
    }
    if (!open.empty()) throw EmissionError("template: section {{#" + open.back() + "}} is not closed");
    return root;
  }

private:
  static void append_text(std::vector<Node>& list, std::string_view text) {
    if (!text.empty()) list.push_back({Node::Kind::text, std::string(text), {}});
  }

  std::string_view tpl_;
};

class Renderer {
public:
  explicit Renderer(const json& data) { contexts_.push_back(&data); }

  void render(const std::vector<Node>& nodes, std::string& out) {
    for (const auto& node : nodes) {
      switch (node.kind) {
      case Node::Kind::text: out += node.value; break;
      case Node::Kind::variable: out += to_text(lookup(node.value), node.value); break;
      case Node::Kind::section: {
        const auto& value = lookup(node.value);
        if (value.is_array()) {
          for (const auto& item : value) with(item, node.children, out);
        } else if (value.is_object()) {
          with(value, node.children, out);
        } else if (truthy(value)) {
          render(node.children, out);
        }
        break;
      }
      case Node::Kind::inverted:
        if (!truthy(lookup(node.value))) render(node.children, out);
        break;
      }
    }
  }

private:
  void with(const json& context, const std::vector<Node>& children, std::string& out) {
    contexts_.push_back(&context);
    render(children, out);
    contexts_.pop_back();
  }

  static bool truthy(const json& v) {
    if (v.is_null()) return false;
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_array()) return !v.empty();
    return true;
  }

  static std::string to_text(const json& v, const std::string& name) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    throw EmissionError("template: {{" + name + "}} is not a scalar");
  }

  const json& lookup(const std::string& name) const {
    if (name == ".") return *contexts_.back();
    const auto dot = name.find('.');
    const auto head = name.substr(0, dot);
    for (auto it = contexts_.rbegin(); it != contexts_.rend(); ++it) {
      const auto& ctx = **it;
      if (!ctx.is_object() || !ctx.contains(head)) continue;
      const json* value = &ctx.at(head);
      std::size_t pos = dot;
      while (pos != std::string::npos) {
        const auto next = name.find('.', pos + 1);
        const auto part = name.substr(pos + 1, next == std::string::npos ? std::string::npos : next - pos - 1);
        if (!value->is_object() || !value->contains(part)) throw EmissionError("template: unknown name " + name);
        value = &value->at(part);
        pos = next;
      }
      return *value;
    }
    throw EmissionError("template: unknown name " + name);
  }

  std::vector<const json*> contexts_;
};

} // namespace

std::string render(std::string_view tpl, const nlohmann::json& data) {
  const auto nodes = Parser(tpl).parse();
  std::string out;
  Renderer(data).render(nodes, out);
  return out;
}

} // namespace chor2teal::tmpl
