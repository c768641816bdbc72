#pragma once

// Minimal read-only XML tree built on expat. Namespace processing is off, so
// element names are the qualified names as written (e.g. "xhtml:p").

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cybok::xml {

struct Element;

using Node = std::variant<std::string, std::unique_ptr<Element>>;

struct Element {
    std::string name;
    std::map<std::string, std::string> attributes;
    std::vector<Node> children;
    std::size_t byte_offset = 0;
    std::size_t line = 0;

    // Name without namespace prefix.
    std::string_view local_name() const;

    std::optional<std::string> attribute(std::string_view key) const;

    // First direct child whose local name matches.
    const Element* child(std::string_view local) const;
    std::vector<const Element*> children_named(std::string_view local) const;

    // Concatenated descendant character data in document order.
    std::string text() const;

    // Children re-serialized as XML, attributes in sorted order.
    std::string inner_xml() const;
};

struct Document {
    std::unique_ptr<Element> root;
};

// Throws ParseError carrying the byte offset of the failure.
Document parse(std::string_view bytes);

std::string escape(std::string_view text);
std::string escape_attribute(std::string_view text);

}  // namespace cybok::xml
