#include "cybok/xml.hpp"

#include <expat.h>

#include "cybok/error.hpp"

namespace cybok::xml {

std::string_view Element::local_name() const {
    std::string_view n = name;
    auto colon = n.find(':');
    return colon == std::string_view::npos ? n : n.substr(colon + 1);
}

std::optional<std::string> Element::attribute(std::string_view key) const {
    auto it = attributes.find(std::string(key));
    if (it == attributes.end()) return std::nullopt;
    return it->second;
}

const Element* Element::child(std::string_view local) const {
    for (const auto& c : children) {
        if (const auto* e = std::get_if<std::unique_ptr<Element>>(&c)) {
            if ((*e)->local_name() == local) return e->get();
        }
    }
    return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view local) const {
    std::vector<const Element*> out;
    for (const auto& c : children) {
        if (const auto* e = std::get_if<std::unique_ptr<Element>>(&c)) {
            if ((*e)->local_name() == local) out.push_back(e->get());
        }
    }
    return out;
}

namespace {

void collect_text(const Element& e, std::string& out) {
    for (const auto& c : e.children) {
        if (const auto* s = std::get_if<std::string>(&c)) {
            out += *s;
        } else {
            const auto& child = *std::get<std::unique_ptr<Element>>(c);
            // Block-level markup separates words that would otherwise fuse.
            out += ' ';
            collect_text(child, out);
            out += ' ';
        }
    }
}

void serialize(const Element& e, std::string& out) {
    out += '<';
    out += e.name;
    for (const auto& [k, v] : e.attributes) {
        out += ' ';
        out += k;
        out += "=\"";
        out += escape_attribute(v);
        out += '"';
    }
    if (e.children.empty()) {
        out += "/>";
        return;
    }
    out += '>';
    out += e.inner_xml();
    out += "</";
    out += e.name;
    out += '>';
}

struct Builder {
    XML_Parser parser = nullptr;
    std::unique_ptr<Element> root;
    std::vector<Element*> stack;
    std::string error;
};

void on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
    auto* b = static_cast<Builder*>(data);
    auto elem = std::make_unique<Element>();
    elem->name = name;
    elem->byte_offset = static_cast<std::size_t>(XML_GetCurrentByteIndex(b->parser));
    elem->line = static_cast<std::size_t>(XML_GetCurrentLineNumber(b->parser));
    for (std::size_t i = 0; attrs[i] != nullptr; i += 2) {
        elem->attributes.emplace(attrs[i], attrs[i + 1]);
    }
    Element* raw = elem.get();
    if (b->stack.empty()) {
        b->root = std::move(elem);
    } else {
        b->stack.back()->children.emplace_back(std::move(elem));
    }
    b->stack.push_back(raw);
}

void on_end(void* data, const XML_Char*) {
    auto* b = static_cast<Builder*>(data);
    b->stack.pop_back();
}

void on_text(void* data, const XML_Char* s, int len) {
    auto* b = static_cast<Builder*>(data);
    if (b->stack.empty()) return;
    auto& children = b->stack.back()->children;
    if (!children.empty()) {
        if (auto* prev = std::get_if<std::string>(&children.back())) {
            prev->append(s, static_cast<std::size_t>(len));
            return;
        }
    }
    children.emplace_back(std::string(s, static_cast<std::size_t>(len)));
}

}  // namespace

std::string Element::text() const {
    std::string out;
    collect_text(*this, out);
    return out;
}

std::string Element::inner_xml() const {
    std::string out;
    for (const auto& c : children) {
        if (const auto* s = std::get_if<std::string>(&c)) {
            out += escape(*s);
        } else {
            serialize(*std::get<std::unique_ptr<Element>>(c), out);
        }
    }
    return out;
}

Document parse(std::string_view bytes) {
    Builder b;
    b.parser = XML_ParserCreate("UTF-8");
    if (b.parser == nullptr) throw Error("xml: cannot allocate parser");
    XML_SetUserData(b.parser, &b);
    XML_SetElementHandler(b.parser, on_start, on_end);
    XML_SetCharacterDataHandler(b.parser, on_text);

    const auto status = XML_Parse(b.parser, bytes.data(), static_cast<int>(bytes.size()), 1);
    if (status != XML_STATUS_OK) {
        const std::string msg = XML_ErrorString(XML_GetErrorCode(b.parser));
        const auto offset = XML_GetCurrentByteIndex(b.parser);
        const auto line = XML_GetCurrentLineNumber(b.parser);
        const auto col = XML_GetCurrentColumnNumber(b.parser);
        XML_ParserFree(b.parser);
        throw ParseError("malformed XML: " + msg,
                         offset < 0 ? bytes.size() : static_cast<std::size_t>(offset),
                         static_cast<std::size_t>(line), static_cast<std::size_t>(col) + 1);
    }
    XML_ParserFree(b.parser);
    if (!b.root) throw ParseError("malformed XML: no root element", 0);
    return Document{std::move(b.root)};
}

std::string escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string escape_attribute(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\n': out += "&#10;"; break;
            case '\r': out += "&#13;"; break;
            case '\t': out += "&#9;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace cybok::xml
