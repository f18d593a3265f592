// serialize.cpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include <pika/serialize.hpp>
#include <pika/unicode.hpp>

namespace pika {

nlohmann::ordered_json to_json(const ParseTreeNode& node)
{
    nlohmann::ordered_json children = nlohmann::ordered_json::array();
    for (const ParseTreeNode& c : node.children)
        children.push_back(to_json(c));
    return {{"name", node.name},
            {"label", node.label.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(node.label)},
            {"start", node.start},
            {"len", node.len},
            {"children", std::move(children)}};
}

nlohmann::ordered_json to_json(const AstNode& node)
{
    nlohmann::ordered_json children = nlohmann::ordered_json::array();
    for (const AstNode& c : node.children)
        children.push_back(to_json(c));
    nlohmann::ordered_json j = {{"name", node.synthetic ? std::string("<root>") : node.label},
                        {"label", node.label},
                        {"start", node.start},
                        {"len", node.len},
                        {"text", node.text},
                        {"children", std::move(children)}};
    if (node.synthetic)
        j["synthetic"] = true;
    return j;
}

nlohmann::ordered_json to_json(std::span<const ErrorSpan> spans, std::u32string_view input)
{
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const ErrorSpan& s : spans) {
        nlohmann::ordered_json j = {{"start", s.start},
                            {"end", s.end},
                            {"text", encode_utf8(input.substr(s.start, s.end - s.start))}};
        if (s.following_match) {
            j["recovery"] = {{"name", s.following_match->clause->name},
                             {"start", s.following_match->start},
                             {"len", s.following_match->len}};
        }
        out.push_back(std::move(j));
    }
    return out;
}

namespace {

bool is_plain(const std::string& s)
{
    if (s.empty())
        return false;
    for (char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_'
            || c == '[' || c == ']';
        if (!ok)
            return false;
    }
    return true;
}

std::string atom(const std::string& s) { return is_plain(s) ? s : nlohmann::ordered_json(s).dump(); }

void sexpr(std::string& out, const ParseTreeNode& node)
{
    out += '(';
    if (!node.label.empty()) {
        out += atom(node.label);
        out += ':';
    }
    out += atom(node.name);
    out += ' ';
    out += std::to_string(node.start);
    out += ' ';
    out += std::to_string(node.len);
    for (const ParseTreeNode& c : node.children) {
        out += ' ';
        sexpr(out, c);
    }
    out += ')';
}

void sexpr(std::string& out, const AstNode& node)
{
    out += '(';
    out += node.synthetic ? std::string("<root>") : atom(node.label);
    if (node.children.empty()) {
        out += ' ';
        out += nlohmann::ordered_json(node.text).dump();
    }
    for (const AstNode& c : node.children) {
        out += ' ';
        sexpr(out, c);
    }
    out += ')';
}

} // namespace

std::string to_sexpr(const ParseTreeNode& node)
{
    std::string out;
    sexpr(out, node);
    return out;
}

std::string to_sexpr(const AstNode& node)
{
    std::string out;
    sexpr(out, node);
    return out;
}

} // namespace pika
