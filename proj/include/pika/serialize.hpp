// serialize.hpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef PIKA_SERIALIZE_HPP
#define PIKA_SERIALIZE_HPP

#include <pika/recovery.hpp>
#include <pika/tree.hpp>

#include <json.hpp>

#include <span>
#include <string>

namespace pika {

// {"name", "label", "start", "len", "children"}
nlohmann::ordered_json to_json(const ParseTreeNode& node);
// {"name", "label", "start", "len", "text", "children"}; name equals label.
nlohmann::ordered_json to_json(const AstNode& node);
nlohmann::ordered_json to_json(std::span<const ErrorSpan> spans, std::u32string_view input);

// (name start len child...) with "label:" prefixed to labeled names; names
// that are not plain identifiers are quoted.
std::string to_sexpr(const ParseTreeNode& node);
// (label child...) or (label "text") for leaves.
std::string to_sexpr(const AstNode& node);

} // namespace pika

#endif // PIKA_SERIALIZE_HPP
