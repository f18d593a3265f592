// unicode.hpp - pika PEG parser
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef PIKA_UNICODE_HPP
#define PIKA_UNICODE_HPP

#include <string>
#include <string_view>

namespace pika {

// Decodes UTF-8 into scalar values. Malformed sequences decode to U+FFFD,
// one replacement per offending byte.
std::u32string decode_utf8(std::string_view text);

std::string encode_utf8(std::u32string_view text);
void append_utf8(std::string& out, char32_t c);

// One character per byte, no decoding.
std::u32string widen_bytes(std::string_view bytes);

} // namespace pika

#endif // PIKA_UNICODE_HPP
