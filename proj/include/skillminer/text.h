#ifndef SKILLMINER_TEXT_H_
#define SKILLMINER_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers. Case mapping covers ASCII, Latin-1, Latin Extended-A/B
// (including the Vietnamese horned vowels), Latin Extended Additional,
// Greek and Cyrillic. Everything else maps to itself.
namespace skillminer::text {

// Invalid sequences decode to U+FFFD, one per offending byte.
std::u32string decode_utf8(std::string_view input);
std::string encode_utf8(std::u32string_view input);
void append_utf8(char32_t cp, std::string *out);

char32_t to_lower(char32_t cp);
bool is_upper(char32_t cp);
bool is_space(char32_t cp);
// Letters, digits, underscore and every non-punctuation code point above
// ASCII count as word characters for boundary checks.
bool is_word_char(char32_t cp);

std::string to_lower(std::string_view input);
bool starts_with_upper(std::string_view input);

std::vector<std::string> split_whitespace(std::string_view input);
std::string join(const std::vector<std::string> &parts, std::string_view sep);

}  // namespace skillminer::text

#endif  // SKILLMINER_TEXT_H_
