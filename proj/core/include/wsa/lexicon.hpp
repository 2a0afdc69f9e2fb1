#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wsa/types.hpp"

namespace wsa {

struct Category {
  std::int64_t id = 0;
  std::string name;
  std::vector<std::string> aliases;  // lowercase words or space-separated phrases
};

// Category -> alias mapping used to find object mentions in captions. The
// lowercased canonical name always counts as an alias.
class Lexicon {
 public:
  Lexicon() = default;
  // Throws DataError on duplicate ids, non-lowercase aliases or an alias
  // claimed by two categories.
  explicit Lexicon(std::vector<Category> categories);

  const std::vector<Category>& categories() const noexcept { return categories_; }
  std::size_t size() const noexcept { return categories_.size(); }

  struct Entry {
    std::vector<std::string> words;
    std::int64_t category_id;
    std::string alias;
  };
  // Every alias, split into words, longest first.
  const std::vector<Entry>& entries() const noexcept { return entries_; }

 private:
  std::vector<Category> categories_;
  std::vector<Entry> entries_;
};

struct CategoryMatch {
  std::int64_t category_id = 0;
  std::vector<std::size_t> token_indices;  // sorted, non-empty
  std::string matched_alias;
  std::size_t char_start = 0;  // byte span of the matched words in the caption
  std::size_t char_end = 0;
};

// Lowercase, word-boundary alias matching over the caption. Multi-word aliases
// match consecutive words, a trailing "s" or "es" is stripped when the exact
// word does not match, and only the first mention of each category is kept.
// Matched words map to the tokens whose byte spans overlap them; a mention
// that covers no token is dropped.
std::vector<CategoryMatch> match_categories(std::string_view caption,
                                            const std::vector<TokenRecord>& tokens,
                                            const Lexicon& lex);

struct CaptionWord {
  std::string text;  // lowercased
  std::size_t start = 0;
  std::size_t end = 0;
};

// Maximal runs of ASCII alphanumerics (bytes >= 0x80 count as word characters).
std::vector<CaptionWord> split_caption_words(std::string_view caption);

bool is_stop_word(std::string_view word);

}  // namespace wsa
