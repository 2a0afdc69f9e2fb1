#include "wsa/lexicon.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>

#include "wsa/error.hpp"

namespace wsa {
namespace {

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::string> split_spaces(std::string_view s) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j > i) words.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return words;
}

bool word_matches(const std::string& word, const std::string& alias_word) {
  if (word == alias_word) return true;
  if (word.size() > 1 && word.back() == 's' &&
      std::string_view(word).substr(0, word.size() - 1) == alias_word) {
    return true;
  }
  return word.size() > 2 && word.ends_with("es") &&
         std::string_view(word).substr(0, word.size() - 2) == alias_word;
}

}  // namespace

Lexicon::Lexicon(std::vector<Category> categories) : categories_(std::move(categories)) {
  std::set<std::int64_t> ids;
  std::map<std::string, std::int64_t> owner;
  for (const auto& cat : categories_) {
    if (!ids.insert(cat.id).second) {
      throw DataError("lexicon: duplicate category id " + std::to_string(cat.id));
    }
    std::vector<std::string> aliases = cat.aliases;
    const std::string canonical = ascii_lower(cat.name);
    if (std::find(aliases.begin(), aliases.end(), canonical) == aliases.end()) {
      aliases.push_back(canonical);
    }
    for (const auto& alias : aliases) {
      if (alias != ascii_lower(alias)) {
        throw DataError("lexicon: alias \"" + alias + "\" is not lowercase");
      }
      const auto words = split_spaces(alias);
      if (words.empty()) throw DataError("lexicon: empty alias in category " + cat.name);
      const std::string key = [&] {
        std::string k;
        for (const auto& w : words) k += (k.empty() ? "" : " ") + w;
        return k;
      }();
      const auto [it, inserted] = owner.emplace(key, cat.id);
      if (!inserted) {
        if (it->second != cat.id) {
          throw DataError("lexicon: alias \"" + key + "\" maps to categories " +
                          std::to_string(it->second) + " and " + std::to_string(cat.id));
        }
        continue;
      }
      entries_.push_back({words, cat.id, key});
    }
  }
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const Entry& a, const Entry& b) { return a.words.size() > b.words.size(); });
}

std::vector<CaptionWord> split_caption_words(std::string_view caption) {
  std::vector<CaptionWord> words;
  std::size_t i = 0;
  while (i < caption.size()) {
    if (!is_word_byte(static_cast<unsigned char>(caption[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < caption.size() && is_word_byte(static_cast<unsigned char>(caption[j]))) ++j;
    words.push_back({ascii_lower(caption.substr(i, j - i)), i, j});
    i = j;
  }
  return words;
}

bool is_stop_word(std::string_view word) {
  static constexpr std::array<std::string_view, 16> kStop = {
      "a", "an", "the", "of", "in", "on", "at", "with",
      "and", "to", "is", "are", "for", "by", "its", "their"};
  const std::string lower = ascii_lower(word);
  return std::find(kStop.begin(), kStop.end(), lower) != kStop.end();
}

std::vector<CategoryMatch> match_categories(std::string_view caption,
                                            const std::vector<TokenRecord>& tokens,
                                            const Lexicon& lex) {
  const auto words = split_caption_words(caption);
  std::vector<CategoryMatch> out;
  std::set<std::int64_t> seen;

  std::size_t i = 0;
  while (i < words.size()) {
    const Lexicon::Entry* hit = nullptr;
    for (const auto& e : lex.entries()) {
      if (i + e.words.size() > words.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < e.words.size() && ok; ++k) {
        ok = word_matches(words[i + k].text, e.words[k]);
      }
      if (ok) {
        hit = &e;
        break;
      }
    }
    if (!hit) {
      ++i;
      continue;
    }

    const std::size_t span_start = words[i].start;
    const std::size_t span_end = words[i + hit->words.size() - 1].end;
    i += hit->words.size();
    if (seen.contains(hit->category_id)) continue;

    CategoryMatch m;
    m.category_id = hit->category_id;
    m.matched_alias = hit->alias;
    m.char_start = span_start;
    m.char_end = span_end;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (tokens[t].char_start < span_end && tokens[t].char_end > span_start) {
        m.token_indices.push_back(t);
      }
    }
    if (m.token_indices.empty()) continue;
    seen.insert(m.category_id);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace wsa
