#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sigsde {

/// Maximum number of letters a Word can hold. Letters are packed in four
/// bits each for hashing, so alphabets are limited to 16 letters.
inline constexpr std::size_t kMaxWordLength = 15;
inline constexpr int kMaxAlphabetSize = 16;

/// A multi-index (i_1, ..., i_l) over the alphabet {0, ..., a}.
///
/// Words compare in canonical order: shorter words first, then
/// lexicographically. This order fixes the flat coefficient layout of
/// TruncTensor.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<int> letters);
  explicit Word(std::span<const int> letters);

  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] bool empty() const { return size_ == 0; }
  [[nodiscard]] int operator[](std::size_t i) const { return letters_[i]; }

  /// I^- : the first size()-1 letters. Requires size() >= 1.
  [[nodiscard]] Word prefix() const;
  /// I^f : the final letter. Requires size() >= 1.
  [[nodiscard]] int last() const;

  [[nodiscard]] Word appended(int letter) const;
  /// I_J : the letters at the given 0-based positions, in the given order.
  [[nodiscard]] Word subword(std::span<const std::size_t> positions) const;
  [[nodiscard]] int max_letter() const;
  /// Number of occurrences of `letter`.
  [[nodiscard]] std::size_t count(int letter) const;

  /// Dot-separated letters, "e" for the empty word.
  [[nodiscard]] std::string to_string() const;

  /// Injective 64-bit encoding (length in the low nibble).
  [[nodiscard]] std::uint64_t pack() const;

  friend Word concat(const Word& a, const Word& b);
  friend bool operator==(const Word& a, const Word& b);
  friend std::strong_ordering operator<=>(const Word& a, const Word& b);

 private:
  std::array<std::uint8_t, kMaxWordLength> letters_{};
  std::uint8_t size_ = 0;

  void push(int letter);
};

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept {
    std::uint64_t x = w.pack();
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return static_cast<std::size_t>(x);
  }
};

/// Parses "0.1.1" (or "e" / "" for the empty word). Throws
/// std::invalid_argument on malformed input.
Word parse_word(std::string_view text);

/// All words of length <= max_len over `alphabet_size` letters in canonical
/// order. The i-th entry is the word stored at flat index i.
std::vector<Word> enumerate_words(int alphabet_size, int max_len);

/// Number of words of length <= level, i.e. dim T^(<=level)(R^alphabet_size).
std::size_t tensor_size(int alphabet_size, int level);
/// Flat index of the first word of length k.
std::size_t level_offset(int alphabet_size, int k);
/// Flat index of `w` in the canonical layout.
std::size_t word_index(const Word& w, int alphabet_size);
/// Inverse of word_index.
Word word_at(std::size_t index, int alphabet_size);

/// Shuffle product as a multiset: word -> multiplicity.
std::map<Word, int> shuffle(const Word& a, const Word& b);

}  // namespace sigsde
