#include "sigsde/word.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace sigsde {

Word::Word(std::initializer_list<int> letters) {
  for (int l : letters) push(l);
}

Word::Word(std::span<const int> letters) {
  for (int l : letters) push(l);
}

void Word::push(int letter) {
  if (letter < 0 || letter >= kMaxAlphabetSize) {
    throw std::invalid_argument("word letter out of range: " + std::to_string(letter));
  }
  if (size_ >= kMaxWordLength) {
    throw std::length_error("word exceeds maximum length");
  }
  letters_[size_++] = static_cast<std::uint8_t>(letter);
}

Word Word::prefix() const {
  if (size_ == 0) throw std::logic_error("prefix of the empty word");
  Word w = *this;
  w.letters_[--w.size_] = 0;
  return w;
}

int Word::last() const {
  if (size_ == 0) throw std::logic_error("final letter of the empty word");
  return letters_[size_ - 1];
}

Word Word::appended(int letter) const {
  Word w = *this;
  w.push(letter);
  return w;
}

Word Word::subword(std::span<const std::size_t> positions) const {
  Word w;
  for (std::size_t p : positions) {
    if (p >= size_) throw std::out_of_range("subword position out of range");
    w.push(letters_[p]);
  }
  return w;
}

int Word::max_letter() const {
  int m = -1;
  for (std::size_t i = 0; i < size_; ++i) m = std::max<int>(m, letters_[i]);
  return m;
}

std::size_t Word::count(int letter) const {
  return static_cast<std::size_t>(
      std::count(letters_.begin(), letters_.begin() + size_, static_cast<std::uint8_t>(letter)));
}

std::string Word::to_string() const {
  if (size_ == 0) return "e";
  std::string s;
  for (std::size_t i = 0; i < size_; ++i) {
    if (i) s += '.';
    s += std::to_string(letters_[i]);
  }
  return s;
}

std::uint64_t Word::pack() const {
  std::uint64_t key = size_;
  for (std::size_t i = 0; i < size_; ++i) key |= std::uint64_t{letters_[i]} << (4 * (i + 1));
  return key;
}

Word concat(const Word& a, const Word& b) {
  Word w = a;
  for (std::size_t i = 0; i < b.size_; ++i) w.push(b.letters_[i]);
  return w;
}

bool operator==(const Word& a, const Word& b) {
  return a.size_ == b.size_ && std::equal(a.letters_.begin(), a.letters_.begin() + a.size_, b.letters_.begin());
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
  if (a.size_ != b.size_) return a.size_ <=> b.size_;
  for (std::size_t i = 0; i < a.size_; ++i) {
    if (a.letters_[i] != b.letters_[i]) return a.letters_[i] <=> b.letters_[i];
  }
  return std::strong_ordering::equal;
}

Word parse_word(std::string_view text) {
  if (text.empty() || text == "e") return {};
  std::vector<int> letters;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t dot = text.find('.', pos);
    if (dot == std::string_view::npos) dot = text.size();
    std::string_view tok = text.substr(pos, dot - pos);
    int v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw std::invalid_argument("malformed word '" + std::string(text) + "'");
    }
    letters.push_back(v);
    pos = dot + 1;
  }
  return Word(std::span<const int>(letters));
}

std::size_t level_offset(int alphabet_size, int k) {
  std::size_t offset = 0, power = 1;
  for (int i = 0; i < k; ++i) {
    offset += power;
    power *= static_cast<std::size_t>(alphabet_size);
  }
  return offset;
}

std::size_t tensor_size(int alphabet_size, int level) { return level_offset(alphabet_size, level + 1); }

std::size_t word_index(const Word& w, int alphabet_size) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] >= alphabet_size) throw std::out_of_range("letter exceeds alphabet");
    idx = idx * static_cast<std::size_t>(alphabet_size) + static_cast<std::size_t>(w[i]);
  }
  return level_offset(alphabet_size, static_cast<int>(w.size())) + idx;
}

Word word_at(std::size_t index, int alphabet_size) {
  int k = 0;
  while (level_offset(alphabet_size, k + 1) <= index) ++k;
  std::size_t rem = index - level_offset(alphabet_size, k);
  std::vector<int> letters(static_cast<std::size_t>(k));
  for (int i = k - 1; i >= 0; --i) {
    letters[static_cast<std::size_t>(i)] = static_cast<int>(rem % static_cast<std::size_t>(alphabet_size));
    rem /= static_cast<std::size_t>(alphabet_size);
  }
  return Word(std::span<const int>(letters));
}

std::vector<Word> enumerate_words(int alphabet_size, int max_len) {
  if (alphabet_size < 1 || max_len < 0) throw std::invalid_argument("enumerate_words: bad arguments");
  const std::size_t n = tensor_size(alphabet_size, max_len);
  std::vector<Word> out;
  out.reserve(n);
  out.emplace_back();
  // Level k+1 words are level k words extended by every letter, which keeps
  // the canonical (length, lex) order.
  std::size_t begin = 0;
  for (int k = 0; k < max_len; ++k) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (int l = 0; l < alphabet_size; ++l) out.push_back(out[i].appended(l));
    }
    begin = end;
  }
  return out;
}

namespace {

void shuffle_into(const Word& a, std::size_t ia, const Word& b, std::size_t ib, Word& acc,
                  std::map<Word, int>& out) {
  if (ia == a.size() && ib == b.size()) {
    ++out[acc];
    return;
  }
  if (ia < a.size()) {
    Word next = acc.appended(a[ia]);
    shuffle_into(a, ia + 1, b, ib, next, out);
  }
  if (ib < b.size()) {
    Word next = acc.appended(b[ib]);
    shuffle_into(a, ia, b, ib + 1, next, out);
  }
}

}  // namespace

std::map<Word, int> shuffle(const Word& a, const Word& b) {
  std::map<Word, int> out;
  Word acc;
  shuffle_into(a, 0, b, 0, acc, out);
  return out;
}

}  // namespace sigsde
