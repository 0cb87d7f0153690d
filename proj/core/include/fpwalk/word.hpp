#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fpwalk {

/// One letter a_k^{+1} or a_k^{-1} of the free group alphabet.
struct Letter {
  int generator = 1;  // 1-based index k of a_k
  int sign = 1;       // +1 or -1

  Letter inverse() const { return {generator, -sign}; }

  /// Dense code 2(k-1) + (sign < 0); the shortlex order follows it.
  int code() const { return 2 * (generator - 1) + (sign < 0 ? 1 : 0); }
  static Letter from_code(int code) { return {code / 2 + 1, (code % 2) ? -1 : 1}; }

  friend bool operator==(const Letter&, const Letter&) = default;
  friend auto operator<=>(const Letter& a, const Letter& b) { return a.code() <=> b.code(); }
};

/// Reduced word in F_m stored as exponent runs a_{k1}^{e1} a_{k2}^{e2} ...
/// with consecutive runs on distinct generators and nonzero exponents, so
/// a_k^n costs a single run. The empty word is the identity.
class Word {
 public:
  struct Run {
    int generator;
    int exponent;
    friend bool operator==(const Run&, const Run&) = default;
  };

  Word() = default;

  static Word letter(Letter l);
  static Word power(int generator, int exponent);
  /// Freely reduces an arbitrary letter sequence.
  static Word from_letters(std::span<const Letter> letters);

  std::size_t length() const { return length_; }
  bool is_identity() const { return runs_.empty(); }
  const std::vector<Run>& runs() const { return runs_; }

  std::vector<Letter> letters() const;
  Letter letter_at(std::size_t position) const;  // 0-based
  Letter first_letter() const;
  Letter last_letter() const;

  /// The first `len` letters (a geodesic prefix).
  Word prefix(std::size_t len) const;
  /// Letters from `pos` to the end; equals prefix(pos)^{-1} * (*this).
  Word suffix(std::size_t pos) const;

  /// True when the word is a_k^j for a single generator (identity excluded).
  bool is_power() const { return runs_.size() == 1; }
  int max_generator() const;

  std::string to_string() const;

  friend bool operator==(const Word& a, const Word& b) { return a.runs_ == b.runs_; }
  /// Shortlex: shorter words first, then letter codes lexicographically.
  friend std::strong_ordering operator<=>(const Word& a, const Word& b);

  std::size_t hash() const;

  friend Word multiply(const Word& x, const Word& y);
  friend Word invert(const Word& x);
  friend Word hat(const Word& x);

 private:
  void push_letter(Letter l);
  void append_run(int generator, int exponent);

  std::vector<Run> runs_;
  std::size_t length_ = 0;
};

struct WordHash {
  std::size_t operator()(const Word& w) const { return w.hash(); }
};

Word multiply(const Word& x, const Word& y);
inline Word operator*(const Word& x, const Word& y) { return multiply(x, y); }
Word invert(const Word& x);

/// Image under the automorphism a_i -> a_i^{-1}.
Word hat(const Word& x);

/// Word metric d_w(x, y) = |x^{-1} y|.
std::size_t distance(const Word& x, const Word& y);

/// h lies in the g-shadow C_fin(g), i.e. g is a prefix of h.
/// Throws PreconditionError for g = e.
bool in_shadow(const Word& h, const Word& g);

/// Parses `a<k>`, `a<k>^<exp>` and `e` tokens separated by whitespace and
/// returns the reduced product. Throws ParseError on bad syntax or a
/// generator index outside [1, rank].
Word parse_word(std::string_view text, int rank);

/// Number of letters in the token spelling of `text` before reduction;
/// parse_word(text).length() < this iff cancellation occurred.
std::size_t parse_unreduced_length(std::string_view text, int rank);

/// Bit-exact output grammar: single-space separated runs, `e` for identity.
std::string format_word(const Word& w);

/// Multiplicative extension of generator images: images[k-1] is the image
/// of a_k.
Word apply_endomorphism(std::span<const Word> images, const Word& w);

/// All 2m letters in code order.
std::vector<Letter> alphabet(int rank);

/// |B(e, r)| in F_m.
std::size_t ball_size(int rank, int radius);

/// Streams every word of B(center, radius) exactly once, in shortlex order of
/// center^{-1} w. `visit` returns false to stop early.
void for_each_in_ball(const Word& center, int radius, int rank,
                      const std::function<bool(const Word&)>& visit);

std::vector<Word> ball(const Word& center, int radius, int rank);

}  // namespace fpwalk

template <>
struct std::hash<fpwalk::Word> {
  std::size_t operator()(const fpwalk::Word& w) const { return w.hash(); }
};
