#include "fpwalk/word.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>

#include "fpwalk/errors.hpp"

namespace fpwalk {

namespace {

int sign_of(int x) { return x < 0 ? -1 : 1; }

struct Token {
  int generator;
  long exponent;
};

// Splits on whitespace and decodes each token; identity tokens are dropped.
std::vector<Token> tokenize(std::string_view text, int rank) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    std::string_view tok = text.substr(i, j - i);
    i = j;

    if (tok == "e") continue;
    if (tok.size() < 2 || tok[0] != 'a') {
      throw ParseError("bad token '" + std::string(tok) + "': expected a<k>, a<k>^<exp> or e");
    }
    std::string_view body = tok.substr(1);
    std::string_view gen_part = body;
    std::string_view exp_part;
    if (auto caret = body.find('^'); caret != std::string_view::npos) {
      gen_part = body.substr(0, caret);
      exp_part = body.substr(caret + 1);
      if (exp_part.empty()) throw ParseError("missing exponent in '" + std::string(tok) + "'");
    }
    if (gen_part.empty() || !std::all_of(gen_part.begin(), gen_part.end(),
                                         [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      throw ParseError("bad generator index in '" + std::string(tok) + "'");
    }
    int gen = 0;
    auto [p1, ec1] = std::from_chars(gen_part.data(), gen_part.data() + gen_part.size(), gen);
    if (ec1 != std::errc() || p1 != gen_part.data() + gen_part.size()) {
      throw ParseError("bad generator index in '" + std::string(tok) + "'");
    }
    if (gen < 1 || gen > rank) {
      throw ParseError("generator a" + std::to_string(gen) + " outside rank " + std::to_string(rank));
    }
    long exponent = 1;
    if (!exp_part.empty()) {
      std::string_view digits = exp_part;
      if (digits.front() == '+') digits.remove_prefix(1);
      auto [p2, ec2] = std::from_chars(digits.data(), digits.data() + digits.size(), exponent);
      if (ec2 != std::errc() || p2 != digits.data() + digits.size()) {
        throw ParseError("bad exponent in '" + std::string(tok) + "'");
      }
      if (exponent == 0) throw ParseError("zero exponent in '" + std::string(tok) + "'");
      if (std::labs(exponent) > 1'000'000) throw ParseError("exponent too large in '" + std::string(tok) + "'");
    }
    tokens.push_back({gen, exponent});
  }
  return tokens;
}

}  // namespace

void Word::append_run(int generator, int exponent) {
  if (exponent == 0) return;
  if (!runs_.empty() && runs_.back().generator == generator) {
    Run& back = runs_.back();
    length_ -= static_cast<std::size_t>(std::abs(back.exponent));
    back.exponent += exponent;
    if (back.exponent == 0) {
      runs_.pop_back();
    } else {
      length_ += static_cast<std::size_t>(std::abs(back.exponent));
    }
    return;
  }
  runs_.push_back({generator, exponent});
  length_ += static_cast<std::size_t>(std::abs(exponent));
}

void Word::push_letter(Letter l) { append_run(l.generator, l.sign); }

Word Word::letter(Letter l) {
  Word w;
  w.push_letter(l);
  return w;
}

Word Word::power(int generator, int exponent) {
  Word w;
  w.append_run(generator, exponent);
  return w;
}

Word Word::from_letters(std::span<const Letter> letters) {
  Word w;
  for (const Letter& l : letters) w.push_letter(l);
  return w;
}

std::vector<Letter> Word::letters() const {
  std::vector<Letter> out;
  out.reserve(length_);
  for (const Run& r : runs_) {
    for (int k = 0; k < std::abs(r.exponent); ++k) out.push_back({r.generator, sign_of(r.exponent)});
  }
  return out;
}

Letter Word::letter_at(std::size_t position) const {
  for (const Run& r : runs_) {
    auto len = static_cast<std::size_t>(std::abs(r.exponent));
    if (position < len) return {r.generator, sign_of(r.exponent)};
    position -= len;
  }
  throw PreconditionError("letter_at: position beyond word length");
}

Letter Word::first_letter() const {
  if (runs_.empty()) throw PreconditionError("first_letter of identity");
  return {runs_.front().generator, sign_of(runs_.front().exponent)};
}

Letter Word::last_letter() const {
  if (runs_.empty()) throw PreconditionError("last_letter of identity");
  return {runs_.back().generator, sign_of(runs_.back().exponent)};
}

Word Word::prefix(std::size_t len) const {
  if (len >= length_) return *this;
  Word w;
  for (const Run& r : runs_) {
    if (len == 0) break;
    auto run_len = static_cast<std::size_t>(std::abs(r.exponent));
    std::size_t take = std::min(run_len, len);
    w.runs_.push_back({r.generator, sign_of(r.exponent) * static_cast<int>(take)});
    w.length_ += take;
    len -= take;
  }
  return w;
}

Word Word::suffix(std::size_t pos) const {
  if (pos == 0) return *this;
  Word w;
  if (pos >= length_) return w;
  for (const Run& r : runs_) {
    auto run_len = static_cast<std::size_t>(std::abs(r.exponent));
    if (pos >= run_len) {
      pos -= run_len;
      continue;
    }
    std::size_t keep = run_len - pos;
    pos = 0;
    w.runs_.push_back({r.generator, sign_of(r.exponent) * static_cast<int>(keep)});
    w.length_ += keep;
  }
  return w;
}

int Word::max_generator() const {
  int g = 0;
  for (const Run& r : runs_) g = std::max(g, r.generator);
  return g;
}

std::string Word::to_string() const { return format_word(*this); }

std::strong_ordering operator<=>(const Word& a, const Word& b) {
  if (auto c = a.length_ <=> b.length_; c != 0) return c;
  // Equal lengths: compare letter by letter, walking runs in lockstep.
  std::size_t ia = 0, ib = 0;
  int used_a = 0, used_b = 0;
  while (ia < a.runs_.size() && ib < b.runs_.size()) {
    const Word::Run& ra = a.runs_[ia];
    const Word::Run& rb = b.runs_[ib];
    Letter la{ra.generator, sign_of(ra.exponent)};
    Letter lb{rb.generator, sign_of(rb.exponent)};
    if (auto c = la.code() <=> lb.code(); c != 0) return c;
    int left_a = std::abs(ra.exponent) - used_a;
    int left_b = std::abs(rb.exponent) - used_b;
    int step = std::min(left_a, left_b);
    used_a += step;
    used_b += step;
    if (used_a == std::abs(ra.exponent)) {
      ++ia;
      used_a = 0;
    }
    if (used_b == std::abs(rb.exponent)) {
      ++ib;
      used_b = 0;
    }
  }
  return std::strong_ordering::equal;
}

std::size_t Word::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const Run& r : runs_) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(r.generator));
    h *= 1099511628211ULL;
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(r.exponent)) + 0x9e3779b97f4a7c15ULL;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

Word multiply(const Word& x, const Word& y) {
  Word out = x;
  // Cancellation cascades through append_run: a run that vanishes exposes
  // the previous tail to the next run of y.
  for (const Word::Run& r : y.runs_) out.append_run(r.generator, r.exponent);
  return out;
}

Word invert(const Word& x) {
  Word out;
  for (auto it = x.runs_.rbegin(); it != x.runs_.rend(); ++it) out.append_run(it->generator, -it->exponent);
  return out;
}

Word hat(const Word& x) {
  Word out;
  for (const Word::Run& r : x.runs_) out.append_run(r.generator, -r.exponent);
  return out;
}

std::size_t distance(const Word& x, const Word& y) { return multiply(invert(x), y).length(); }

bool in_shadow(const Word& h, const Word& g) {
  if (g.is_identity()) throw PreconditionError("shadow of the identity is undefined");
  if (h.length() < g.length()) return false;
  const auto& gr = g.runs();
  const auto& hr = h.runs();
  if (hr.size() < gr.size()) return false;
  for (std::size_t i = 0; i + 1 < gr.size(); ++i) {
    if (!(gr[i] == hr[i])) return false;
  }
  const Word::Run& gl = gr.back();
  const Word::Run& hl = hr[gr.size() - 1];
  return gl.generator == hl.generator && sign_of(gl.exponent) == sign_of(hl.exponent) &&
         std::abs(gl.exponent) <= std::abs(hl.exponent);
}

Word parse_word(std::string_view text, int rank) {
  Word w;
  for (const Token& t : tokenize(text, rank)) {
    w = multiply(w, Word::power(t.generator, static_cast<int>(t.exponent)));
  }
  return w;
}

std::size_t parse_unreduced_length(std::string_view text, int rank) {
  std::size_t total = 0;
  for (const Token& t : tokenize(text, rank)) total += static_cast<std::size_t>(std::labs(t.exponent));
  return total;
}

std::string format_word(const Word& w) {
  if (w.is_identity()) return "e";
  std::string out;
  for (const Word::Run& r : w.runs()) {
    if (!out.empty()) out += ' ';
    out += 'a';
    out += std::to_string(r.generator);
    if (r.exponent != 1) {
      out += '^';
      out += std::to_string(r.exponent);
    }
  }
  return out;
}

Word apply_endomorphism(std::span<const Word> images, const Word& w) {
  Word out;
  for (const Word::Run& r : w.runs()) {
    if (r.generator < 1 || static_cast<std::size_t>(r.generator) > images.size()) {
      throw PreconditionError("apply_endomorphism: no image for a" + std::to_string(r.generator));
    }
    const Word& img = images[static_cast<std::size_t>(r.generator - 1)];
    const Word piece = r.exponent > 0 ? img : invert(img);
    for (int k = 0; k < std::abs(r.exponent); ++k) out = multiply(out, piece);
  }
  return out;
}

std::vector<Letter> alphabet(int rank) {
  std::vector<Letter> out;
  out.reserve(static_cast<std::size_t>(2 * rank));
  for (int code = 0; code < 2 * rank; ++code) out.push_back(Letter::from_code(code));
  return out;
}

std::size_t ball_size(int rank, int radius) {
  if (radius < 0) return 0;
  std::size_t total = 1;
  std::size_t sphere = static_cast<std::size_t>(2 * rank);
  for (int r = 1; r <= radius; ++r) {
    total += sphere;
    sphere *= static_cast<std::size_t>(2 * rank - 1);
  }
  return total;
}

void for_each_in_ball(const Word& center, int radius, int rank,
                      const std::function<bool(const Word&)>& visit) {
  if (radius < 0) throw PreconditionError("ball radius must be nonnegative");
  // Breadth-first over spheres keeps memory at one sphere of offsets.
  std::vector<Word> sphere{Word{}};
  const std::vector<Letter> letters = alphabet(rank);
  for (int r = 0; r <= radius; ++r) {
    for (const Word& offset : sphere) {
      if (!visit(multiply(center, offset))) return;
    }
    if (r == radius) break;
    std::vector<Word> next;
    next.reserve(sphere.size() * static_cast<std::size_t>(2 * rank));
    for (const Word& offset : sphere) {
      for (const Letter& l : letters) {
        if (!offset.is_identity() && offset.last_letter() == l.inverse()) continue;
        next.push_back(multiply(offset, Word::letter(l)));
      }
    }
    sphere = std::move(next);
  }
}

std::vector<Word> ball(const Word& center, int radius, int rank) {
  std::vector<Word> out;
  out.reserve(ball_size(rank, radius));
  for_each_in_ball(center, radius, rank, [&](const Word& w) {
    out.push_back(w);
    return true;
  });
  return out;
}

}  // namespace fpwalk
