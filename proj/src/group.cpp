#include "gshift/group.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "gshift/errors.hpp"

namespace gshift {

Word concat(const Word& u, const Word& v) {
  Word out = u;
  out.letters.insert(out.letters.end(), v.letters.begin(), v.letters.end());
  return out;
}

bool shortlex_less(const Word& u, const Word& v) {
  if (u.size() != v.size()) return u.size() < v.size();
  return u.letters < v.letters;
}

void append_run(std::vector<Syllable>& runs, GenId letter, std::int64_t count) {
  if (count == 0) return;
  if (!runs.empty() && runs.back().letter == letter) {
    runs.back().count += count;
  } else {
    runs.push_back({letter, count});
  }
}

Element::Element(std::vector<Syllable> runs) : runs_(std::move(runs)) {
  std::size_t h = 0;
  for (const auto& r : runs_) {
    h ^= std::hash<std::uint64_t>{}((std::uint64_t(r.letter) << 40) ^
                                    std::uint64_t(r.count)) +
         0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  hash_ = h;
}

std::int64_t Element::letter_count() const {
  std::int64_t n = 0;
  for (const auto& r : runs_) n += r.count;
  return n;
}

Word Element::expand(std::size_t limit) const {
  Word w;
  for (const auto& r : runs_) {
    if (w.size() + std::size_t(r.count) > limit)
      throw MalformedInput("canonical word too long to expand");
    w.letters.insert(w.letters.end(), std::size_t(r.count), r.letter);
  }
  return w;
}

void Group::set_generators(const std::vector<std::string>& labels,
                           const std::vector<std::size_t>& inverses) {
  gens_.clear();
  moving_.clear();
  gens_.push_back({0, "1", 0, true});
  for (std::size_t i = 0; i < labels.size(); ++i) {
    GenId id = GenId(i + 1);
    gens_.push_back({id, labels[i], GenId(inverses.at(i) + 1), false});
    moving_.push_back(id);
  }
  for (const auto& g : gens_) {
    if (gens_.at(g.inverse).inverse != g.id)
      throw MalformedInput("generator inverses are not an involution");
  }
  for (std::size_t i = 0; i < gens_.size(); ++i)
    for (std::size_t j = i + 1; j < gens_.size(); ++j)
      if (gens_[i].display == gens_[j].display)
        throw MalformedInput("duplicate generator label '" + gens_[i].display + "'");
}

std::optional<GenId> Group::find_generator(std::string_view label) const {
  for (const auto& g : gens_)
    if (g.display == label) return g.id;
  return std::nullopt;
}

Element Group::multiply(const Element& g, GenId s, std::int64_t power) const {
  if (s >= gens_.size()) throw MalformedInput("invalid generator id");
  if (power < 0) throw MalformedInput("negative power");
  if (s == 0 || power == 0) return g;
  return right_multiply(g, s, power);
}

Element Group::multiply(const Element& g, const Element& h) const { return compose(g, h); }

Element Group::compose(const Element& g, const Element& h) const {
  Element out = g;
  for (const auto& r : h.runs()) out = multiply(out, r.letter, r.count);
  return out;
}

Element Group::multiply(const Element& g, const Word& w) const {
  validate(w);
  Element out = g;
  std::size_t i = 0;
  while (i < w.size()) {
    std::size_t j = i;
    while (j < w.size() && w.letters[j] == w.letters[i]) ++j;
    out = multiply(out, w.letters[i], std::int64_t(j - i));
    i = j;
  }
  return out;
}

Element Group::inverse(const Element& g) const { return invert(g); }

Element Group::invert(const Element& g) const {
  Element out;
  const auto& runs = g.runs();
  for (auto it = runs.rbegin(); it != runs.rend(); ++it)
    out = multiply(out, inverse(it->letter), it->count);
  return out;
}

void Group::validate(const Word& w) const {
  for (GenId s : w.letters)
    if (s >= gens_.size())
      throw MalformedInput("letter id " + std::to_string(s) + " is not a generator");
}

Word Group::inverse_word(const Word& w) const {
  validate(w);
  Word out;
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
    out.letters.push_back(inverse(*it));
  return out;
}

namespace {

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

Word parse_word(const Group& g, std::string_view text) {
  Word w;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) {
    if (tok == "ε") continue;
    if (auto id = g.find_generator(tok)) {
      w.letters.push_back(*id);
      continue;
    }
    auto caret = tok.rfind('^');
    std::optional<std::int64_t> k;
    std::optional<GenId> base;
    if (caret != std::string::npos) {
      k = parse_int(std::string_view(tok).substr(caret + 1));
      base = g.find_generator(std::string_view(tok).substr(0, caret));
    }
    if (!k || !base)
      throw MalformedInput("unknown generator '" + tok + "'");
    GenId letter = *k < 0 ? g.inverse(*base) : *base;
    std::int64_t n = *k < 0 ? -*k : *k;
    if (n > (1 << 20)) throw MalformedInput("exponent too large in '" + tok + "'");
    w.letters.insert(w.letters.end(), std::size_t(n), letter);
  }
  return w;
}

std::string format_word(const Group& g, const Word& w) {
  std::string out;
  for (GenId s : w.letters) {
    if (!out.empty()) out += ' ';
    out += g.label_of(s);
  }
  return out;
}

std::string format_element(const Group& group, const Element& e) {
  const Group& g = group.element_domain();
  std::string out;
  for (const auto& r : e.runs()) {
    if (r.count <= 3) {
      for (std::int64_t i = 0; i < r.count; ++i) {
        if (!out.empty()) out += ' ';
        out += g.label_of(r.letter);
      }
      continue;
    }
    if (!out.empty()) out += ' ';
    const std::string& lab = g.label_of(r.letter);
    const std::string& inv = g.label_of(g.inverse(r.letter));
    // Prefer "a^-5" over "a^-1^5" when the inverse is labeled that way.
    if (lab == inv + "^-1" && r.letter != g.inverse(r.letter))
      out += inv + "^-" + std::to_string(r.count);
    else
      out += lab + "^" + std::to_string(r.count);
  }
  return out;
}

}  // namespace gshift
