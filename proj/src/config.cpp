#include "omegalab/config.hpp"

#include <cctype>
#include <charconv>

#include "omegalab/error.hpp"

namespace omegalab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

int parse_int(const std::string& text) {
  const std::string s = trim(text);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ValidationError("not an integer: '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, const std::string& sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(sep, pos);
    out.push_back(s.substr(pos, next - pos));
    if (next == std::string::npos) break;
    pos = next + sep.size();
  }
  return out;
}

}  // namespace

std::uint64_t parse_x(const std::string& text) {
  const std::string s = trim(text);
  std::string digits;
  long exp10 = 0;
  std::size_t i = 0;
  bool seen_point = false, any = false;
  for (; i < s.size(); ++i) {
    const char ch = s[i];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits += ch;
      any = true;
      if (seen_point) --exp10;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
    } else if (ch == '_' || ch == '\'') {
      continue;
    } else {
      break;
    }
  }
  if (!any) throw ValidationError("x: not a number: '" + text + "'");
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') throw ValidationError("x: unexpected character in '" + text + "'");
    ++i;
    const std::string e = s.substr(i);
    if (!e.empty() && e[0] == '+') exp10 += parse_int(e.substr(1));
    else exp10 += parse_int(e);
  }
  // strip trailing zeros into the exponent, leading zeros away
  while (digits.size() > 1 && digits.back() == '0' && exp10 < 0) {
    digits.pop_back();
    ++exp10;
  }
  std::size_t lead = digits.find_first_not_of('0');
  digits = lead == std::string::npos ? "0" : digits.substr(lead);
  if (exp10 < 0) {
    if (digits == "0") return 0;
    throw ValidationError("x: '" + text + "' is not an integer");
  }
  if (digits != "0" && digits.size() + exp10 > 19) throw ValidationError("x: '" + text + "' is too large");
  unsigned __int128 v = 0;
  for (char ch : digits) v = v * 10 + (ch - '0');
  for (long k = 0; k < exp10 && digits != "0"; ++k) v *= 10;
  if (v > (static_cast<unsigned __int128>(1) << 63)) throw ValidationError("x: '" + text + "' is too large");
  return static_cast<std::uint64_t>(v);
}

KVector parse_k(const std::string& text) {
  KVector k;
  for (const auto& part : split(trim(text), ",")) {
    const int v = parse_int(part);
    if (v < 0) throw ValidationError("k: negative entry in '" + text + "'");
    k.push_back(v);
  }
  return k;
}

std::vector<KVector> parse_k_grid(const std::string& text) {
  std::vector<std::vector<int>> axes;
  for (const auto& axis : split(trim(text), "x")) {
    const std::string a = trim(axis);
    std::vector<int> vals;
    const auto dots = a.find("..");
    if (dots == std::string::npos) {
      for (const auto& v : split(a, ",")) vals.push_back(parse_int(v));
    } else {
      const int lo = parse_int(a.substr(0, dots)), hi = parse_int(a.substr(dots + 2));
      if (hi < lo) throw ValidationError("k-grid: empty range '" + a + "'");
      for (int v = lo; v <= hi; ++v) vals.push_back(v);
    }
    for (int v : vals)
      if (v < 0) throw ValidationError("k-grid: negative entry in '" + text + "'");
    axes.push_back(vals);
  }
  std::vector<KVector> grid{{}};
  for (const auto& ax : axes) {
    std::vector<KVector> next;
    for (const auto& g : grid)
      for (int v : ax) {
        KVector k = g;
        k.push_back(v);
        next.push_back(k);
      }
    grid = std::move(next);
  }
  return grid;
}

}  // namespace omegalab
