#include "ecgemo/text.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "ecgemo/emotion.hpp"
#include "ecgemo/error.hpp"

namespace ecgemo {

std::string_view name(Emotion e) {
  switch (e) {
    case Emotion::Happy: return "Happy";
    case Emotion::Exciting: return "Exciting";
    case Emotion::Calm: return "Calm";
    case Emotion::Tense: return "Tense";
  }
  return "?";
}

std::optional<Emotion> parse_emotion(std::string_view t) {
  t = text::trim(t);
  if (t.size() == 1 && t[0] >= '0' && t[0] <= '3') return static_cast<Emotion>(t[0] - '0');
  for (Emotion e : kAllEmotions) {
    const std::string_view n = name(e);
    if (n.size() != t.size()) continue;
    bool same = true;
    for (std::size_t i = 0; i < n.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(n[i])) != std::tolower(static_cast<unsigned char>(t[i]))) {
        same = false;
        break;
      }
    }
    if (same) return e;
  }
  return std::nullopt;
}

Emotion emotion_from_code(int c) {
  if (c < 0 || c >= static_cast<int>(kNumEmotions)) {
    throw DataError("emotion code out of range: " + std::to_string(c));
  }
  return static_cast<Emotion>(c);
}

namespace text {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

double parse_double(std::string_view field) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw DataError("not a number: '" + std::string(field) + "'");
  }
  return v;
}

long long parse_int(std::string_view field) {
  field = trim(field);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw DataError("not an integer: '" + std::string(field) + "'");
  }
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string format_percent(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", rate * 100.0);
  std::string s(buf);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s + "%";
}

}  // namespace text
}  // namespace ecgemo
