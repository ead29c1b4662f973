#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace ecgemo {

/// The four recognised emotions. The integer codes are part of every file format.
enum class Emotion : int { Happy = 0, Exciting = 1, Calm = 2, Tense = 3 };

inline constexpr std::size_t kNumEmotions = 4;

inline constexpr std::array<Emotion, kNumEmotions> kAllEmotions = {
    Emotion::Happy, Emotion::Exciting, Emotion::Calm, Emotion::Tense};

constexpr int code(Emotion e) { return static_cast<int>(e); }

std::string_view name(Emotion e);

/// Parses "calm", "Calm" or "2". Returns nullopt on anything else.
std::optional<Emotion> parse_emotion(std::string_view text);

/// Throws DataError when `c` is outside 0..3.
Emotion emotion_from_code(int c);

}  // namespace ecgemo
