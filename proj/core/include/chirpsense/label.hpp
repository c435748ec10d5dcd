#pragma once

#include <array>
#include <string>

namespace chirpsense {

// The four expression classes. Index order matches the genre pairing used by
// the engagement rules (comedy<->happy, tragedy<->sad, anger<->angry,
// horror<->surprise), so keep it stable.
enum class ExpressionLabel : int {
    Happy = 0,
    SadNeutral = 1,
    Angry = 2,
    Surprise = 3,
};

inline constexpr int kNumClasses = 4;

inline constexpr std::array<ExpressionLabel, kNumClasses> all_labels() {
    return {ExpressionLabel::Happy, ExpressionLabel::SadNeutral,
            ExpressionLabel::Angry, ExpressionLabel::Surprise};
}

std::string to_string(ExpressionLabel label);

// Accepts the canonical names ("happy", "sad_neutral", "angry", "surprise")
// plus a few aliases; throws std::invalid_argument otherwise.
ExpressionLabel label_from_string(const std::string& name);

}  // namespace chirpsense
