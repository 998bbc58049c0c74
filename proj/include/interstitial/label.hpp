#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace interstitial {

enum class Label { no, yes, unlabeled };

/// Scores strictly below lo are "no", strictly above hi are "yes".
struct ScoreThresholds {
    double lo = 0.3;
    double hi = 0.75;
};

constexpr std::string_view to_string(Label label) {
    switch (label) {
        case Label::no: return "no";
        case Label::yes: return "yes";
        case Label::unlabeled: return "unlabeled";
    }
    return "unlabeled";
}

inline std::optional<Label> parse_label(std::string_view text) {
    if (text == "no") return Label::no;
    if (text == "yes") return Label::yes;
    if (text == "unlabeled") return Label::unlabeled;
    return std::nullopt;
}

}  // namespace interstitial
