#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace interstitial::features {

/// (element, attribute) name pair; attribute is "" for a tag without attributes.
struct TagAttr {
    std::string tag;
    std::string attribute;
    auto operator<=>(const TagAttr&) const = default;
};

using PairCounts = std::map<TagAttr, std::size_t>;
using PairFrequencies = std::map<TagAttr, double>;

/// Lenient start-tag scanner. Never throws: comments, doctypes, processing
/// instructions, end tags, script/style bodies and truncated tags are
/// skipped. Names are ASCII-lowercased; non-ASCII bytes in names are dropped.
/// Repeated attributes within one tag count once.
PairCounts parse_html_pairs(std::string_view html);

PairFrequencies pair_frequencies(const PairCounts& pairs);

class Vocabulary {
public:
    Vocabulary() = default;
    /// Sorts and deduplicates.
    explicit Vocabulary(std::vector<TagAttr> pairs);

    const std::vector<TagAttr>& pairs() const { return pairs_; }
    std::size_t size() const { return pairs_.size(); }

    /// SHA-256 (hex) over the ordered pairs.
    std::string hash() const;

    friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

private:
    std::vector<TagAttr> pairs_;
};

Vocabulary build_vocabulary(const std::vector<PairFrequencies>& corpus);

struct FeatureVector {
    std::string vocab_hash;
    std::vector<double> values;
    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Keys outside the vocabulary are dropped.
FeatureVector vectorize(const PairFrequencies& freqs, const Vocabulary& vocab);

}  // namespace interstitial::features
