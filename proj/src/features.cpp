#include "interstitial/features.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <memory>
#include <set>
#include <stdexcept>

namespace interstitial::features {

namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }
bool is_alpha(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

std::string normalize_name(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (unsigned char c : raw) {
        if (c < 0x21 || c >= 0x7f) continue;
        out.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
    }
    return out;
}

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
    if (s.size() - pos < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(s[pos + i]);
        if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
        if (c != static_cast<unsigned char>(prefix[i])) return false;
    }
    return true;
}

class Scanner {
public:
    explicit Scanner(std::string_view html) : s_(html) {}

    PairCounts run() {
        while (pos_ < s_.size()) {
            if (s_[pos_] != '<') {
                ++pos_;
                continue;
            }
            if (s_.compare(pos_, 4, "<!--") == 0) {
                skip_past("-->", pos_ + 4);
            } else if (pos_ + 1 < s_.size() && (s_[pos_ + 1] == '!' || s_[pos_ + 1] == '?' || s_[pos_ + 1] == '/')) {
                skip_past(">", pos_ + 1);
            } else if (pos_ + 1 < s_.size() && is_alpha(static_cast<unsigned char>(s_[pos_ + 1]))) {
                start_tag();
            } else {
                ++pos_;
            }
        }
        return std::move(counts_);
    }

private:
    void skip_past(std::string_view marker, std::size_t from) {
        const auto at = s_.find(marker, from);
        pos_ = at == std::string_view::npos ? s_.size() : at + marker.size();
    }

    void skip_spaces() {
        while (pos_ < s_.size() && is_space(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    // Returns false when the input ends inside the tag.
    bool read_attributes(std::vector<std::string>& names, bool& self_closing) {
        while (true) {
            while (pos_ < s_.size() && (is_space(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/')) {
                self_closing = s_[pos_] == '/';
                ++pos_;
            }
            if (pos_ >= s_.size()) return false;
            if (s_[pos_] == '>') {
                ++pos_;
                return true;
            }
            self_closing = false;
            const auto name_start = pos_++;
            while (pos_ < s_.size()) {
                const auto c = static_cast<unsigned char>(s_[pos_]);
                if (is_space(c) || c == '/' || c == '>' || c == '=') break;
                ++pos_;
            }
            names.push_back(normalize_name(s_.substr(name_start, pos_ - name_start)));
            skip_spaces();
            if (pos_ < s_.size() && s_[pos_] == '=') {
                ++pos_;
                skip_spaces();
                if (pos_ >= s_.size()) return false;
                const char q = s_[pos_];
                if (q == '"' || q == '\'') {
                    const auto close = s_.find(q, pos_ + 1);
                    if (close == std::string_view::npos) return false;
                    pos_ = close + 1;
                } else {
                    while (pos_ < s_.size() && !is_space(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '>') ++pos_;
                }
            }
        }
    }

    void start_tag() {
        const auto name_start = ++pos_;
        while (pos_ < s_.size()) {
            const auto c = static_cast<unsigned char>(s_[pos_]);
            if (is_space(c) || c == '/' || c == '>') break;
            ++pos_;
        }
        const auto tag = normalize_name(s_.substr(name_start, pos_ - name_start));
        std::vector<std::string> names;
        bool self_closing = false;
        if (!read_attributes(names, self_closing)) {
            pos_ = s_.size();
            return;
        }
        if (tag.empty()) return;

        std::set<std::string> seen;
        for (auto& n : names) {
            if (n.empty() || !seen.insert(n).second) continue;
            ++counts_[TagAttr{tag, n}];
        }
        if (seen.empty()) ++counts_[TagAttr{tag, ""}];

        if (!self_closing && (tag == "script" || tag == "style")) {
            const std::string close = "</" + tag;
            while (pos_ < s_.size()) {
                const auto at = s_.find("</", pos_);
                if (at == std::string_view::npos) {
                    pos_ = s_.size();
                    break;
                }
                pos_ = at;
                if (starts_with_ci(s_, at, close)) break;
                pos_ += 2;
            }
        }
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    PairCounts counts_;
};

}  // namespace

PairCounts parse_html_pairs(std::string_view html) { return Scanner(html).run(); }

PairFrequencies pair_frequencies(const PairCounts& pairs) {
    std::size_t total = 0;
    for (const auto& [key, count] : pairs) total += count;
    PairFrequencies freqs;
    if (total == 0) return freqs;
    for (const auto& [key, count] : pairs) {
        if (count > 0) freqs.emplace(key, static_cast<double>(count) / static_cast<double>(total));
    }
    return freqs;
}

Vocabulary::Vocabulary(std::vector<TagAttr> pairs) : pairs_(std::move(pairs)) {
    std::sort(pairs_.begin(), pairs_.end());
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

std::string Vocabulary::hash() const {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("Vocabulary::hash: SHA-256 unavailable");
    }
    for (const auto& p : pairs_) {
        const std::string line = p.tag + '\t' + p.attribute + '\n';
        EVP_DigestUpdate(ctx.get(), line.data(), line.size());
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        char buf[3];
        std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

Vocabulary build_vocabulary(const std::vector<PairFrequencies>& corpus) {
    std::vector<TagAttr> keys;
    for (const auto& doc : corpus) {
        for (const auto& [key, f] : doc) keys.push_back(key);
    }
    return Vocabulary(std::move(keys));
}

FeatureVector vectorize(const PairFrequencies& freqs, const Vocabulary& vocab) {
    FeatureVector out{vocab.hash(), std::vector<double>(vocab.size(), 0.0)};
    const auto& pairs = vocab.pairs();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (auto it = freqs.find(pairs[i]); it != freqs.end()) out.values[i] = it->second;
    }
    return out;
}

}  // namespace interstitial::features
