#pragma once

#include "adaffect/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace adaffect {

/// Word -> (valence, arousal) affective norms. Lookup is case-insensitive;
/// keys are stored lowercased.
struct AffectLexicon {
    struct Norms {
        double valence = 5.0;
        double arousal = 5.0;
    };
    std::map<std::string, Norms> entries;
    ScaleRange scale{1, 9};

    size_t size() const { return entries.size(); }
    std::optional<Norms> lookup(const std::string& word) const;
};

/// Lexicon file: header `word,valence_mean,arousal_mean`; extra columns are
/// ignored. Scores outside the declared scale are rejected.
AffectLexicon load_lexicon(const std::string& path, ScaleRange scale = {1, 9});

/// Lowercases and splits on non-letter boundaries. Multi-byte UTF-8
/// sequences count as letters so accented words survive intact; case
/// folding is ASCII-only.
std::vector<std::string> tokenize(const std::string& text);

struct TextScore {
    std::optional<double> valence; // missing when no token matched
    std::optional<double> arousal;
    double coverage = 0.0; // matched / total tokens
};

struct LexiconOptions {
    bool stem = false;           // crude suffix stripping, off by default
    bool drop_stopwords = false; // off by default
};

/// Mean lexicon V and A over the tokens present in the lexicon; duplicate
/// tokens count with multiplicity.
TextScore score_text(const std::string& text, const AffectLexicon& lexicon,
                     const LexiconOptions& opts = {});

/// Mean-threshold H/L labels for a corpus of per-ad scores: H iff the score
/// is strictly above the corpus mean (missing-score ads are excluded from
/// the mean and stay missing). Requires at least two scored ads.
std::vector<std::optional<Label>> label_corpus(const std::vector<std::optional<double>>& scores);

} // namespace adaffect
