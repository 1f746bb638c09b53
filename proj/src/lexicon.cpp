#include "adaffect/lexicon.hpp"

#include "adaffect/csv.hpp"

#include <array>
#include <cctype>

namespace adaffect {

std::optional<AffectLexicon::Norms> AffectLexicon::lookup(const std::string& word) const
{
    std::string key = word;
    for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    return it->second;
}

AffectLexicon load_lexicon(const std::string& path, ScaleRange scale)
{
    const csv::File f = csv::read_file(path);
    if (f.header.size() < 3 || f.header[0] != "word" || f.header[1] != "valence_mean" ||
        f.header[2] != "arousal_mean")
        throw ParseError("'" + path + "': expected header word,valence_mean,arousal_mean");

    AffectLexicon lex;
    lex.scale = scale;
    for (const auto& row : f.rows) {
        if (row.fields.size() < 3)
            throw ParseError("'" + path + "': too few fields at line " +
                             std::to_string(row.line_no));
        std::string word = row.fields[0];
        for (char& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        AffectLexicon::Norms n;
        n.valence = csv::parse_double(row.fields[1], "'" + path + "'", row.line_no);
        n.arousal = csv::parse_double(row.fields[2], "'" + path + "'", row.line_no);
        if (!scale.contains(n.valence) || !scale.contains(n.arousal))
            throw ValidationError("'" + path + "': norms for '" + word + "' outside scale [" +
                                  csv::format_double(scale.lo) + "," +
                                  csv::format_double(scale.hi) + "]");
        lex.entries[word] = n;
    }
    return lex;
}

std::vector<std::string> tokenize(const std::string& text)
{
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        const bool letter = std::isalpha(c) || c >= 0x80;
        if (letter) {
            cur += static_cast<char>(std::tolower(c));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

namespace {

const std::array<const char*, 24> kStopwords = {
    "a", "an",  "the", "and", "or",  "of",  "to",  "in",   "on",   "at",  "is",  "are",
    "it", "its", "for", "with", "as", "be",  "this", "that", "was", "were", "by", "from"};

bool is_stopword(const std::string& w)
{
    for (const char* s : kStopwords)
        if (w == s) return true;
    return false;
}

// crude suffix stripping, only applied on request
std::string stem(const std::string& w)
{
    auto ends = [&](const char* suf) {
        const size_t n = std::string(suf).size();
        return w.size() > n + 2 && w.compare(w.size() - n, n, suf) == 0;
    };
    if (ends("ing")) return w.substr(0, w.size() - 3);
    if (ends("ed")) return w.substr(0, w.size() - 2);
    if (ends("es")) return w.substr(0, w.size() - 2);
    if (ends("s")) return w.substr(0, w.size() - 1);
    return w;
}

} // namespace

TextScore score_text(const std::string& text, const AffectLexicon& lexicon,
                     const LexiconOptions& opts)
{
    if (lexicon.entries.empty()) throw ValidationError("score_text: empty lexicon");
    auto tokens = tokenize(text);
    if (opts.drop_stopwords) {
        std::erase_if(tokens, is_stopword);
    }

    TextScore out;
    if (tokens.empty()) return out;
    std::vector<std::pair<double, double>> matched;
    for (const auto& tok : tokens) {
        auto norms = lexicon.lookup(tok);
        if (!norms && opts.stem) norms = lexicon.lookup(stem(tok));
        if (norms) matched.emplace_back(norms->valence, norms->arousal);
    }
    out.coverage = static_cast<double>(matched.size()) / static_cast<double>(tokens.size());
    if (!matched.empty()) {
        // summing in sorted order keeps the mean independent of token order
        std::sort(matched.begin(), matched.end());
        double sv = 0, sa = 0;
        for (const auto& [v, a] : matched) {
            sv += v;
            sa += a;
        }
        out.valence = sv / static_cast<double>(matched.size());
        out.arousal = sa / static_cast<double>(matched.size());
    }
    return out;
}

std::vector<std::optional<Label>> label_corpus(const std::vector<std::optional<double>>& scores)
{
    double sum = 0;
    int n = 0;
    for (const auto& s : scores) {
        if (s) {
            sum += *s;
            ++n;
        }
    }
    if (n == 0) throw ValidationError("label_corpus: all scores missing");
    if (n < 2) throw ValidationError("label_corpus: need at least 2 scored ads");
    const double mean = sum / n;
    std::vector<std::optional<Label>> out;
    out.reserve(scores.size());
    for (const auto& s : scores) {
        if (!s) {
            out.push_back(std::nullopt);
        } else {
            out.push_back(*s > mean ? Label::High : Label::Low);
        }
    }
    return out;
}

} // namespace adaffect
