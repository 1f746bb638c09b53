#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace adaffect {

template <class Scalar, int Rows = Eigen::Dynamic, int Cols = Eigen::Dynamic>
using mat_t = Eigen::Matrix<Scalar, Rows, Cols>;

template <class Scalar, int Rows = Eigen::Dynamic>
using vec_t = Eigen::Matrix<Scalar, Rows, 1>;

using MatX = mat_t<double>;
using VecX = vec_t<double>;
using VecI = vec_t<int>;

/// Thrown when an input file cannot be parsed (bad header, ragged row, ...).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when parsed data violates a declared invariant (out-of-scale
/// score, non-finite feature, missing record, ...).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Binary affect label. High maps to +1 and Low to -1 everywhere; files
/// store the "H"/"L" strings and this is the single conversion point.
enum class Label : int { Low = -1, High = +1 };

inline int label_sign(Label l) { return static_cast<int>(l); }

inline Label label_from_sign(int s) { return s >= 0 ? Label::High : Label::Low; }

inline char label_char(Label l) { return l == Label::High ? 'H' : 'L'; }

inline Label parse_label(const std::string& s)
{
    if (s == "H" || s == "h") return Label::High;
    if (s == "L" || s == "l") return Label::Low;
    throw ParseError("invalid label '" + s + "' (expected H or L)");
}

/// Inclusive bounds of an ordinal rating scale with unit steps.
struct ScaleRange {
    double lo = 0.0;
    double hi = 4.0;

    bool contains(double v) const { return v >= lo && v <= hi; }

    bool on_step(double v, double eps = 1e-9) const
    {
        const double off = v - lo;
        return std::abs(off - std::round(off)) <= eps;
    }
};

/// Affect dimensions rated by annotators.
enum class Dimension { Arousal, Valence, Engagement };

inline const char* dimension_name(Dimension d)
{
    switch (d) {
        case Dimension::Arousal: return "A";
        case Dimension::Valence: return "V";
        case Dimension::Engagement: return "E";
    }
    return "?";
}

inline Dimension parse_dimension(const std::string& s)
{
    if (s == "A" || s == "a" || s == "arousal") return Dimension::Arousal;
    if (s == "V" || s == "v" || s == "valence") return Dimension::Valence;
    if (s == "E" || s == "e" || s == "engagement") return Dimension::Engagement;
    throw ParseError("invalid dimension '" + s + "'");
}

/// Arousal x valence quadrant, ordered as usually tabulated.
enum class Quadrant : int { HAHV = 0, LAHV = 1, LALV = 2, HALV = 3 };

inline Quadrant quadrant_of(Label arousal, Label valence)
{
    if (arousal == Label::High)
        return valence == Label::High ? Quadrant::HAHV : Quadrant::HALV;
    return valence == Label::High ? Quadrant::LAHV : Quadrant::LALV;
}

inline const char* quadrant_name(Quadrant q)
{
    switch (q) {
        case Quadrant::HAHV: return "HAHV";
        case Quadrant::LAHV: return "LAHV";
        case Quadrant::LALV: return "LALV";
        case Quadrant::HALV: return "HALV";
    }
    return "?";
}

} // namespace adaffect
