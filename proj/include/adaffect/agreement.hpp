#pragma once

#include "adaffect/dataset.hpp"
#include "adaffect/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace adaffect {

enum class AlphaMetric { Ordinal, Interval, Nominal };

inline const char* alpha_metric_name(AlphaMetric m)
{
    switch (m) {
        case AlphaMetric::Ordinal: return "ordinal";
        case AlphaMetric::Interval: return "interval";
        case AlphaMetric::Nominal: return "nominal";
    }
    return "?";
}

inline AlphaMetric parse_alpha_metric(const std::string& s)
{
    if (s == "ordinal") return AlphaMetric::Ordinal;
    if (s == "interval") return AlphaMetric::Interval;
    if (s == "nominal") return AlphaMetric::Nominal;
    throw ParseError("invalid agreement metric '" + s + "'");
}

/// Krippendorff's alpha over the units (ads) of one rating dimension.
/// Tolerates missing cells; units with fewer than two ratings are ignored.
/// All-identical ratings give 1.0 by convention (zero expected disagreement).
double krippendorff_alpha(const RatingsTable& table, Dimension dim,
                          AlphaMetric metric = AlphaMetric::Ordinal);

/// Cohen's kappa between two binary labelings of the same items.
double cohen_kappa(const std::vector<Label>& a, const std::vector<Label>& b);

/// Thresholds scores at their mean: strictly above -> H, otherwise L
/// (ties at the mean are L by the documented rule).
std::vector<Label> binarize_by_mean(const std::vector<double>& scores);

/// Benjamini-Hochberg step-up at level q. Returns per-test rejection flags:
/// sort p ascending, reject all i <= max{ i : p_(i) <= (i/m) q }.
std::vector<bool> benjamini_hochberg(const std::vector<double>& p_values, double q);

struct AgreementReport {
    std::map<std::string, double> krippendorff_alpha; // dimension name -> alpha
    std::map<std::string, double> cohen_kappa_per_rater;
    std::optional<double> mean_rater_kappa;
    std::optional<double> population_kappa;
    std::string method_notes;
};

/// Per-rater kappa versus expert ground truth: each rater's scores are
/// mean-thresholded to H/L, then compared with the expert labels.
std::map<std::string, double> per_rater_kappa(const RatingsTable& table, Dimension dim,
                                              const std::vector<AdRecord>& ads);

/// Population kappa: per-ad mean score across raters, thresholded by the
/// grand mean, versus expert labels. Separate path from per-rater kappa.
double population_kappa(const RatingsTable& table, Dimension dim,
                        const std::vector<AdRecord>& ads);

/// Full agreement report for one dimension; kappa sections are filled only
/// when expert-labeled ads are supplied.
AgreementReport agreement_report(const RatingsTable& table, Dimension dim, AlphaMetric metric,
                                 const std::vector<AdRecord>* ads = nullptr);

struct CorrelationPair {
    Dimension dim_i = Dimension::Arousal;
    Dimension dim_j = Dimension::Valence;
    std::optional<double> mean_r;  // mean per-rater Pearson r; missing if no rater had variance
    std::optional<double> max_p;   // largest per-rater p (binds "significant over all raters")
    bool significant_after_fdr = false;
};

struct RaterCorrelation {
    std::string rater;
    Dimension dim_i, dim_j;
    std::optional<double> r;
    std::optional<double> p;
    bool rejected = false;
};

struct CorrelationReport {
    std::vector<CorrelationPair> pairs;   // A-V, A-E, V-E
    std::vector<RaterCorrelation> tests;  // the underlying per-rater tests
    double fdr_q = 0.05;
};

/// Per-rater Pearson correlations between dimension pairs with BH-FDR over
/// all (rater x pair) tests. A pair is significant after FDR when every
/// rater's test for it was rejected.
CorrelationReport pearson_with_fdr(const RatingsTable& table, double q = 0.05);

/// Pearson correlation of two equal-length samples; missing (NaN) entries
/// are dropped pairwise. Returns nothing when either side has zero variance.
std::optional<double> pearson_r(const VecX& x, const VecX& y);

enum class WilcoxonMethod { Auto, Exact, Normal };

struct WilcoxonResult {
    double statistic = 0.0; // rank sum of the first sample, midranks for ties
    double p_value = 1.0;   // two-sided
    bool exact = false;
};

/// Wilcoxon rank-sum test. Auto uses exact enumeration when n+m <= 10 and
/// the tie-corrected normal approximation with continuity correction above.
WilcoxonResult wilcoxon_ranksum(const std::vector<double>& x, const std::vector<double>& y,
                                WilcoxonMethod method = WilcoxonMethod::Auto);

} // namespace adaffect
