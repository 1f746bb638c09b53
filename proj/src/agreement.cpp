#include "adaffect/agreement.hpp"

#include "adaffect/stats_math.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace adaffect {

namespace {

// Squared difference between the c-th and k-th ordered values given the
// coincidence marginals n_g (ordinal), the values themselves (interval), or
// identity (nominal).
double delta_sq(AlphaMetric metric, const std::vector<double>& values,
                const std::vector<double>& marginals, size_t c, size_t k)
{
    if (c == k) return 0.0;
    switch (metric) {
        case AlphaMetric::Nominal: return 1.0;
        case AlphaMetric::Interval: {
            const double d = values[c] - values[k];
            return d * d;
        }
        case AlphaMetric::Ordinal: {
            const size_t lo = std::min(c, k), hi = std::max(c, k);
            double s = 0.0;
            for (size_t g = lo; g <= hi; ++g) s += marginals[g];
            s -= (marginals[lo] + marginals[hi]) / 2.0;
            return s * s;
        }
    }
    return 0.0;
}

} // namespace

double krippendorff_alpha(const RatingsTable& table, Dimension dim, AlphaMetric metric)
{
    const MatX& m = table.scores(dim);
    if (table.raters.size() < 2)
        throw ValidationError("krippendorff_alpha: need at least 2 raters");

    // Distinct values present, ordered by scale position.
    std::vector<double> values;
    for (Eigen::Index a = 0; a < m.cols(); ++a)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            if (!std::isnan(m(r, a))) values.push_back(m(r, a));
    if (values.empty()) throw ValidationError("krippendorff_alpha: all cells missing");
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    const size_t nv = values.size();
    auto index_of = [&](double v) {
        return static_cast<size_t>(std::lower_bound(values.begin(), values.end(), v) -
                                   values.begin());
    };

    // Coincidence matrix: each pairable unit contributes its ordered rating
    // pairs, weighted by 1/(m_u - 1).
    MatX coincidence = MatX::Zero(static_cast<Eigen::Index>(nv), static_cast<Eigen::Index>(nv));
    bool any_pairable = false;
    for (Eigen::Index a = 0; a < m.cols(); ++a) {
        std::vector<size_t> unit;
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            if (!std::isnan(m(r, a))) unit.push_back(index_of(m(r, a)));
        if (unit.size() < 2) continue;
        any_pairable = true;
        const double w = 1.0 / static_cast<double>(unit.size() - 1);
        for (size_t i = 0; i < unit.size(); ++i)
            for (size_t j = 0; j < unit.size(); ++j)
                if (i != j)
                    coincidence(static_cast<Eigen::Index>(unit[i]),
                                static_cast<Eigen::Index>(unit[j])) += w;
    }
    if (!any_pairable)
        throw ValidationError("krippendorff_alpha: no unit has two or more ratings");

    std::vector<double> marginals(nv, 0.0);
    for (size_t c = 0; c < nv; ++c)
        marginals[c] = coincidence.row(static_cast<Eigen::Index>(c)).sum();
    const double n = std::accumulate(marginals.begin(), marginals.end(), 0.0);

    double d_obs = 0.0, d_exp = 0.0;
    for (size_t c = 0; c < nv; ++c) {
        for (size_t k = 0; k < nv; ++k) {
            const double d2 = delta_sq(metric, values, marginals, c, k);
            d_obs += coincidence(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k)) * d2;
            d_exp += marginals[c] * marginals[k] * d2;
        }
    }
    d_obs /= n;
    d_exp /= n * (n - 1.0);
    if (d_exp == 0.0) return 1.0; // all ratings identical
    return 1.0 - d_obs / d_exp;
}

double cohen_kappa(const std::vector<Label>& a, const std::vector<Label>& b)
{
    if (a.size() != b.size())
        throw ValidationError("cohen_kappa: sequences have different lengths");
    if (a.empty()) throw ValidationError("cohen_kappa: empty sequences");

    const double n = static_cast<double>(a.size());
    double agree = 0, a_high = 0, b_high = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) agree += 1;
        if (a[i] == Label::High) a_high += 1;
        if (b[i] == Label::High) b_high += 1;
    }
    const double p_o = agree / n;
    const double p_e = (a_high / n) * (b_high / n) + (1 - a_high / n) * (1 - b_high / n);
    if (p_e >= 1.0) return p_o == 1.0 ? 1.0 : 0.0;
    return (p_o - p_e) / (1.0 - p_e);
}

std::vector<Label> binarize_by_mean(const std::vector<double>& scores)
{
    if (scores.empty()) throw ValidationError("binarize_by_mean: empty sequence");
    const double mean =
        std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
    std::vector<Label> out;
    out.reserve(scores.size());
    for (double s : scores) out.push_back(s > mean ? Label::High : Label::Low);
    return out;
}

std::vector<bool> benjamini_hochberg(const std::vector<double>& p_values, double q)
{
    const size_t m = p_values.size();
    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t i, size_t j) { return p_values[i] < p_values[j]; });

    size_t cutoff = 0; // number of rejections
    for (size_t i = 0; i < m; ++i) {
        const double bound = q * static_cast<double>(i + 1) / static_cast<double>(m);
        if (p_values[order[i]] <= bound) cutoff = i + 1;
    }
    std::vector<bool> rejected(m, false);
    for (size_t i = 0; i < cutoff; ++i) rejected[order[i]] = true;
    return rejected;
}

namespace {

std::vector<Label> expert_labels_for(const std::vector<AdRecord>& ads,
                                     const std::vector<std::string>& order, Dimension dim)
{
    std::map<std::string, const AdRecord*> by_id;
    for (const auto& ad : ads) by_id.emplace(ad.id, &ad);
    std::vector<Label> out;
    out.reserve(order.size());
    for (const auto& id : order) {
        const auto it = by_id.find(id);
        if (it == by_id.end())
            throw ValidationError("no AdRecord for rated ad '" + id + "'");
        out.push_back(dim == Dimension::Valence ? it->second->expert_valence
                                                : it->second->expert_arousal);
    }
    return out;
}

} // namespace

std::map<std::string, double> per_rater_kappa(const RatingsTable& table, Dimension dim,
                                              const std::vector<AdRecord>& ads)
{
    const auto truth = expert_labels_for(ads, table.ads, dim);
    const MatX& m = table.scores(dim);
    std::map<std::string, double> out;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::vector<double> scores;
        std::vector<Label> ref;
        for (Eigen::Index a = 0; a < m.cols(); ++a) {
            if (std::isnan(m(r, a))) continue;
            scores.push_back(m(r, a));
            ref.push_back(truth[static_cast<size_t>(a)]);
        }
        if (scores.empty()) continue;
        out[table.raters[static_cast<size_t>(r)]] = cohen_kappa(binarize_by_mean(scores), ref);
    }
    return out;
}

double population_kappa(const RatingsTable& table, Dimension dim,
                        const std::vector<AdRecord>& ads)
{
    const auto truth = expert_labels_for(ads, table.ads, dim);
    const MatX& m = table.scores(dim);
    std::vector<double> means;
    std::vector<Label> ref;
    for (Eigen::Index a = 0; a < m.cols(); ++a) {
        double sum = 0;
        int cnt = 0;
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            if (!std::isnan(m(r, a))) {
                sum += m(r, a);
                ++cnt;
            }
        }
        if (cnt == 0) continue;
        means.push_back(sum / cnt);
        ref.push_back(truth[static_cast<size_t>(a)]);
    }
    if (means.empty()) throw ValidationError("population_kappa: all cells missing");
    return cohen_kappa(binarize_by_mean(means), ref);
}

AgreementReport agreement_report(const RatingsTable& table, Dimension dim, AlphaMetric metric,
                                 const std::vector<AdRecord>* ads)
{
    AgreementReport rep;
    rep.krippendorff_alpha[dimension_name(dim)] = krippendorff_alpha(table, dim, metric);
    rep.method_notes = std::string("alpha difference metric: ") + alpha_metric_name(metric) +
                       "; ties at the mean threshold label L";
    if (ads && dim != Dimension::Engagement) {
        rep.cohen_kappa_per_rater = per_rater_kappa(table, dim, *ads);
        if (!rep.cohen_kappa_per_rater.empty()) {
            double s = 0;
            for (const auto& [_, k] : rep.cohen_kappa_per_rater) s += k;
            rep.mean_rater_kappa = s / static_cast<double>(rep.cohen_kappa_per_rater.size());
        }
        rep.population_kappa = population_kappa(table, dim, *ads);
    }
    return rep;
}

std::optional<double> pearson_r(const VecX& x, const VecX& y)
{
    double sx = 0, sy = 0;
    int n = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (std::isnan(x[i]) || std::isnan(y[i])) continue;
        sx += x[i];
        sy += y[i];
        ++n;
    }
    if (n < 2) return std::nullopt;
    const double mx = sx / n, my = sy / n;
    double sxx = 0, syy = 0, sxy = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (std::isnan(x[i]) || std::isnan(y[i])) continue;
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

CorrelationReport pearson_with_fdr(const RatingsTable& table, double q)
{
    if (table.ads.size() < 3)
        throw ValidationError("pearson_with_fdr: need at least 3 ads");

    const std::pair<Dimension, Dimension> dim_pairs[3] = {
        {Dimension::Arousal, Dimension::Valence},
        {Dimension::Arousal, Dimension::Engagement},
        {Dimension::Valence, Dimension::Engagement}};

    CorrelationReport rep;
    rep.fdr_q = q;

    std::vector<double> pvals;
    std::vector<size_t> test_ix; // index into rep.tests for each p-value
    for (const auto& [di, dj] : dim_pairs) {
        for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(table.raters.size()); ++r) {
            RaterCorrelation t;
            t.rater = table.raters[static_cast<size_t>(r)];
            t.dim_i = di;
            t.dim_j = dj;
            VecX xi = table.scores(di).row(r).transpose();
            VecX xj = table.scores(dj).row(r).transpose();
            t.r = pearson_r(xi, xj);
            if (t.r) {
                int n = 0;
                for (Eigen::Index a = 0; a < xi.size(); ++a)
                    if (!std::isnan(xi[a]) && !std::isnan(xj[a])) ++n;
                if (n > 2) {
                    const double rr = std::min(0.999999999999, std::abs(*t.r));
                    const double tstat = rr * std::sqrt((n - 2) / (1.0 - rr * rr));
                    t.p = t_two_sided_p(tstat, n - 2);
                    pvals.push_back(*t.p);
                    test_ix.push_back(rep.tests.size());
                }
            }
            rep.tests.push_back(std::move(t));
        }
    }

    const auto rejected = benjamini_hochberg(pvals, q);
    for (size_t k = 0; k < rejected.size(); ++k) rep.tests[test_ix[k]].rejected = rejected[k];

    for (const auto& [di, dj] : dim_pairs) {
        CorrelationPair pair;
        pair.dim_i = di;
        pair.dim_j = dj;
        double rsum = 0;
        int rcnt = 0;
        bool all_rejected = true;
        bool any_test = false;
        for (const auto& t : rep.tests) {
            if (t.dim_i != di || t.dim_j != dj) continue;
            if (t.r) {
                rsum += *t.r;
                ++rcnt;
            }
            if (t.p) {
                any_test = true;
                if (!pair.max_p || *t.p > *pair.max_p) pair.max_p = t.p;
                all_rejected = all_rejected && t.rejected;
            } else {
                all_rejected = false; // an untestable rater blocks the pair
            }
        }
        if (rcnt > 0) pair.mean_r = rsum / rcnt;
        pair.significant_after_fdr = any_test && all_rejected;
        rep.pairs.push_back(pair);
    }
    return rep;
}

namespace {

// Midranks of the pooled sample; returns ranks aligned with pooled order.
std::vector<double> midranks(const std::vector<double>& pooled_sorted)
{
    const size_t n = pooled_sorted.size();
    std::vector<double> rank(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && pooled_sorted[j + 1] == pooled_sorted[i]) ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (size_t k = i; k <= j; ++k) rank[k] = mid;
        i = j + 1;
    }
    return rank;
}

} // namespace

WilcoxonResult wilcoxon_ranksum(const std::vector<double>& x, const std::vector<double>& y,
                                WilcoxonMethod method)
{
    if (x.empty() || y.empty())
        throw ValidationError("wilcoxon_ranksum: both samples must be nonempty");
    const size_t n = x.size(), m = y.size(), N = n + m;

    std::vector<double> pooled;
    pooled.reserve(N);
    pooled.insert(pooled.end(), x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    std::vector<size_t> order(N);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return pooled[a] < pooled[b]; });
    std::vector<double> sorted(N);
    for (size_t i = 0; i < N; ++i) sorted[i] = pooled[order[i]];
    const auto ranks_sorted = midranks(sorted);
    std::vector<double> rank(N);
    for (size_t i = 0; i < N; ++i) rank[order[i]] = ranks_sorted[i];

    double w = 0;
    for (size_t i = 0; i < n; ++i) w += rank[i];

    WilcoxonResult res;
    res.statistic = w;
    const double mean_w = static_cast<double>(n) * (N + 1) / 2.0;

    const bool use_exact =
        method == WilcoxonMethod::Exact || (method == WilcoxonMethod::Auto && N <= 10);
    if (use_exact) {
        // Enumerate all assignments of n pooled ranks to the first sample and
        // count |W - E[W]| at least as extreme as observed.
        res.exact = true;
        const double dev = std::abs(w - mean_w);
        long long total = 0, extreme = 0;
        std::vector<size_t> comb(n);
        std::iota(comb.begin(), comb.end(), size_t{0});
        for (;;) {
            double ws = 0;
            for (size_t i : comb) ws += ranks_sorted[i];
            ++total;
            if (std::abs(ws - mean_w) >= dev - 1e-12) ++extreme;
            // next combination
            size_t k = n;
            while (k > 0) {
                --k;
                if (comb[k] != k + N - n) {
                    ++comb[k];
                    for (size_t j = k + 1; j < n; ++j) comb[j] = comb[j - 1] + 1;
                    break;
                }
                if (k == 0) {
                    res.p_value = static_cast<double>(extreme) / static_cast<double>(total);
                    return res;
                }
            }
            if (n == 0) break;
        }
        res.p_value = static_cast<double>(extreme) / static_cast<double>(total);
        return res;
    }

    // Normal approximation with tie-corrected variance and continuity correction.
    double tie_term = 0;
    size_t i = 0;
    while (i < N) {
        size_t j = i;
        while (j + 1 < N && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    const double var_w = (static_cast<double>(n) * m / 12.0) *
                         (N + 1 - tie_term / (static_cast<double>(N) * (N - 1)));
    if (var_w <= 0.0) {
        res.p_value = 1.0; // all values tied across both samples
        return res;
    }
    const double dev = std::abs(w - mean_w);
    const double z = std::max(0.0, dev - 0.5) / std::sqrt(var_w);
    res.p_value = std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
    return res;
}

} // namespace adaffect
