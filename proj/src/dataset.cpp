#include "adaffect/dataset.hpp"

#include "adaffect/csv.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>

namespace adaffect {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

void expect_header(const std::vector<std::string>& got,
                   const std::vector<std::string>& want, const std::string& path)
{
    if (got.size() < want.size())
        throw ParseError("'" + path + "': header has " + std::to_string(got.size()) +
                         " columns, expected at least " + std::to_string(want.size()));
    for (size_t i = 0; i < want.size(); ++i) {
        if (got[i] != want[i])
            throw ParseError("'" + path + "': header column " + std::to_string(i) +
                             " is '" + got[i] + "', expected '" + want[i] + "'");
    }
}

void check_score(double v, const ScaleRange& scale, Dimension dim,
                 const std::string& rater, const std::string& ad)
{
    if (!scale.contains(v) || !scale.on_step(v)) {
        throw ValidationError(std::string("score ") + csv::format_double(v) + " for rater '" +
                              rater + "', ad '" + ad + "', dimension " + dimension_name(dim) +
                              " is outside scale [" + csv::format_double(scale.lo) + "," +
                              csv::format_double(scale.hi) + "] or off its integer steps");
    }
}

} // namespace

RatingsTable load_ratings(const std::string& path, const RatingsSchema& schema)
{
    const csv::File f = csv::read_file(path);
    expect_header(f.header, {"ad_id", "rater_id", "A", "V", "E"}, path);

    RatingsTable t;
    t.arousal_scale = schema.arousal;
    t.valence_scale = schema.valence;
    t.engagement_scale = schema.engagement;

    std::map<std::string, int> rater_ix, ad_ix;
    struct Cell { int r, a; double av[3]; };
    std::vector<Cell> cells;
    std::set<std::pair<int, int>> seen;

    for (const auto& row : f.rows) {
        if (row.fields.size() != 5)
            throw ParseError("'" + path + "': line " + std::to_string(row.line_no) +
                             " has " + std::to_string(row.fields.size()) + " fields, expected 5");
        const std::string& ad = row.fields[0];
        const std::string& rater = row.fields[1];
        if (ad.empty() || rater.empty())
            throw ParseError("'" + path + "': empty ad_id or rater_id at line " +
                             std::to_string(row.line_no));

        auto [ai, ad_new] = ad_ix.try_emplace(ad, static_cast<int>(t.ads.size()));
        if (ad_new) t.ads.push_back(ad);
        auto [ri, rater_new] = rater_ix.try_emplace(rater, static_cast<int>(t.raters.size()));
        if (rater_new) t.raters.push_back(rater);

        if (!seen.emplace(ri->second, ai->second).second)
            throw ValidationError("'" + path + "': duplicate (ad '" + ad + "', rater '" +
                                  rater + "') at line " + std::to_string(row.line_no));

        Cell c{ri->second, ai->second, {kMissing, kMissing, kMissing}};
        const Dimension dims[3] = {Dimension::Arousal, Dimension::Valence, Dimension::Engagement};
        for (int k = 0; k < 3; ++k) {
            const std::string& field = row.fields[2 + k];
            if (field.empty()) continue; // missing cell
            const double v = csv::parse_double(field, "'" + path + "'", row.line_no);
            check_score(v, k == 0 ? schema.arousal : k == 1 ? schema.valence : schema.engagement,
                        dims[k], rater, ad);
            c.av[k] = v;
        }
        cells.push_back(c);
    }

    if (t.ads.empty()) throw ValidationError("'" + path + "': no ads");

    const auto nr = static_cast<Eigen::Index>(t.raters.size());
    const auto na = static_cast<Eigen::Index>(t.ads.size());
    t.arousal = MatX::Constant(nr, na, kMissing);
    t.valence = MatX::Constant(nr, na, kMissing);
    t.engagement = MatX::Constant(nr, na, kMissing);
    for (const Cell& c : cells) {
        t.arousal(c.r, c.a) = c.av[0];
        t.valence(c.r, c.a) = c.av[1];
        t.engagement(c.r, c.a) = c.av[2];
    }
    return t;
}

void save_ratings(const RatingsTable& table, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << "ad_id,rater_id,A,V,E\n";
    auto cell = [](double v) { return std::isnan(v) ? std::string() : csv::format_double(v); };
    for (size_t a = 0; a < table.ads.size(); ++a) {
        for (size_t r = 0; r < table.raters.size(); ++r) {
            const auto ri = static_cast<Eigen::Index>(r);
            const auto ai = static_cast<Eigen::Index>(a);
            out << csv::quote(table.ads[a]) << ',' << csv::quote(table.raters[r]) << ','
                << cell(table.arousal(ri, ai)) << ',' << cell(table.valence(ri, ai)) << ','
                << cell(table.engagement(ri, ai)) << '\n';
        }
    }
}

FeatureTable load_features(const std::string& path)
{
    const csv::File f = csv::read_file(path);
    expect_header(f.header, {"ad_id", "frame_index", "task_id", "label"}, path);
    if (f.header.size() < 5)
        throw ParseError("'" + path + "': no feature columns");
    const auto d = static_cast<Eigen::Index>(f.header.size() - 4);

    FeatureTable t;
    t.features.resize(static_cast<Eigen::Index>(f.rows.size()), d);
    int max_task = 0;
    for (size_t i = 0; i < f.rows.size(); ++i) {
        const auto& row = f.rows[i];
        if (static_cast<Eigen::Index>(row.fields.size()) != d + 4)
            throw ParseError("'" + path + "': ragged row at line " + std::to_string(row.line_no) +
                             " (" + std::to_string(row.fields.size()) + " fields, expected " +
                             std::to_string(d + 4) + ")");
        FeatureTable::RowMeta m;
        m.ad_id = row.fields[0];
        m.frame_index = static_cast<int>(csv::parse_int(row.fields[1], "'" + path + "'", row.line_no));
        m.task_id = static_cast<int>(csv::parse_int(row.fields[2], "'" + path + "'", row.line_no));
        m.label = label_sign(parse_label(row.fields[3]));
        if (m.frame_index < 0)
            throw ValidationError("'" + path + "': negative frame_index at line " +
                                  std::to_string(row.line_no));
        if (m.task_id < 0)
            throw ValidationError("'" + path + "': negative task_id at line " +
                                  std::to_string(row.line_no));
        max_task = std::max(max_task, m.task_id);
        for (Eigen::Index k = 0; k < d; ++k) {
            const double v = csv::parse_double(row.fields[4 + static_cast<size_t>(k)],
                                               "'" + path + "'", row.line_no);
            if (!std::isfinite(v))
                throw ValidationError("'" + path + "': non-finite feature value at line " +
                                      std::to_string(row.line_no));
            t.features(static_cast<Eigen::Index>(i), k) = v;
        }
        t.rows.push_back(std::move(m));
    }
    t.task_count = max_task + 1;
    return t;
}

void save_features(const FeatureTable& table, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << "ad_id,frame_index,task_id,label";
    for (Eigen::Index k = 0; k < table.dimension(); ++k) out << ",f" << k;
    out << '\n';
    for (Eigen::Index i = 0; i < table.size(); ++i) {
        const auto& m = table.rows[static_cast<size_t>(i)];
        out << csv::quote(m.ad_id) << ',' << m.frame_index << ',' << m.task_id << ','
            << label_char(label_from_sign(m.label));
        for (Eigen::Index k = 0; k < table.dimension(); ++k)
            out << ',' << csv::format_double(table.features(i, k));
        out << '\n';
    }
}

std::vector<AdRecord> load_ads(const std::string& path)
{
    const csv::File f = csv::read_file(path);
    expect_header(f.header, {"ad_id", "duration_s", "expert_arousal", "expert_valence"}, path);
    const bool has_caption = f.header.size() >= 5 && f.header[4] == "caption_text";

    std::vector<AdRecord> ads;
    std::set<std::string> ids;
    for (const auto& row : f.rows) {
        if (row.fields.size() < 4)
            throw ParseError("'" + path + "': line " + std::to_string(row.line_no) +
                             " has too few fields");
        AdRecord ad;
        ad.id = row.fields[0];
        ad.duration_s = csv::parse_double(row.fields[1], "'" + path + "'", row.line_no);
        if (!(ad.duration_s > 0))
            throw ValidationError("'" + path + "': non-positive duration for ad '" + ad.id +
                                  "' at line " + std::to_string(row.line_no));
        ad.expert_arousal = parse_label(row.fields[2]);
        ad.expert_valence = parse_label(row.fields[3]);
        if (has_caption && row.fields.size() >= 5 && !row.fields[4].empty())
            ad.caption_text = row.fields[4];
        if (!ids.insert(ad.id).second)
            throw ValidationError("'" + path + "': duplicate ad_id '" + ad.id + "'");
        ads.push_back(std::move(ad));
    }
    return ads;
}

void save_ads(const std::vector<AdRecord>& ads, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << "ad_id,duration_s,expert_arousal,expert_valence,caption_text\n";
    for (const auto& ad : ads) {
        out << csv::quote(ad.id) << ',' << csv::format_double(ad.duration_s) << ','
            << label_char(ad.expert_arousal) << ',' << label_char(ad.expert_valence) << ','
            << (ad.caption_text ? csv::quote(*ad.caption_text) : std::string()) << '\n';
    }
}

std::array<QuadrantStats, 4> quadrant_summary(const RatingsTable& table,
                                              const std::vector<AdRecord>& ads)
{
    std::map<std::string, const AdRecord*> by_id;
    for (const auto& ad : ads) by_id.emplace(ad.id, &ad);

    struct Acc {
        double len = 0; int n_ads = 0;
        double sum[3] = {0, 0, 0};
        long cnt[3] = {0, 0, 0};
    };
    std::array<Acc, 4> acc;

    for (size_t a = 0; a < table.ads.size(); ++a) {
        const auto it = by_id.find(table.ads[a]);
        if (it == by_id.end())
            throw ValidationError("ad '" + table.ads[a] + "' has ratings but no AdRecord");
        const int q = static_cast<int>(it->second->quadrant());
        acc[q].len += it->second->duration_s;
        acc[q].n_ads += 1;
        const MatX* mats[3] = {&table.arousal, &table.valence, &table.engagement};
        for (int k = 0; k < 3; ++k) {
            for (Eigen::Index r = 0; r < mats[k]->rows(); ++r) {
                const double v = (*mats[k])(r, static_cast<Eigen::Index>(a));
                if (!std::isnan(v)) {
                    acc[q].sum[k] += v;
                    acc[q].cnt[k] += 1;
                }
            }
        }
    }

    std::array<QuadrantStats, 4> out;
    for (int q = 0; q < 4; ++q) {
        out[q].ad_count = acc[q].n_ads;
        if (acc[q].n_ads > 0) out[q].mean_length_s = acc[q].len / acc[q].n_ads;
        auto mean = [&](int k) -> std::optional<double> {
            if (acc[q].cnt[k] == 0) return std::nullopt;
            return acc[q].sum[k] / static_cast<double>(acc[q].cnt[k]);
        };
        out[q].mean_arousal = mean(0);
        out[q].mean_valence = mean(1);
        out[q].mean_engagement = mean(2);
    }
    return out;
}

} // namespace adaffect
