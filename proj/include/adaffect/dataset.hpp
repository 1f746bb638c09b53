#pragma once

#include "adaffect/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace adaffect {

/// One advertisement with its expert ground truth.
struct AdRecord {
    std::string id;
    double duration_s = 0.0;
    Label expert_arousal = Label::Low;
    Label expert_valence = Label::Low;
    std::optional<std::string> caption_text;

    Quadrant quadrant() const { return quadrant_of(expert_arousal, expert_valence); }
};

/// Raters x ads matrices of ordinal A/V/E scores. Missing cells are NaN.
/// Immutable after load; row/column order is first-appearance file order.
struct RatingsTable {
    std::vector<std::string> raters;
    std::vector<std::string> ads;
    MatX arousal;    // raters x ads
    MatX valence;
    MatX engagement;
    ScaleRange arousal_scale{0, 4};
    ScaleRange valence_scale{-2, 2};
    ScaleRange engagement_scale{0, 4};

    const MatX& scores(Dimension d) const
    {
        switch (d) {
            case Dimension::Arousal: return arousal;
            case Dimension::Valence: return valence;
            case Dimension::Engagement: return engagement;
        }
        return arousal;
    }

    const ScaleRange& scale(Dimension d) const
    {
        switch (d) {
            case Dimension::Arousal: return arousal_scale;
            case Dimension::Valence: return valence_scale;
            case Dimension::Engagement: return engagement_scale;
        }
        return arousal_scale;
    }
};

/// Per-frame descriptor vectors with binary labels and task identifiers.
struct FeatureTable {
    struct RowMeta {
        std::string ad_id;
        int frame_index = 0;
        int task_id = 0;
        int label = +1; // +1 = H, -1 = L
    };

    std::vector<RowMeta> rows; // rows.size() == features.rows()
    MatX features;             // n x d, file order preserved
    int task_count = 1;

    Eigen::Index size() const { return features.rows(); }
    Eigen::Index dimension() const { return features.cols(); }
};

struct RatingsSchema {
    ScaleRange arousal{0, 4};
    ScaleRange valence{-2, 2};
    ScaleRange engagement{0, 4};
};

/// Ratings file: header `ad_id,rater_id,A,V,E`, one row per (ad, rater),
/// empty cell = missing rating.
RatingsTable load_ratings(const std::string& path, const RatingsSchema& schema = {});
void save_ratings(const RatingsTable& table, const std::string& path);

/// Features file: header `ad_id,frame_index,task_id,label,f0,...`; labels
/// are H/L strings on disk.
FeatureTable load_features(const std::string& path);
void save_features(const FeatureTable& table, const std::string& path);

/// Ads file: header `ad_id,duration_s,expert_arousal,expert_valence,caption_text`.
std::vector<AdRecord> load_ads(const std::string& path);
void save_ads(const std::vector<AdRecord>& ads, const std::string& path);

/// Per-quadrant means over the rated ads. Empty quadrants report missing
/// means, never zeros.
struct QuadrantStats {
    int ad_count = 0;
    std::optional<double> mean_length_s;
    std::optional<double> mean_arousal;
    std::optional<double> mean_valence;
    std::optional<double> mean_engagement;
};

std::array<QuadrantStats, 4> quadrant_summary(const RatingsTable& table,
                                              const std::vector<AdRecord>& ads);

} // namespace adaffect
