#include "fusekit/scores.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fusekit {

Label label_from_string(const std::string& s) {
    if (s == "genuine") return Label::genuine;
    if (s == "impostor") return Label::impostor;
    throw std::invalid_argument("unknown label '" + s + "' (expected genuine or impostor)");
}

std::vector<double> ScoreSet::genuine_scores() const {
    std::vector<double> out;
    for (const auto& r : records)
        if (r.label == Label::genuine) out.push_back(r.score);
    return out;
}

std::vector<double> ScoreSet::impostor_scores() const {
    std::vector<double> out;
    for (const auto& r : records)
        if (r.label == Label::impostor) out.push_back(r.score);
    return out;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("embedding dimension mismatch: " +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

double euclidean_distance(const Embedding& a, const Embedding& b) {
    return euclidean_distance(std::span<const double>(a.vector),
                              std::span<const double>(b.vector));
}

double distance_to_probability(double d) {
    if (!(d >= 0.0) || !std::isfinite(d))
        throw std::invalid_argument("distance must be finite and nonnegative, got " +
                                    std::to_string(d));
    return 1.0 / (d + 1.0);
}

ScoreSet score_trials(const std::vector<Embedding>& references,
                      const std::vector<Embedding>& probes,
                      const std::string& system_id,
                      const std::string& setting_id) {
    if (references.empty() || probes.empty())
        throw std::invalid_argument("score_trials requires non-empty reference and probe sets");

    ScoreSet out;
    out.system_id = system_id;
    out.records.reserve(references.size() * probes.size());
    for (const auto& ref : references) {
        for (const auto& probe : probes) {
            ScoreRecord rec;
            rec.system_id = system_id;
            rec.setting_id = setting_id;
            rec.reference_subject = ref.subject_id;
            rec.probe_subject = probe.subject_id;
            rec.probe_sample = probe.sample_id;
            rec.label = ref.subject_id == probe.subject_id ? Label::genuine
                                                           : Label::impostor;
            rec.score = distance_to_probability(euclidean_distance(ref, probe));
            out.records.push_back(std::move(rec));
        }
    }
    std::sort(out.records.begin(), out.records.end(),
              [](const ScoreRecord& a, const ScoreRecord& b) {
                  return std::tie(a.setting_id, a.reference_subject, a.probe_subject,
                                  a.probe_sample) <
                         std::tie(b.setting_id, b.reference_subject, b.probe_subject,
                                  b.probe_sample);
              });
    return out;
}

}  // namespace fusekit
