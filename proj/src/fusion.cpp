#include "fusekit/fusion.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace fusekit {

FusionRule fusion_rule_from_string(const std::string& s) {
    if (s == "avg") return FusionRule::avg;
    if (s == "max") return FusionRule::max;
    if (s == "min") return FusionRule::min;
    throw std::invalid_argument("unknown fusion rule '" + s + "' (expected avg, max or min)");
}

const char* to_string(FusionRule r) {
    switch (r) {
        case FusionRule::avg: return "avg";
        case FusionRule::max: return "max";
        case FusionRule::min: return "min";
    }
    return "?";
}

namespace {

TrialKey key_of(const ScoreRecord& r) {
    return TrialKey{r.setting_id, r.reference_subject, r.probe_subject, r.probe_sample};
}

}  // namespace

AlignResult align_trials(const std::vector<ScoreSet>& sets) {
    if (sets.size() < 2)
        throw std::invalid_argument("fusion requires >= 2 systems, got " +
                                    std::to_string(sets.size()));

    // Column order is sorted system_id, so alignment is input-order invariant.
    std::vector<std::size_t> order(sets.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return sets[a].system_id < sets[b].system_id;
    });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (sets[order[i - 1]].system_id == sets[order[i]].system_id)
            throw std::invalid_argument("duplicate system_id '" +
                                        sets[order[i]].system_id + "' in fusion input");

    std::vector<std::map<TrialKey, const ScoreRecord*>> indexed;
    indexed.reserve(sets.size());
    for (std::size_t idx : order) {
        std::map<TrialKey, const ScoreRecord*> by_key;
        for (const auto& r : sets[idx].records) {
            if (!by_key.emplace(key_of(r), &r).second)
                throw std::invalid_argument("duplicate trial key in system '" +
                                            sets[idx].system_id + "': setting=" +
                                            r.setting_id + " ref=" + r.reference_subject +
                                            " probe=" + r.probe_subject + "/" + r.probe_sample);
        }
        indexed.push_back(std::move(by_key));
    }

    AlignResult out;
    for (std::size_t idx : order) out.matrix.systems.push_back(sets[idx].system_id);

    for (const auto& [key, first_rec] : indexed[0]) {
        TrialRow row;
        row.label = first_rec->label;
        row.scores.reserve(indexed.size());
        bool everywhere = true;
        for (const auto& by_key : indexed) {
            auto it = by_key.find(key);
            if (it == by_key.end()) {
                everywhere = false;
                break;
            }
            row.scores.push_back(it->second->score);
        }
        if (everywhere) out.matrix.rows.emplace(key, std::move(row));
    }

    if (out.matrix.rows.empty())
        throw std::invalid_argument("trial alignment produced an empty intersection");

    for (std::size_t i = 0; i < indexed.size(); ++i)
        out.dropped[out.matrix.systems[i]] =
            indexed[i].size() - out.matrix.rows.size();
    return out;
}

namespace {

std::string fused_id(const char* rule, const std::vector<std::string>& systems) {
    std::string id = std::string("fusion:") + rule + "(";
    for (std::size_t i = 0; i < systems.size(); ++i) {
        if (i) id += "+";
        id += systems[i];
    }
    return id + ")";
}

template <typename Reduce>
ScoreSet fuse_with(const TrialMatrix& m, const char* rule, Reduce reduce) {
    if (m.systems.size() < 2)
        throw std::invalid_argument("TrialMatrix must hold >= 2 systems");
    ScoreSet out;
    out.system_id = fused_id(rule, m.systems);
    out.records.reserve(m.rows.size());
    for (const auto& [key, row] : m.rows) {
        ScoreRecord rec;
        rec.system_id = out.system_id;
        rec.setting_id = key.setting_id;
        rec.reference_subject = key.reference_subject;
        rec.probe_subject = key.probe_subject;
        rec.probe_sample = key.probe_sample;
        rec.label = row.label;
        rec.score = reduce(row.scores);
        out.records.push_back(std::move(rec));
    }
    return out;
}

}  // namespace

ScoreSet fuse_avg(const TrialMatrix& m) {
    return fuse_with(m, "avg", [](const std::vector<double>& s) {
        // Identical scores must pass through bit-exactly.
        if (std::all_of(s.begin(), s.end(), [&](double v) { return v == s[0]; }))
            return s[0];
        double sum = 0.0;
        for (double v : s) sum += v;
        return sum / static_cast<double>(s.size());
    });
}

ScoreSet fuse_max(const TrialMatrix& m) {
    return fuse_with(m, "max", [](const std::vector<double>& s) {
        return *std::max_element(s.begin(), s.end());
    });
}

ScoreSet fuse_min(const TrialMatrix& m) {
    return fuse_with(m, "min", [](const std::vector<double>& s) {
        return *std::min_element(s.begin(), s.end());
    });
}

ScoreSet fuse(const TrialMatrix& m, FusionRule rule) {
    switch (rule) {
        case FusionRule::avg: return fuse_avg(m);
        case FusionRule::max: return fuse_max(m);
        case FusionRule::min: return fuse_min(m);
    }
    throw std::logic_error("unreachable fusion rule");
}

}  // namespace fusekit
