#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace fusekit {

enum class Label : std::uint8_t { genuine, impostor };

inline const char* to_string(Label l) {
    return l == Label::genuine ? "genuine" : "impostor";
}

Label label_from_string(const std::string& s);

// One face sample in embedding space.
struct Embedding {
    std::string subject_id;
    std::string sample_id;
    std::string setting_id;  // may be empty
    std::vector<double> vector;
};

// One verification trial: a-posteriori match probability with ground truth.
struct ScoreRecord {
    std::string system_id;
    std::string setting_id;
    std::string reference_subject;
    std::string probe_subject;
    std::string probe_sample;
    Label label = Label::impostor;
    double score = 0.0;
};

struct ScoreSet {
    std::string system_id;
    std::vector<ScoreRecord> records;

    std::vector<double> genuine_scores() const;
    std::vector<double> impostor_scores() const;
};

// Identifies a trial independently of the scoring system.
struct TrialKey {
    std::string setting_id;
    std::string reference_subject;
    std::string probe_subject;
    std::string probe_sample;

    auto operator<=>(const TrialKey&) const = default;
};

struct TrialRow {
    Label label = Label::impostor;
    std::vector<double> scores;  // one per system, same order as TrialMatrix::systems
};

// Trials aligned across N systems.
struct TrialMatrix {
    std::vector<std::string> systems;
    std::map<TrialKey, TrialRow> rows;

    std::size_t system_count() const { return systems.size(); }
};

}  // namespace fusekit
