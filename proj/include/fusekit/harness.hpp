#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>

#include "fusekit/fusion.hpp"
#include "fusekit/metrics.hpp"
#include "fusekit/types.hpp"

namespace fusekit {

// One acquisition configuration: camera model x subject distance.
struct SettingDescriptor {
    std::string camera_id;
    double distance_m = 0.0;

    std::string id() const;
    auto operator<=>(const SettingDescriptor&) const = default;
};

// The 15-element universe: cam1..cam5 x {1.0, 2.6, 4.2} m.
std::vector<SettingDescriptor> setting_universe();

// Parses "cam3_d2_6"-style ids; nullopt if the id does not follow the scheme.
std::optional<SettingDescriptor> parse_setting_id(const std::string& id);

struct Partition {
    std::vector<std::string> test_ids;
    std::vector<std::string> train_ids;
    std::vector<std::string> val_ids;
    std::uint64_t seed = 0;
};

// Deterministic seeded split. 130 identities give 25 test; otherwise test is
// round(0.2 n). The remainder splits floor(0.9 rest) train, rest val.
Partition partition_identities(const std::vector<std::string>& ids,
                               std::uint64_t seed);

struct SystemSynthParams {
    double genuine_mean = 0.0;
    double genuine_std = 1.0;
    double impostor_mean = 0.0;
    double impostor_std = 1.0;
};

struct SynthGenParams {
    std::vector<SystemSynthParams> systems;
    double latent_correlation = 0.0;  // rho in [0, 1)
    std::size_t n_genuine = 2;
    std::size_t n_impostor = 2;
    std::uint64_t seed = 0;
    std::string setting_id = "synthetic";
};

// Offset of the squashing map: score = 1/(1 + max(0, SQUASH_OFFSET - raw)).
// Strictly increasing in raw for raw < SQUASH_OFFSET; raw values above it
// saturate at score 1.
inline constexpr double kSquashOffset = 4.0;

// One-factor Gaussian copula generator: per trial a shared latent normal,
// mixed with per-system noise at weight sqrt(rho), then squashed into ]0,1].
// Trial keys are aligned across all systems.
std::vector<ScoreSet> synth_scores(const SynthGenParams& p);

enum class Protocol { intra, cross };
enum class Aggregation { macro, pooled };

struct ExperimentConfig {
    Protocol protocol = Protocol::intra;
    // (system_id, train_setting, test_setting) -> score file path
    std::map<std::tuple<std::string, std::string, std::string>, std::string> score_files;
    std::vector<FusionRule> fusion_rules;
    Aggregation aggregation = Aggregation::macro;
    std::string output_dir;
    std::uint64_t seed = 0;
};

// Parses the flat key-value config grammar (see FORMATS.md).
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

struct MethodReport {
    std::string method;  // system_id or fusion:<rule>(...)
    MetricsReport report;
};

struct SettingResult {
    std::string train_setting;
    std::string test_setting;
    std::vector<MethodReport> methods;
};

enum class CrossKind { cross_camera, cross_distance, cross_both };

// Classifies an ordered (train, test) pair of parseable setting ids.
CrossKind classify_cross_pair(const SettingDescriptor& train,
                              const SettingDescriptor& test);

struct ExperimentResult {
    Protocol protocol = Protocol::intra;
    Aggregation aggregation = Aggregation::macro;
    std::vector<SettingResult> per_setting;   // one per setting (intra) or pair (cross)
    std::vector<MethodReport> aggregate;      // Table 1/2 shaped rows
};

// Score sets per method, loaded for one (train_setting, test_setting) cell.
using ScoreLoader = std::function<ScoreSet(const std::string& system,
                                           const std::string& train_setting,
                                           const std::string& test_setting)>;

ExperimentResult run_intra(const ExperimentConfig& cfg, const ScoreLoader& load);
ExperimentResult run_cross(const ExperimentConfig& cfg, const ScoreLoader& load);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Macro: unweighted mean of each metric. Pooled aggregation is handled inside
// run_* (it needs the raw scores, not the reports).
std::vector<MethodReport> aggregate_macro(const std::vector<SettingResult>& results);

}  // namespace fusekit
