#include "fusekit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fusekit/io.hpp"

namespace fusekit {

std::string SettingDescriptor::id() const {
    // Underscore instead of a decimal point: ids must stay dot-free so they can
    // be embedded in dotted config keys.
    const int tenths = static_cast<int>(std::lround(distance_m * 10.0));
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%s_d%d_%d", camera_id.c_str(), tenths / 10,
                  tenths % 10);
    return buf;
}

std::vector<SettingDescriptor> setting_universe() {
    std::vector<SettingDescriptor> out;
    for (int cam = 1; cam <= 5; ++cam)
        for (double d : {1.0, 2.6, 4.2})
            out.push_back({"cam" + std::to_string(cam), d});
    return out;
}

std::optional<SettingDescriptor> parse_setting_id(const std::string& id) {
    const auto sep = id.rfind("_d");
    if (sep == std::string::npos || sep == 0 || sep + 2 >= id.size()) return std::nullopt;
    std::string dist = id.substr(sep + 2);  // "2_6" means 2.6 m
    const auto us = dist.find('_');
    if (us != std::string::npos) dist[us] = '.';
    SettingDescriptor s;
    s.camera_id = id.substr(0, sep);
    try {
        std::size_t pos = 0;
        s.distance_m = std::stod(dist, &pos);
        if (pos != dist.size()) return std::nullopt;
    } catch (const std::logic_error&) {
        return std::nullopt;
    }
    return s;
}

Partition partition_identities(const std::vector<std::string>& ids,
                               std::uint64_t seed) {
    if (ids.size() < 3)
        throw std::invalid_argument("need at least 3 identities to partition, got " +
                                    std::to_string(ids.size()));
    std::vector<std::string> shuffled = ids;
    std::sort(shuffled.begin(), shuffled.end());  // input order must not matter
    std::mt19937_64 rng(seed);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);

    const std::size_t n = shuffled.size();
    const std::size_t n_test =
        n == 130 ? 25 : static_cast<std::size_t>(std::lround(0.2 * static_cast<double>(n)));
    if (n_test == 0 || n_test >= n - 1)
        throw std::invalid_argument("identity set too small for a 3-way split");
    const std::size_t rest = n - n_test;
    const std::size_t n_train =
        static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(rest)));
    if (n_train == 0 || n_train == rest)
        throw std::invalid_argument("identity set too small for a 3-way split");

    Partition p;
    p.seed = seed;
    p.test_ids.assign(shuffled.begin(), shuffled.begin() + n_test);
    p.train_ids.assign(shuffled.begin() + n_test, shuffled.begin() + n_test + n_train);
    p.val_ids.assign(shuffled.begin() + n_test + n_train, shuffled.end());
    return p;
}

std::vector<ScoreSet> synth_scores(const SynthGenParams& p) {
    if (p.systems.size() < 1)
        throw std::invalid_argument("synth_scores needs at least one system");
    if (!(p.latent_correlation >= 0.0 && p.latent_correlation < 1.0))
        throw std::invalid_argument("latent correlation must be in [0, 1)");
    if (p.n_genuine < 2 || p.n_impostor < 2)
        throw std::invalid_argument("need at least 2 trials per class");
    for (const auto& s : p.systems)
        if (!(s.genuine_std > 0.0) || !(s.impostor_std > 0.0))
            throw std::invalid_argument("per-system standard deviations must be positive");

    const std::size_t n_sys = p.systems.size();
    std::vector<ScoreSet> sets(n_sys);
    for (std::size_t i = 0; i < n_sys; ++i)
        sets[i].system_id = "synth" + std::to_string(i + 1);

    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double w_shared = std::sqrt(p.latent_correlation);
    const double w_own = std::sqrt(1.0 - p.latent_correlation);

    auto emit = [&](Label label, std::size_t trial_index) {
        const double latent = normal(rng);
        const bool genuine = label == Label::genuine;
        const std::string subject = "s" + std::to_string(trial_index);
        for (std::size_t i = 0; i < n_sys; ++i) {
            const auto& sys = p.systems[i];
            const double mu = genuine ? sys.genuine_mean : sys.impostor_mean;
            const double sigma = genuine ? sys.genuine_std : sys.impostor_std;
            const double raw = mu + sigma * (w_shared * latent + w_own * normal(rng));
            // Squash into ]0,1]: a synthetic distance through the score model.
            const double d = std::max(0.0, kSquashOffset - raw);
            ScoreRecord rec;
            rec.system_id = sets[i].system_id;
            rec.setting_id = p.setting_id;
            rec.reference_subject = subject;
            rec.probe_subject = genuine ? subject : subject + "x";
            rec.probe_sample = genuine ? "g" : "i";
            rec.label = label;
            rec.score = 1.0 / (d + 1.0);
            sets[i].records.push_back(std::move(rec));
        }
    };

    for (std::size_t t = 0; t < p.n_genuine; ++t) emit(Label::genuine, t);
    for (std::size_t t = 0; t < p.n_impostor; ++t) emit(Label::impostor, p.n_genuine + t);
    return sets;
}

CrossKind classify_cross_pair(const SettingDescriptor& train,
                              const SettingDescriptor& test) {
    const bool same_camera = train.camera_id == test.camera_id;
    const bool same_distance = train.distance_m == test.distance_m;
    if (same_camera && same_distance)
        throw std::invalid_argument("not a cross pair: train and test settings are equal");
    if (same_distance) return CrossKind::cross_camera;
    if (same_camera) return CrossKind::cross_distance;
    return CrossKind::cross_both;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, sep)) out.push_back(tok);
    return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
    ExperimentConfig cfg;
    bool saw_protocol = false;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));

        if (key == "protocol") {
            if (value == "intra") cfg.protocol = Protocol::intra;
            else if (value == "cross") cfg.protocol = Protocol::cross;
            else throw std::invalid_argument("config line " + std::to_string(line_no) +
                                             ": protocol must be intra or cross");
            saw_protocol = true;
        } else if (key == "fusion_rules") {
            for (const auto& r : split(value, ','))
                cfg.fusion_rules.push_back(fusion_rule_from_string(trim(r)));
        } else if (key == "aggregation") {
            if (value == "macro") cfg.aggregation = Aggregation::macro;
            else if (value == "pooled") cfg.aggregation = Aggregation::pooled;
            else throw std::invalid_argument("config line " + std::to_string(line_no) +
                                             ": aggregation must be macro or pooled");
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else if (key == "seed") {
            cfg.seed = std::stoull(value);
        } else if (key.rfind("scores.", 0) == 0) {
            const auto parts = split(key.substr(7), '.');
            if (parts.size() != 3)
                throw std::invalid_argument(
                    "config line " + std::to_string(line_no) +
                    ": score keys follow scores.<system>.<train_setting>.<test_setting>");
            cfg.score_files[{parts[0], parts[1], parts[2]}] = value;
        } else {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": unknown key '" + key + "'");
        }
    }
    if (!saw_protocol) throw std::invalid_argument("config is missing 'protocol'");
    if (cfg.score_files.empty())
        throw std::invalid_argument("config names no score files");

    for (const auto& [key, path] : cfg.score_files) {
        const auto& [sys, train_s, test_s] = key;
        if (cfg.protocol == Protocol::intra && train_s != test_s)
            throw std::invalid_argument("intra protocol requires train setting == test "
                                        "setting, got " + train_s + " vs " + test_s +
                                        " for system " + sys);
        if (cfg.protocol == Protocol::cross && train_s == test_s)
            throw std::invalid_argument("cross protocol requires train setting != test "
                                        "setting, got " + train_s + " twice for system " +
                                        sys);
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    return parse_experiment_config(read_file(path));
}

namespace {

// Evaluates one (train, test) cell: every single system plus every fusion rule.
SettingResult evaluate_cell(const std::vector<std::string>& systems,
                            const std::string& train_setting,
                            const std::string& test_setting,
                            const std::vector<FusionRule>& rules,
                            const ScoreLoader& load,
                            std::vector<ScoreSet>* pooled_sink) {
    SettingResult result;
    result.train_setting = train_setting;
    result.test_setting = test_setting;

    std::vector<ScoreSet> sets;
    sets.reserve(systems.size());
    for (const auto& sys : systems) {
        sets.push_back(load(sys, train_setting, test_setting));
        result.methods.push_back({sys, compute_report(sets.back())});
    }
    if (!rules.empty() && sets.size() >= 2) {
        const TrialMatrix matrix = align_trials(sets).matrix;
        for (FusionRule rule : rules) {
            ScoreSet fused = fuse(matrix, rule);
            result.methods.push_back(
                {std::string("fusion:") + to_string(rule), compute_report(fused)});
            if (pooled_sink) pooled_sink->push_back(std::move(fused));
        }
    }
    if (pooled_sink)
        pooled_sink->insert(pooled_sink->end(), sets.begin(), sets.end());
    return result;
}

struct CellKey {
    std::string train, test;
    auto operator<=>(const CellKey&) const = default;
};

ExperimentResult run_protocol(const ExperimentConfig& cfg, const ScoreLoader& load) {
    // Systems and cells are derived from the config's score-file keys.
    std::set<std::string> systems_set;
    std::set<CellKey> cells;
    for (const auto& [key, path] : cfg.score_files) {
        systems_set.insert(std::get<0>(key));
        cells.insert({std::get<1>(key), std::get<2>(key)});
    }
    const std::vector<std::string> systems(systems_set.begin(), systems_set.end());

    // Every (system, cell) combination must be present.
    std::vector<std::string> missing;
    for (const auto& sys : systems)
        for (const auto& cell : cells)
            if (!cfg.score_files.count({sys, cell.train, cell.test}))
                missing.push_back(sys + "/" + cell.train + "/" + cell.test);
    if (!missing.empty()) {
        std::string msg = "missing score files for:";
        for (const auto& m : missing) msg += " " + m;
        throw std::invalid_argument(msg);
    }

    ExperimentResult out;
    out.protocol = cfg.protocol;
    out.aggregation = cfg.aggregation;

    std::map<std::string, std::vector<ScoreSet>> pooled_by_method;
    for (const auto& cell : cells) {
        std::vector<ScoreSet> sink;
        std::vector<ScoreSet>* sink_ptr =
            cfg.aggregation == Aggregation::pooled ? &sink : nullptr;
        out.per_setting.push_back(evaluate_cell(systems, cell.train, cell.test,
                                                cfg.fusion_rules, load, sink_ptr));
        if (sink_ptr)
            for (auto& s : sink) {
                // Fused ids carry the constituent list; normalize to the rule name.
                std::string method = s.system_id;
                if (method.rfind("fusion:", 0) == 0)
                    method = method.substr(0, method.find('('));
                pooled_by_method[method].push_back(std::move(s));
            }
    }

    if (cfg.aggregation == Aggregation::macro) {
        out.aggregate = aggregate_macro(out.per_setting);
    } else {
        for (auto& [method, sets] : pooled_by_method) {
            std::vector<double> genuine, impostor;
            for (const auto& s : sets)
                for (const auto& r : s.records)
                    (r.label == Label::genuine ? genuine : impostor).push_back(r.score);
            out.aggregate.push_back({method, compute_report(genuine, impostor)});
        }
    }
    return out;
}

ScoreLoader file_loader(const ExperimentConfig& cfg) {
    return [&cfg](const std::string& sys, const std::string& train_s,
                  const std::string& test_s) {
        const auto it = cfg.score_files.find({sys, train_s, test_s});
        if (it == cfg.score_files.end())
            throw std::invalid_argument("no score file configured for " + sys + "/" +
                                        train_s + "/" + test_s);
        return load_scores(it->second);
    };
}

}  // namespace

ExperimentResult run_intra(const ExperimentConfig& cfg, const ScoreLoader& load) {
    if (cfg.protocol != Protocol::intra)
        throw std::invalid_argument("run_intra requires an intra-protocol config");
    return run_protocol(cfg, load);
}

ExperimentResult run_cross(const ExperimentConfig& cfg, const ScoreLoader& load) {
    if (cfg.protocol != Protocol::cross)
        throw std::invalid_argument("run_cross requires a cross-protocol config");
    return run_protocol(cfg, load);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    return run_protocol(cfg, file_loader(cfg));
}

std::vector<MethodReport> aggregate_macro(const std::vector<SettingResult>& results) {
    if (results.empty())
        throw std::invalid_argument("nothing to aggregate");
    // Method order follows the first cell; every cell must list the same methods.
    std::vector<MethodReport> agg;
    for (const auto& m : results[0].methods) agg.push_back({m.method, MetricsReport{}});
    for (const auto& cell : results) {
        if (cell.methods.size() != agg.size())
            throw std::invalid_argument("inconsistent method sets across cells");
        for (std::size_t i = 0; i < agg.size(); ++i) {
            if (cell.methods[i].method != agg[i].method)
                throw std::invalid_argument("inconsistent method order across cells");
            agg[i].report.auc_pct += cell.methods[i].report.auc_pct;
            agg[i].report.eer_pct += cell.methods[i].report.eer_pct;
            agg[i].report.cohens_d += cell.methods[i].report.cohens_d;
            agg[i].report.fmr_at_fnmr1_pct += cell.methods[i].report.fmr_at_fnmr1_pct;
            agg[i].report.fnmr_at_fmr1_pct += cell.methods[i].report.fnmr_at_fmr1_pct;
            agg[i].report.n_genuine += cell.methods[i].report.n_genuine;
            agg[i].report.n_impostor += cell.methods[i].report.n_impostor;
        }
    }
    const double k = static_cast<double>(results.size());
    for (auto& m : agg) {
        m.report.auc_pct /= k;
        m.report.eer_pct /= k;
        m.report.cohens_d /= k;
        m.report.fmr_at_fnmr1_pct /= k;
        m.report.fnmr_at_fmr1_pct /= k;
    }
    return agg;
}

}  // namespace fusekit
