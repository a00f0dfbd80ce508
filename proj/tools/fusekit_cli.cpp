// fusekit command line front end: enlarge, score, fuse, eval, experiment,
// simulate. Exit codes: 0 success, 1 validation error, 2 internal error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "fusekit/fusion.hpp"
#include "fusekit/harness.hpp"
#include "fusekit/io.hpp"
#include "fusekit/metrics.hpp"
#include "fusekit/scores.hpp"
#include "fusekit/view.hpp"

namespace fs = std::filesystem;
using namespace fusekit;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 0;
    int threads = 1;
    bool quiet = false;
};

void info(const GlobalOpts& g, const std::string& msg) {
    if (!g.quiet) std::cout << msg << "\n";
}

std::string pose_filename(const Pose& p) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "view_az%+03d_el%+03d.png",
                  static_cast<int>(std::lround(p.azimuth_deg)),
                  static_cast<int>(std::lround(p.elevation_deg)));
    return buf;
}

int cmd_enlarge(const GlobalOpts& g, const std::string& mesh_path, double max_az,
                double max_el, double offset, int size, const std::string& proj,
                const std::string& shading, const std::string& out_dir) {
    Mesh mesh = normalize_mesh(load_mesh_file(
        mesh_path, [&](const std::string& w) { if (!g.quiet) std::cerr << w << "\n"; }));
    Camera cam;
    cam.projection = proj == "ortho" ? Projection::orthographic : Projection::perspective;
    cam.width = cam.height = size;
    const PoseGridParams grid{max_az, max_el, offset};
    const Shading shade = shading == "flat" ? Shading::flat : Shading::lambert;

    const auto poses = pose_grid(grid);
    const auto images = enlarge_gallery(mesh, grid, cam, shade, g.threads);

    std::string manifest = "pose_index,azimuth_deg,elevation_deg,filename\n";
    for (std::size_t i = 0; i < images.size(); ++i) {
        const std::string name = pose_filename(poses[i]);
        write_png((fs::path(out_dir) / name).string(), images[i]);
        manifest += std::to_string(i) + "," + format_score(poses[i].azimuth_deg) + "," +
                    format_score(poses[i].elevation_deg) + "," + name + "\n";
    }
    atomic_write_file((fs::path(out_dir) / "manifest.csv").string(), manifest);
    info(g, "wrote " + std::to_string(images.size()) + " views to " + out_dir);
    return 0;
}

int cmd_score(const GlobalOpts& g, const std::string& refs_path,
              const std::string& probes_path, const std::string& system_id,
              const std::string& setting_id, const std::string& out_path) {
    const auto refs = load_embeddings(refs_path);
    const auto probes = load_embeddings(probes_path);
    const ScoreSet set = score_trials(refs, probes, system_id, setting_id);
    atomic_write_file(out_path, write_scores_csv(set));
    info(g, "wrote " + std::to_string(set.records.size()) + " trials to " + out_path);
    return 0;
}

int cmd_fuse(const GlobalOpts& g, const std::vector<std::string>& inputs,
             const std::vector<std::string>& rules, const std::string& out_dir) {
    if (inputs.size() < 2) throw std::invalid_argument("fusion requires >= 2 systems");
    std::vector<ScoreSet> sets;
    for (const auto& path : inputs) sets.push_back(load_scores(path));
    const AlignResult aligned = align_trials(sets);
    for (const auto& [sys, n] : aligned.dropped)
        if (n > 0 && !g.quiet)
            std::cerr << "note: dropped " << n << " trials of " << sys
                      << " absent from the intersection\n";
    for (const auto& rule_name : rules) {
        const FusionRule rule = fusion_rule_from_string(rule_name);
        const ScoreSet fused = fuse(aligned.matrix, rule);
        const std::string path =
            (fs::path(out_dir) / ("fused_" + rule_name + ".csv")).string();
        atomic_write_file(path, write_scores_csv(fused));
        info(g, "wrote " + path);
    }
    return 0;
}

int cmd_eval(const GlobalOpts& g, const std::string& scores_path,
             const std::string& out_path, bool dump_points,
             const std::string& roc_svg) {
    const ScoreSet set = load_scores(scores_path);
    const auto genuine = set.genuine_scores();
    const auto impostor = set.impostor_scores();
    MethodReport row{set.system_id, compute_report(genuine, impostor)};
    atomic_write_file(out_path, write_report_csv({row}));
    const RocCurve curve = roc_curve(genuine, impostor);
    if (dump_points)
        atomic_write_file(out_path + ".points.csv", write_roc_csv(curve));
    if (!roc_svg.empty())
        atomic_write_file(roc_svg, render_roc_svg(curve, set.system_id));
    info(g, "AUC " + format_score(row.report.auc_pct) + "%  EER " +
                format_score(row.report.eer_pct) + "%");
    return 0;
}

int cmd_experiment(const GlobalOpts& g, const std::string& config_path) {
    const ExperimentConfig cfg = load_experiment_config(config_path);
    const ExperimentResult result = run_experiment(cfg);
    const std::string out_dir = cfg.output_dir.empty() ? "." : cfg.output_dir;
    const char* stem = cfg.protocol == Protocol::intra ? "intra" : "cross";

    atomic_write_file((fs::path(out_dir) / (std::string(stem) + "_report.csv")).string(),
                      write_report_csv(result.aggregate));
    atomic_write_file((fs::path(out_dir) / (std::string(stem) + "_breakdown.csv")).string(),
                      write_breakdown_csv(result.per_setting));
    atomic_write_file((fs::path(out_dir) / (std::string(stem) + "_auc_bars.svg")).string(),
                      render_bar_svg(result.per_setting, "auc_pct",
                                     "AUC per setting"));
    info(g, "wrote reports to " + out_dir);
    return 0;
}

int cmd_simulate(const GlobalOpts& g, const std::string& params_path,
                 const std::string& out_dir) {
    // Params use the experiment-config grammar with simulate-specific keys.
    SynthGenParams p;
    p.seed = g.seed;
    std::map<std::size_t, SystemSynthParams> by_index;
    std::istringstream in(read_file(params_path));
    std::string line;
    std::size_t line_no = 0;
    std::size_t n_systems = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw std::invalid_argument("params line " + std::to_string(line_no) +
                                        ": expected key = value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "n_systems") n_systems = std::stoul(value);
        else if (key == "rho") p.latent_correlation = std::stod(value);
        else if (key == "n_genuine") p.n_genuine = std::stoul(value);
        else if (key == "n_impostor") p.n_impostor = std::stoul(value);
        else if (key == "seed") p.seed = std::stoull(value);
        else if (key == "setting") p.setting_id = value;
        else if (key.rfind("system.", 0) == 0) {
            const auto dot = key.find('.', 7);
            if (dot == std::string::npos)
                throw std::invalid_argument("params line " + std::to_string(line_no) +
                                            ": expected system.<k>.<field>");
            const std::size_t idx = std::stoul(key.substr(7, dot - 7));
            const std::string field = key.substr(dot + 1);
            auto& sys = by_index[idx];
            if (field == "genuine_mean") sys.genuine_mean = std::stod(value);
            else if (field == "genuine_std") sys.genuine_std = std::stod(value);
            else if (field == "impostor_mean") sys.impostor_mean = std::stod(value);
            else if (field == "impostor_std") sys.impostor_std = std::stod(value);
            else throw std::invalid_argument("params line " + std::to_string(line_no) +
                                             ": unknown system field '" + field + "'");
        } else {
            throw std::invalid_argument("params line " + std::to_string(line_no) +
                                        ": unknown key '" + key + "'");
        }
    }
    if (n_systems == 0) n_systems = by_index.size();
    if (n_systems == 0)
        throw std::invalid_argument("params define no systems");
    for (std::size_t i = 1; i <= n_systems; ++i) {
        auto it = by_index.find(i);
        p.systems.push_back(it == by_index.end() ? SystemSynthParams{} : it->second);
    }

    const auto sets = synth_scores(p);
    for (const auto& s : sets)
        atomic_write_file((fs::path(out_dir) / (s.system_id + ".csv")).string(),
                          write_scores_csv(s));
    info(g, "wrote " + std::to_string(sets.size()) + " synthetic score sets to " + out_dir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Face-verification fusion and evaluation toolkit"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "Seed for randomized operations");
    app.add_option("--threads", g.threads, "Worker thread budget");
    app.add_flag("--quiet", g.quiet, "Suppress progress output");

    // enlarge
    std::string mesh_path, out_dir = ".", proj = "persp", shading = "lambert";
    double max_az = 30, max_el = 30, offset = 10;
    int size = 128;
    auto* enlarge = app.add_subcommand("enlarge", "Render a pose-grid gallery from a 3D mesh");
    enlarge->add_option("--mesh", mesh_path, "Wavefront OBJ mesh")->required();
    enlarge->add_option("--max-az", max_az, "Maximum absolute azimuth (deg)");
    enlarge->add_option("--max-el", max_el, "Maximum absolute elevation (deg)");
    enlarge->add_option("--offset", offset, "Angle offset (deg)");
    enlarge->add_option("--size", size, "Output image size (pixels)");
    enlarge->add_option("--proj", proj, "persp or ortho")
        ->check(CLI::IsMember({"persp", "ortho"}));
    enlarge->add_option("--shading", shading, "flat or lambert")
        ->check(CLI::IsMember({"flat", "lambert"}));
    enlarge->add_option("--out", out_dir, "Output directory")->required();

    // score
    std::string refs_path, probes_path, system_id = "system", setting_id, score_out;
    auto* score = app.add_subcommand("score", "Score reference x probe embedding pairs");
    score->add_option("--refs", refs_path, "Reference embeddings (CSV or FEV1)")->required();
    score->add_option("--probes", probes_path, "Probe embeddings")->required();
    score->add_option("--system", system_id, "System identifier");
    score->add_option("--setting", setting_id, "Setting identifier");
    score->add_option("--out", score_out, "Output score CSV")->required();

    // fuse
    std::vector<std::string> fuse_inputs, fuse_rules;
    std::string fuse_out = ".";
    auto* fuse_cmd = app.add_subcommand("fuse", "Fuse aligned score files");
    fuse_cmd->add_option("--in", fuse_inputs, "Score CSV (repeat per system)")->required();
    fuse_cmd->add_option("--rule", fuse_rules, "avg, min or max (repeatable)")
        ->required()
        ->check(CLI::IsMember({"avg", "min", "max"}));
    fuse_cmd->add_option("--out", fuse_out, "Output directory");

    // eval
    std::string eval_in, eval_out = "metrics.csv", roc_svg;
    bool dump_points = false;
    auto* eval_cmd = app.add_subcommand("eval", "Compute verification metrics");
    eval_cmd->add_option("--scores", eval_in, "Score CSV")->required();
    eval_cmd->add_option("--out", eval_out, "Metrics CSV output");
    eval_cmd->add_flag("--points", dump_points, "Also dump the full ROC curve CSV");
    eval_cmd->add_option("--roc-svg", roc_svg, "Write an SVG ROC plot");

    // experiment
    std::string config_path;
    auto* experiment = app.add_subcommand("experiment", "Run an intra/cross evaluation");
    experiment->add_option("--config", config_path, "Experiment config file")->required();

    // simulate
    std::string params_path, sim_out = ".";
    auto* simulate = app.add_subcommand("simulate", "Generate correlated synthetic scores");
    simulate->add_option("--params", params_path, "Generator parameter file")->required();
    simulate->add_option("--out", sim_out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*enlarge)
            return cmd_enlarge(g, mesh_path, max_az, max_el, offset, size, proj, shading,
                               out_dir);
        if (*score)
            return cmd_score(g, refs_path, probes_path, system_id, setting_id, score_out);
        if (*fuse_cmd) return cmd_fuse(g, fuse_inputs, fuse_rules, fuse_out);
        if (*eval_cmd) return cmd_eval(g, eval_in, eval_out, dump_points, roc_svg);
        if (*experiment) return cmd_experiment(g, config_path);
        if (*simulate) return cmd_simulate(g, params_path, sim_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
