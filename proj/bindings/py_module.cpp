// pybind11 bindings over the main operations: scoring, fusion, metrics,
// pose-grid rendering and the synthetic generator.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fusekit/fusion.hpp"
#include "fusekit/harness.hpp"
#include "fusekit/io.hpp"
#include "fusekit/metrics.hpp"
#include "fusekit/scores.hpp"
#include "fusekit/view.hpp"

namespace py = pybind11;
using namespace fusekit;

namespace {

std::vector<double> as_vector(const py::array_t<double, py::array::c_style |
                                                            py::array::forcecast>& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D array");
    return {a.data(), a.data() + a.shape(0)};
}

py::array_t<double> image_to_array(const ViewImage& img) {
    if (img.channels == 1) {
        py::array_t<double> out({img.height, img.width});
        std::copy(img.pixels.begin(), img.pixels.end(), out.mutable_data());
        return out;
    }
    py::array_t<double> out({img.height, img.width, img.channels});
    std::copy(img.pixels.begin(), img.pixels.end(), out.mutable_data());
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Face-verification fusion and evaluation toolkit (C++ core)";

    py::enum_<Label>(m, "Label")
        .value("genuine", Label::genuine)
        .value("impostor", Label::impostor);

    py::class_<ScoreRecord>(m, "ScoreRecord")
        .def(py::init<>())
        .def_readwrite("system_id", &ScoreRecord::system_id)
        .def_readwrite("setting_id", &ScoreRecord::setting_id)
        .def_readwrite("reference_subject", &ScoreRecord::reference_subject)
        .def_readwrite("probe_subject", &ScoreRecord::probe_subject)
        .def_readwrite("probe_sample", &ScoreRecord::probe_sample)
        .def_readwrite("label", &ScoreRecord::label)
        .def_readwrite("score", &ScoreRecord::score);

    py::class_<ScoreSet>(m, "ScoreSet")
        .def(py::init<>())
        .def_readwrite("system_id", &ScoreSet::system_id)
        .def_readwrite("records", &ScoreSet::records)
        .def("genuine_scores", &ScoreSet::genuine_scores)
        .def("impostor_scores", &ScoreSet::impostor_scores);

    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("auc_pct", &MetricsReport::auc_pct)
        .def_readonly("eer_pct", &MetricsReport::eer_pct)
        .def_readonly("cohens_d", &MetricsReport::cohens_d)
        .def_readonly("fmr_at_fnmr1_pct", &MetricsReport::fmr_at_fnmr1_pct)
        .def_readonly("fnmr_at_fmr1_pct", &MetricsReport::fnmr_at_fmr1_pct)
        .def_readonly("n_genuine", &MetricsReport::n_genuine)
        .def_readonly("n_impostor", &MetricsReport::n_impostor);

    m.def("euclidean_distance", [](py::array_t<double> a, py::array_t<double> b) {
        const auto va = as_vector(a);
        const auto vb = as_vector(b);
        return euclidean_distance(std::span<const double>(va),
                                  std::span<const double>(vb));
    });
    m.def("distance_to_probability", &distance_to_probability, py::arg("d"));

    m.def("auc_pct", [](std::vector<double> g, std::vector<double> i) {
        return auc_pct(g, i);
    });
    m.def("eer_pct", [](std::vector<double> g, std::vector<double> i) {
        return eer_pct(g, i);
    });
    m.def("cohens_d", [](std::vector<double> g, std::vector<double> i) {
        return cohens_d(g, i);
    });
    m.def("pearson_corr", &pearson_corr);
    m.def("compute_report",
          [](std::vector<double> g, std::vector<double> i) {
              return compute_report(g, i);
          });
    m.def("roc_points", [](std::vector<double> g, std::vector<double> i) {
        const RocCurve c = roc_curve(g, i);
        py::array_t<double> out({static_cast<py::ssize_t>(c.points.size()),
                                 static_cast<py::ssize_t>(3)});
        auto* d = out.mutable_data();
        for (const auto& p : c.points) {
            *d++ = p.threshold;
            *d++ = p.fmr;
            *d++ = p.fnmr;
        }
        return out;
    });

    m.def("fuse_scores",
          [](const std::vector<ScoreSet>& sets, const std::string& rule) {
              const AlignResult a = align_trials(sets);
              return fuse(a.matrix, fusion_rule_from_string(rule));
          },
          py::arg("sets"), py::arg("rule"));

    m.def("pose_grid", [](double max_az, double max_el, double offset) {
        std::vector<std::pair<double, double>> out;
        for (const Pose& p : pose_grid({max_az, max_el, offset}))
            out.emplace_back(p.azimuth_deg, p.elevation_deg);
        return out;
    }, py::arg("max_azimuth_deg") = 30.0, py::arg("max_elevation_deg") = 30.0,
       py::arg("offset_deg") = 10.0);

    m.def("render_views",
          [](const std::string& obj_path, double max_az, double max_el, double offset,
             int size, const std::string& projection, int threads) {
              const Mesh mesh = normalize_mesh(load_mesh_file(obj_path));
              Camera cam;
              cam.projection = projection == "ortho" ? Projection::orthographic
                                                     : Projection::perspective;
              cam.width = cam.height = size;
              const auto images = enlarge_gallery(mesh, {max_az, max_el, offset}, cam,
                                                  Shading::lambert, threads);
              std::vector<py::array_t<double>> out;
              out.reserve(images.size());
              for (const auto& img : images) out.push_back(image_to_array(img));
              return out;
          },
          py::arg("obj_path"), py::arg("max_azimuth_deg") = 30.0,
          py::arg("max_elevation_deg") = 30.0, py::arg("offset_deg") = 10.0,
          py::arg("size") = 128, py::arg("projection") = "persp",
          py::arg("threads") = 1);

    m.def("synth_scores",
          [](std::size_t n_systems, double genuine_mean_delta, double rho,
             std::size_t n_genuine, std::size_t n_impostor, std::uint64_t seed) {
              SynthGenParams p;
              for (std::size_t i = 0; i < n_systems; ++i)
                  p.systems.push_back({genuine_mean_delta, 1.0, 0.0, 1.0});
              p.latent_correlation = rho;
              p.n_genuine = n_genuine;
              p.n_impostor = n_impostor;
              p.seed = seed;
              return synth_scores(p);
          },
          py::arg("n_systems"), py::arg("genuine_mean_delta"), py::arg("rho"),
          py::arg("n_genuine"), py::arg("n_impostor"), py::arg("seed") = 0);

    m.def("load_scores", &load_scores, py::arg("path"));
    m.def("write_scores",
          [](const std::string& path, const ScoreSet& s) {
              atomic_write_file(path, write_scores_csv(s));
          },
          py::arg("path"), py::arg("scores"));
}
