#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "fusekit/io.hpp"
#include "fusekit/metrics.hpp"

using namespace fusekit;

namespace {

std::vector<Embedding> random_embeddings(int n, int dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    std::vector<Embedding> out;
    for (int i = 0; i < n; ++i) {
        Embedding e;
        e.subject_id = "subj" + std::to_string(i);
        e.sample_id = "s" + std::to_string(i % 3);
        e.setting_id = "cam1_d1.0";
        for (int d = 0; d < dim; ++d) e.vector.push_back(unif(rng));
        out.push_back(std::move(e));
    }
    return out;
}

ScoreSet random_scores(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(0.001, 1.0);
    ScoreSet s;
    s.system_id = "sys";
    for (int i = 0; i < n; ++i) {
        const bool genuine = i % 2 == 0;
        const std::string subject = "r" + std::to_string(i);
        s.records.push_back({"sys", "set", subject,
                             genuine ? subject : subject + "q", "p",
                             genuine ? Label::genuine : Label::impostor, unif(rng)});
    }
    return s;
}

}  // namespace

TEST_CASE("embedding CSV and FEV1 round-trips preserve everything") {
    const auto embs = random_embeddings(10, 16, 71);

    SUBCASE("CSV") {
        const auto back = parse_embeddings_csv(write_embeddings_csv(embs));
        REQUIRE(back.size() == embs.size());
        for (std::size_t i = 0; i < embs.size(); ++i) {
            CHECK(back[i].subject_id == embs[i].subject_id);
            CHECK(back[i].vector == embs[i].vector);  // %.17g is lossless
        }
    }
    SUBCASE("FEV1 binary") {
        const auto back = parse_embeddings_fev1(write_embeddings_fev1(embs));
        REQUIRE(back.size() == embs.size());
        for (std::size_t i = 0; i < embs.size(); ++i) {
            CHECK(back[i].subject_id == embs[i].subject_id);
            CHECK(back[i].setting_id == embs[i].setting_id);
            CHECK(back[i].vector == embs[i].vector);
        }
    }
    SUBCASE("mixed dims rejected") {
        auto bad = embs;
        bad[3].vector.pop_back();
        CHECK_THROWS_AS(write_embeddings_csv(bad), std::invalid_argument);
    }
    SUBCASE("bad magic rejected") {
        CHECK_THROWS_AS(parse_embeddings_fev1("NOPE1234"), std::invalid_argument);
    }
}

TEST_CASE("score CSV round-trip and validation") {
    const auto set = random_scores(40, 73);
    const std::string text = write_scores_csv(set);
    const auto back = parse_scores_csv(text);
    REQUIRE(back.records.size() == set.records.size());
    for (std::size_t i = 0; i < set.records.size(); ++i) {
        // 9 significant digits keep round-trip error below test tolerances.
        CHECK(std::abs(back.records[i].score - set.records[i].score) < 1e-8);
        CHECK(back.records[i].label == set.records[i].label);
    }
    // The writer's own output re-serializes identically.
    CHECK(write_scores_csv(back) == text);

    SUBCASE("score outside ]0,1] rejected") {
        CHECK_THROWS_AS(
            parse_scores_csv(
                "system_id,setting_id,reference_subject,probe_subject,probe_sample,label,score\n"
                "s,set,a,a,p,genuine,1.5\n"),
            std::invalid_argument);
    }
    SUBCASE("label inconsistent with subjects rejected") {
        CHECK_THROWS_AS(
            parse_scores_csv(
                "system_id,setting_id,reference_subject,probe_subject,probe_sample,label,score\n"
                "s,set,a,b,p,genuine,0.5\n"),
            std::invalid_argument);
    }
    SUBCASE("duplicate keys rejected") {
        CHECK_THROWS_AS(
            parse_scores_csv(
                "system_id,setting_id,reference_subject,probe_subject,probe_sample,label,score\n"
                "s,set,a,a,p,genuine,0.5\ns,set,a,a,p,genuine,0.6\n"),
            std::invalid_argument);
    }
}

TEST_CASE("report CSV round-trip is byte-stable") {
    std::vector<MethodReport> rows;
    rows.push_back({"sysA", MetricsReport{86.94, 10.78, 1.53, 40.0, 55.0, 100, 600}});
    rows.push_back({"fusion:avg", MetricsReport{88.1, 9.5, 1.6, 35.0, 50.0, 100, 600}});
    const std::string text = write_report_csv(rows);
    const auto back = parse_report_csv(text);
    REQUIRE(back.size() == 2);
    CHECK(back[0].method == "sysA");
    CHECK(write_report_csv(back) == text);  // zero-diff round trip
    CHECK_THROWS_AS(write_report_csv({}), std::invalid_argument);
}

TEST_CASE("atomic_write_file leaves no temp files and overwrites atomically") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "fusekit_io_test";
    fs::remove_all(dir);
    const auto path = (dir / "out.txt").string();
    atomic_write_file(path, "first");
    atomic_write_file(path, "second");
    CHECK(read_file(path) == "second");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
    CHECK(entries == 1);
    fs::remove_all(dir);
}

TEST_CASE("PNG encoder emits valid signatures and sane sizes") {
    ViewImage img;
    img.width = 32;
    img.height = 16;
    img.channels = 1;
    img.pixels.assign(32 * 16, 0.0);
    for (int x = 0; x < 32; ++x) img.at(x, 8) = 1.0;
    const std::string png = encode_png(img);
    CHECK(png.compare(0, 8, "\x89PNG\r\n\x1a\n", 8) == 0);
    CHECK(png.find("IHDR") != std::string::npos);
    CHECK(png.find("IEND") != std::string::npos);
    // Width field (big-endian) inside IHDR.
    CHECK(static_cast<unsigned char>(png[16 + 3]) == 32);
    CHECK(static_cast<unsigned char>(png[20 + 3]) == 16);

    img.channels = 3;
    img.pixels.assign(32 * 16 * 3, 0.5);
    CHECK(encode_png(img).size() > 0);
}

TEST_CASE("SVG outputs") {
    SUBCASE("ROC plot is well-formed") {
        const RocCurve curve = roc_curve({0.8, 0.9}, {0.1, 0.2});
        const std::string svg = render_roc_svg(curve, "test");
        CHECK(svg.rfind("<svg", 0) == 0);
        CHECK(svg.find("</svg>") != std::string::npos);
        CHECK(svg.find("<path") != std::string::npos);
    }
    SUBCASE("bar chart has one rect per method x setting") {
        std::vector<SettingResult> results;
        for (int s = 0; s < 15; ++s) {
            SettingResult cell;
            cell.train_setting = cell.test_setting = "s" + std::to_string(s);
            for (int m = 0; m < 7; ++m)
                cell.methods.push_back(
                    {"m" + std::to_string(m),
                     MetricsReport{50.0 + s + m, 10, 1, 5, 5, 10, 10}});
            results.push_back(std::move(cell));
        }
        const std::string svg = render_bar_svg(results, "auc_pct", "AUC");
        std::size_t rects = 0, pos = 0;
        while ((pos = svg.find("<rect", pos)) != std::string::npos) {
            ++rects;
            pos += 5;
        }
        CHECK(rects == 7 * 15 + 1);  // one background rect
        CHECK_THROWS_AS(render_bar_svg({}, "auc_pct", "x"), std::invalid_argument);
    }
    SUBCASE("single-row table yields a single-bar chart") {
        std::vector<SettingResult> one{{"s", "s", {{"m", MetricsReport{80, 1, 1, 1, 1, 2, 2}}}}};
        const std::string svg = render_bar_svg(one, "auc_pct", "AUC");
        std::size_t rects = 0, pos = 0;
        while ((pos = svg.find("<rect", pos)) != std::string::npos) {
            ++rects;
            pos += 5;
        }
        CHECK(rects == 2);
    }
}
