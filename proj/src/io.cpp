#include "fusekit/io.hpp"

#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace fusekit {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

[[noreturn]] void fail_line(const char* what, std::size_t line_no,
                            const std::string& detail) {
    throw std::invalid_argument(std::string(what) + " line " +
                                std::to_string(line_no) + ": " + detail);
}

double parse_double(const std::string& s, const char* what, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::logic_error&) {
        fail_line(what, line_no, "not a number: '" + s + "'");
    }
}

void append_u32le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t read_u32le(const std::string& b, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + i])) << (8 * i);
    return v;
}

}  // namespace

std::string format_score(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void atomic_write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string write_embeddings_csv(const std::vector<Embedding>& embs) {
    if (embs.empty()) throw std::invalid_argument("no embeddings to write");
    const std::size_t dim = embs[0].vector.size();
    std::string out = "subject_id,sample_id,setting_id,dim";
    for (std::size_t i = 0; i < dim; ++i) out += ",v" + std::to_string(i);
    out += "\n";
    for (const auto& e : embs) {
        if (e.vector.size() != dim)
            throw std::invalid_argument("embedding dimension mismatch: " +
                                        std::to_string(e.vector.size()) + " vs " +
                                        std::to_string(dim));
        out += e.subject_id + "," + e.sample_id + "," + e.setting_id + "," +
               std::to_string(dim);
        for (double v : e.vector) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out += ",";
            out += buf;
        }
        out += "\n";
    }
    return out;
}

std::vector<Embedding> parse_embeddings_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("embedding CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("subject_id,sample_id,setting_id,dim", 0) != 0)
        throw std::invalid_argument("embedding CSV: unexpected header '" + line + "'");

    std::vector<Embedding> out;
    std::size_t dim = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() < 5)
            fail_line("embedding CSV", line_no, "expected at least 5 fields");
        Embedding e;
        e.subject_id = fields[0];
        e.sample_id = fields[1];
        e.setting_id = fields[2];
        const auto row_dim =
            static_cast<std::size_t>(parse_double(fields[3], "embedding CSV", line_no));
        if (row_dim < 1) fail_line("embedding CSV", line_no, "dim must be >= 1");
        if (out.empty()) dim = row_dim;
        if (row_dim != dim)
            fail_line("embedding CSV", line_no,
                      "dim " + std::to_string(row_dim) + " differs from first row's " +
                          std::to_string(dim));
        if (fields.size() != 4 + row_dim)
            fail_line("embedding CSV", line_no,
                      "expected " + std::to_string(4 + row_dim) + " fields, got " +
                          std::to_string(fields.size()));
        for (std::size_t i = 0; i < row_dim; ++i) {
            const double v = parse_double(fields[4 + i], "embedding CSV", line_no);
            if (!std::isfinite(v))
                fail_line("embedding CSV", line_no, "non-finite component");
            e.vector.push_back(v);
        }
        out.push_back(std::move(e));
    }
    if (out.empty()) throw std::invalid_argument("embedding CSV holds no records");
    return out;
}

std::string write_embeddings_fev1(const std::vector<Embedding>& embs) {
    if (embs.empty()) throw std::invalid_argument("no embeddings to write");
    const std::size_t dim = embs[0].vector.size();
    std::string out = "FEV1";
    append_u32le(out, static_cast<std::uint32_t>(dim));
    append_u32le(out, static_cast<std::uint32_t>(embs.size()));
    for (const auto& e : embs) {
        if (e.vector.size() != dim)
            throw std::invalid_argument("embedding dimension mismatch in FEV1 write");
        out += e.subject_id; out.push_back('\0');
        out += e.sample_id; out.push_back('\0');
        out += e.setting_id; out.push_back('\0');
        for (double v : e.vector) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, 8);
            for (int i = 0; i < 8; ++i)
                out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
        }
    }
    return out;
}

std::vector<Embedding> parse_embeddings_fev1(const std::string& bytes) {
    if (bytes.size() < 12 || bytes.compare(0, 4, "FEV1") != 0)
        throw std::invalid_argument("not a FEV1 embedding file (bad magic)");
    const std::uint32_t dim = read_u32le(bytes, 4);
    const std::uint32_t count = read_u32le(bytes, 8);
    if (dim < 1) throw std::invalid_argument("FEV1: dim must be >= 1");

    std::vector<Embedding> out;
    std::size_t off = 12;
    auto read_str = [&]() {
        const auto end = bytes.find('\0', off);
        if (end == std::string::npos)
            throw std::invalid_argument("FEV1: truncated string field");
        std::string s = bytes.substr(off, end - off);
        off = end + 1;
        return s;
    };
    for (std::uint32_t r = 0; r < count; ++r) {
        Embedding e;
        e.subject_id = read_str();
        e.sample_id = read_str();
        e.setting_id = read_str();
        if (off + 8ull * dim > bytes.size())
            throw std::invalid_argument("FEV1: truncated vector data");
        for (std::uint32_t i = 0; i < dim; ++i) {
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b)
                bits |= static_cast<std::uint64_t>(
                            static_cast<unsigned char>(bytes[off + b])) << (8 * b);
            double v;
            std::memcpy(&v, &bits, 8);
            if (!std::isfinite(v))
                throw std::invalid_argument("FEV1: non-finite component in record " +
                                            std::to_string(r));
            e.vector.push_back(v);
            off += 8;
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<Embedding> load_embeddings(const std::string& path) {
    const std::string bytes = read_file(path);
    if (bytes.rfind("FEV1", 0) == 0) return parse_embeddings_fev1(bytes);
    return parse_embeddings_csv(bytes);
}

static const char* kScoreHeader =
    "system_id,setting_id,reference_subject,probe_subject,probe_sample,label,score";

std::string write_scores_csv(const ScoreSet& s) {
    std::string out = kScoreHeader;
    out += "\n";
    for (const auto& r : s.records) {
        out += r.system_id + "," + r.setting_id + "," + r.reference_subject + "," +
               r.probe_subject + "," + r.probe_sample + "," + to_string(r.label) + "," +
               format_score(r.score) + "\n";
    }
    return out;
}

ScoreSet parse_scores_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("score CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kScoreHeader)
        throw std::invalid_argument("score CSV: unexpected header '" + line + "'");

    ScoreSet out;
    std::set<std::tuple<std::string, std::string, std::string, std::string, std::string>> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 7)
            fail_line("score CSV", line_no, "expected 7 fields, got " +
                                                std::to_string(f.size()));
        ScoreRecord r;
        r.system_id = f[0];
        r.setting_id = f[1];
        r.reference_subject = f[2];
        r.probe_subject = f[3];
        r.probe_sample = f[4];
        r.label = label_from_string(f[5]);
        r.score = parse_double(f[6], "score CSV", line_no);
        if (!(r.score > 0.0 && r.score <= 1.0))
            fail_line("score CSV", line_no,
                      "score must be in ]0,1], got " + f[6]);
        const bool genuine_key = r.reference_subject == r.probe_subject;
        if (genuine_key != (r.label == Label::genuine))
            fail_line("score CSV", line_no,
                      "label disagrees with subject identifiers");
        if (!seen.insert({r.system_id, r.setting_id, r.reference_subject,
                          r.probe_subject, r.probe_sample}).second)
            fail_line("score CSV", line_no, "duplicate trial key");
        if (out.records.empty()) out.system_id = r.system_id;
        out.records.push_back(std::move(r));
    }
    if (out.records.empty()) throw std::invalid_argument("score CSV holds no records");
    return out;
}

ScoreSet load_scores(const std::string& path) { return parse_scores_csv(read_file(path)); }

std::string write_roc_csv(const RocCurve& curve) {
    std::string out = "threshold,fmr,fnmr\n";
    for (const auto& p : curve.points)
        out += format_score(p.threshold) + "," + format_score(p.fmr) + "," +
               format_score(p.fnmr) + "\n";
    return out;
}

static const char* kReportHeader =
    "method,auc_pct,eer_pct,cohens_d,fmr_at_fnmr1,fnmr_at_fmr1";

std::string write_report_csv(const std::vector<MethodReport>& rows) {
    if (rows.empty()) throw std::invalid_argument("empty report");
    std::string out = kReportHeader;
    out += "\n";
    for (const auto& row : rows) {
        out += row.method + "," + format_score(row.report.auc_pct) + "," +
               format_score(row.report.eer_pct) + "," +
               format_score(row.report.cohens_d) + "," +
               format_score(row.report.fmr_at_fnmr1_pct) + "," +
               format_score(row.report.fnmr_at_fmr1_pct) + "\n";
    }
    return out;
}

std::vector<MethodReport> parse_report_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("report CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kReportHeader)
        throw std::invalid_argument("report CSV: unexpected header '" + line + "'");
    std::vector<MethodReport> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 6)
            fail_line("report CSV", line_no, "expected 6 fields");
        MethodReport row;
        row.method = f[0];
        row.report.auc_pct = parse_double(f[1], "report CSV", line_no);
        row.report.eer_pct = parse_double(f[2], "report CSV", line_no);
        row.report.cohens_d = parse_double(f[3], "report CSV", line_no);
        row.report.fmr_at_fnmr1_pct = parse_double(f[4], "report CSV", line_no);
        row.report.fnmr_at_fmr1_pct = parse_double(f[5], "report CSV", line_no);
        out.push_back(std::move(row));
    }
    if (out.empty()) throw std::invalid_argument("report CSV holds no rows");
    return out;
}

std::string write_correlation_csv(const CorrelationMatrix& m) {
    std::string out = "system";
    for (const auto& s : m.systems) out += "," + s;
    out += "\n";
    for (std::size_t i = 0; i < m.systems.size(); ++i) {
        out += m.systems[i];
        for (std::size_t j = 0; j < m.systems.size(); ++j) {
            out += ",";
            out += std::isnan(m.values[i][j]) ? "nan" : format_score(m.values[i][j]);
        }
        out += "\n";
    }
    return out;
}

std::string write_breakdown_csv(const std::vector<SettingResult>& results) {
    std::string out =
        "method,train_setting,test_setting,auc_pct,eer_pct,cohens_d,fmr_at_fnmr1,fnmr_at_fmr1\n";
    for (const auto& cell : results)
        for (const auto& m : cell.methods)
            out += m.method + "," + cell.train_setting + "," + cell.test_setting + "," +
                   format_score(m.report.auc_pct) + "," + format_score(m.report.eer_pct) +
                   "," + format_score(m.report.cohens_d) + "," +
                   format_score(m.report.fmr_at_fnmr1_pct) + "," +
                   format_score(m.report.fnmr_at_fmr1_pct) + "\n";
    return out;
}

namespace {

std::string svg_header(int w, int h) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                  "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
                  w, h, w, h);
    return buf;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::string render_roc_svg(const RocCurve& curve, const std::string& title) {
    const int w = 480, h = 480, margin = 50;
    const double plot = w - 2.0 * margin;
    std::string svg = svg_header(w, h);
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + std::to_string(w / 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + title + "</text>\n";
    // Axes: x = FMR, y = 1 - FNMR.
    svg += "<line x1=\"50\" y1=\"430\" x2=\"430\" y2=\"430\" stroke=\"black\"/>\n";
    svg += "<line x1=\"50\" y1=\"430\" x2=\"50\" y2=\"50\" stroke=\"black\"/>\n";
    svg += "<text x=\"240\" y=\"460\" text-anchor=\"middle\" font-size=\"12\">FMR</text>\n";
    svg += "<text x=\"18\" y=\"240\" text-anchor=\"middle\" font-size=\"12\" "
           "transform=\"rotate(-90 18 240)\">1 - FNMR</text>\n";
    std::string path;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const double x = margin + curve.points[i].fmr * plot;
        const double y = margin + curve.points[i].fnmr * plot;
        path += (i ? " L " : "M ") + fmt(x) + " " + fmt(y);
    }
    svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n";
    svg += "</svg>\n";
    return svg;
}

std::string render_bar_svg(const std::vector<SettingResult>& results,
                           const std::string& metric, const std::string& title) {
    if (results.empty()) throw std::invalid_argument("empty table");
    auto metric_of = [&](const MetricsReport& r) {
        if (metric == "auc_pct") return r.auc_pct;
        if (metric == "eer_pct") return r.eer_pct;
        if (metric == "cohens_d") return r.cohens_d;
        if (metric == "fmr_at_fnmr1") return r.fmr_at_fnmr1_pct;
        if (metric == "fnmr_at_fmr1") return r.fnmr_at_fmr1_pct;
        throw std::invalid_argument("unknown metric '" + metric + "'");
    };

    const std::size_t n_methods = results[0].methods.size();
    const std::size_t n_settings = results.size();
    double max_v = 1e-12;
    for (const auto& cell : results)
        for (const auto& m : cell.methods) max_v = std::max(max_v, metric_of(m.report));

    const int bar_w = 8, gap = 2, group_gap = 16;
    const int margin = 50, plot_h = 320;
    const int group_w = static_cast<int>(n_settings) * (bar_w + gap) + group_gap;
    const int w = margin * 2 + static_cast<int>(n_methods) * group_w;
    const int h = margin * 2 + plot_h + 40;

    static const char* palette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                    "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
                                    "#9c755f", "#bab0ac", "#1f77b4", "#ff7f0e",
                                    "#2ca02c", "#d62728", "#9467bd"};

    std::string svg = svg_header(w, h);
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + std::to_string(w / 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + title + "</text>\n";
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
        const int gx = margin + static_cast<int>(mi) * group_w;
        for (std::size_t si = 0; si < n_settings; ++si) {
            const double v = metric_of(results[si].methods[mi].report);
            const double bh = plot_h * v / max_v;
            const int x = gx + static_cast<int>(si) * (bar_w + gap);
            const double y = margin + plot_h - bh;
            svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + fmt(y) + "\" width=\"" +
                   std::to_string(bar_w) + "\" height=\"" + fmt(bh) + "\" fill=\"" +
                   palette[si % 15] + "\"/>\n";
        }
        svg += "<text x=\"" + std::to_string(gx + group_w / 2 - group_gap / 2) +
               "\" y=\"" + std::to_string(margin + plot_h + 16) +
               "\" text-anchor=\"middle\" font-size=\"10\">" +
               results[0].methods[mi].method + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

namespace {

void append_chunk(std::string& out, const char type[4], const std::string& data) {
    append_u32le(out, 0);  // placeholder, PNG wants big-endian; rewrite below
    const std::size_t len_pos = out.size() - 4;
    const std::uint32_t n = static_cast<std::uint32_t>(data.size());
    out[len_pos] = static_cast<char>((n >> 24) & 0xff);
    out[len_pos + 1] = static_cast<char>((n >> 16) & 0xff);
    out[len_pos + 2] = static_cast<char>((n >> 8) & 0xff);
    out[len_pos + 3] = static_cast<char>(n & 0xff);
    const std::size_t crc_start = out.size();
    out.append(type, 4);
    out += data;
    const uLong crc = crc32(0L, reinterpret_cast<const Bytef*>(out.data() + crc_start),
                            static_cast<uInt>(out.size() - crc_start));
    for (int i = 3; i >= 0; --i)
        out.push_back(static_cast<char>((crc >> (8 * i)) & 0xff));
}

}  // namespace

std::string encode_png(const ViewImage& img) {
    if (img.channels != 1 && img.channels != 3)
        throw std::invalid_argument("PNG encoder supports 1 or 3 channels");
    const int w = img.width, h = img.height, c = img.channels;

    // Raw scanlines, filter byte 0 per row.
    std::string raw;
    raw.reserve(static_cast<std::size_t>(h) * (1 + static_cast<std::size_t>(w) * c));
    for (int y = 0; y < h; ++y) {
        raw.push_back('\0');
        for (int x = 0; x < w; ++x)
            for (int k = 0; k < c; ++k) {
                const double v = std::clamp(img.at(x, y, k), 0.0, 1.0);
                raw.push_back(static_cast<char>(std::lround(v * 255.0)));
            }
    }

    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::string compressed(bound, '\0');
    if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &bound,
                  reinterpret_cast<const Bytef*>(raw.data()),
                  static_cast<uLong>(raw.size()), 9) != Z_OK)
        throw std::runtime_error("zlib compression failed");
    compressed.resize(bound);

    std::string ihdr;
    for (int i = 3; i >= 0; --i) ihdr.push_back(static_cast<char>((w >> (8 * i)) & 0xff));
    for (int i = 3; i >= 0; --i) ihdr.push_back(static_cast<char>((h >> (8 * i)) & 0xff));
    ihdr.push_back(8);                        // bit depth
    ihdr.push_back(c == 1 ? 0 : 2);           // grayscale / truecolor
    ihdr.push_back(0); ihdr.push_back(0); ihdr.push_back(0);

    std::string out("\x89PNG\r\n\x1a\n", 8);
    append_chunk(out, "IHDR", ihdr);
    append_chunk(out, "IDAT", compressed);
    append_chunk(out, "IEND", "");
    return out;
}

void write_png(const std::string& path, const ViewImage& img) {
    atomic_write_file(path, encode_png(img));
}

}  // namespace fusekit
