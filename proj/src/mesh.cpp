#include "fusekit/mesh.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fusekit {

namespace {

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
    throw std::invalid_argument("OBJ line " + std::to_string(line_no) + ": " + what);
}

int resolve_index(const std::string& token, std::size_t line_no,
                  std::size_t vertex_count) {
    // Tokens may be v, v/vt, v//vn or v/vt/vn; only the vertex index matters.
    const std::string head = token.substr(0, token.find('/'));
    long idx;
    try {
        std::size_t pos = 0;
        idx = std::stol(head, &pos);
        if (pos != head.size()) fail(line_no, "malformed face index '" + token + "'");
    } catch (const std::logic_error&) {
        fail(line_no, "malformed face index '" + token + "'");
    }
    if (idx == 0) fail(line_no, "face index 0 is invalid (OBJ indices are 1-based)");
    if (idx < 0) idx = static_cast<long>(vertex_count) + idx + 1;  // relative index
    if (idx < 1 || idx > static_cast<long>(vertex_count))
        fail(line_no, "face index " + head + " out of range (have " +
                          std::to_string(vertex_count) + " vertices)");
    return static_cast<int>(idx - 1);
}

}  // namespace

Mesh load_mesh(const std::string& obj_text,
               const std::function<void(const std::string&)>& warn) {
    Mesh mesh;
    bool any_color = false;
    std::istringstream in(obj_text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;

        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z)) fail(line_no, "vertex needs 3 coordinates");
            mesh.vertices.push_back({x, y, z});
            double r, g, b;
            if (ls >> r >> g >> b) {  // vertex-color extension
                mesh.colors.resize(mesh.vertices.size(), {1.0, 1.0, 1.0});
                mesh.colors.back() = {r, g, b};
                any_color = true;
            }
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string token;
            while (ls >> token)
                poly.push_back(resolve_index(token, line_no, mesh.vertices.size()));
            if (poly.size() < 3) fail(line_no, "face needs at least 3 vertices");
            for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
                const std::array<int, 3> tri = {poly[0], poly[i], poly[i + 1]};
                if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
                    fail(line_no, "degenerate triangle (repeated vertex index)");
                mesh.triangles.push_back(tri);
            }
        } else if (tag == "usemtl" || tag == "mtllib") {
            if (warn) warn("OBJ line " + std::to_string(line_no) + ": '" + tag +
                           "' is not supported and was ignored");
        }
        // vn, vt, o, g, s: ignored
    }
    if (mesh.triangles.empty())
        throw std::invalid_argument("OBJ contains no faces");
    if (any_color) mesh.colors.resize(mesh.vertices.size(), {1.0, 1.0, 1.0});
    return mesh;
}

Mesh load_mesh_file(const std::string& path,
                    const std::function<void(const std::string&)>& warn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open mesh file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_mesh(buf.str(), warn);
}

Mesh normalize_mesh(const Mesh& m) {
    if (m.vertices.empty()) throw std::invalid_argument("mesh has no vertices");
    Vec3 centroid = {0.0, 0.0, 0.0};
    for (const auto& v : m.vertices)
        for (int k = 0; k < 3; ++k) centroid[k] += v[k];
    for (int k = 0; k < 3; ++k)
        centroid[k] /= static_cast<double>(m.vertices.size());

    double radius = 0.0;
    for (const auto& v : m.vertices) {
        double d2 = 0.0;
        for (int k = 0; k < 3; ++k)
            d2 += (v[k] - centroid[k]) * (v[k] - centroid[k]);
        radius = std::max(radius, std::sqrt(d2));
    }
    if (radius == 0.0)
        throw std::invalid_argument("cannot normalize: all vertices coincide");

    Mesh out = m;
    for (auto& v : out.vertices)
        for (int k = 0; k < 3; ++k) v[k] = (v[k] - centroid[k]) / radius;
    return out;
}

}  // namespace fusekit
