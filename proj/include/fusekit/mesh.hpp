#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fusekit {

using Vec3 = std::array<double, 3>;

// Triangle mesh of a reconstructed face template.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Vec3> colors;  // per-vertex RGB in [0,1]; empty if absent

    bool has_colors() const { return !colors.empty(); }
};

// Parses the OBJ subset: v (with optional RGB extension), f with fan
// triangulation. vn/vt lines are ignored; usemtl/mtllib trigger the warning
// callback. Throws on malformed records, out-of-range or zero indices, or a
// mesh with no faces; messages cite the 1-based line number.
Mesh load_mesh(const std::string& obj_text,
               const std::function<void(const std::string&)>& warn = {});

Mesh load_mesh_file(const std::string& path,
                    const std::function<void(const std::string&)>& warn = {});

// Centers the vertex centroid at the origin and scales so the bounding-sphere
// radius is 1. Rejects meshes whose vertices all coincide.
Mesh normalize_mesh(const Mesh& m);

}  // namespace fusekit
