#pragma once

#include <cstdint>
#include <optional>

#include "fusekit/mesh.hpp"

namespace fusekit {

struct Pose {
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;
};

struct PoseGridParams {
    double max_azimuth_deg = 30.0;
    double max_elevation_deg = 30.0;
    double offset_deg = 10.0;
};

enum class Projection { perspective, orthographic };

struct Camera {
    Projection projection = Projection::perspective;
    double fov_deg = 20.0;          // perspective only
    double subject_distance = 8.0;  // multiples of the bounding radius
    double ortho_half_extent = 1.2; // world half-width mapped to the short image axis
    int width = 128;
    int height = 128;
};

enum class Shading { flat, lambert };

struct ViewImage {
    Pose pose;
    int width = 0;
    int height = 0;
    int channels = 1;  // 1 grayscale, 3 RGB
    std::vector<double> pixels;  // row-major, [0,1], channels interleaved
    std::vector<double> depth;   // view-space depth per pixel; +inf = background

    double& at(int x, int y, int c = 0) {
        return pixels[static_cast<std::size_t>(y * width + x) * channels + c];
    }
    double at(int x, int y, int c = 0) const {
        return pixels[static_cast<std::size_t>(y * width + x) * channels + c];
    }
};

struct ProjectedVertex {
    double x = 0.0;      // pixel coords, +x right
    double y = 0.0;      // +y down, origin top-left
    double depth = 0.0;  // view-space depth, smaller is nearer
    bool behind_camera = false;
};

// The double loop of the gallery enlargement procedure: elevation outer from
// -M to +M, azimuth inner from -N to +N, both inclusive, stepping offset.
std::vector<Pose> pose_grid(const PoseGridParams& p);

// Rotates by azimuth about the vertical axis then elevation about the
// camera-horizontal axis (extrinsic, degrees), camera on +z looking at the
// origin, and projects to pixel coordinates.
std::vector<ProjectedVertex> project_vertices(const Mesh& m, const Pose& pose,
                                              const Camera& cam);

// Z-buffered rasterization with pixel-center sampling; nearest surface wins.
ViewImage rasterize(const Mesh& m, const Pose& pose, const Camera& cam,
                    Shading shading = Shading::lambert);

// One image per pose_grid entry, in grid order. Deterministic regardless of
// thread count: each pose is rendered independently.
std::vector<ViewImage> enlarge_gallery(const Mesh& m, const PoseGridParams& p,
                                       const Camera& cam,
                                       Shading shading = Shading::lambert,
                                       int threads = 1);

}  // namespace fusekit
