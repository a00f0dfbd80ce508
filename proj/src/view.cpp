#include "fusekit/view.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace fusekit {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate_camera(const Camera& cam) {
    if (cam.projection == Projection::perspective &&
        !(cam.fov_deg > 0.0 && cam.fov_deg < 180.0))
        throw std::invalid_argument("fov must be in (0, 180) degrees");
    if (!(cam.subject_distance > 1.0))
        throw std::invalid_argument("subject_distance must exceed 1 bounding radius");
    if (cam.width < 16 || cam.height < 16)
        throw std::invalid_argument("image size must be at least 16x16");
}

Vec3 rotate(const Vec3& v, double azimuth_deg, double elevation_deg) {
    // Extrinsic: azimuth about the world vertical (y) axis first, then
    // elevation about the world horizontal (x) axis.
    const double az = azimuth_deg * kPi / 180.0;
    const double el = elevation_deg * kPi / 180.0;
    const double ca = std::cos(az), sa = std::sin(az);
    const double ce = std::cos(el), se = std::sin(el);
    const double x1 = ca * v[0] + sa * v[2];
    const double y1 = v[1];
    const double z1 = -sa * v[0] + ca * v[2];
    return {x1, ce * y1 - se * z1, se * y1 + ce * z1};
}

}  // namespace

std::vector<Pose> pose_grid(const PoseGridParams& p) {
    if (!(p.offset_deg > 0.0))
        throw std::invalid_argument("pose grid offset must be positive");
    if (p.max_azimuth_deg < 0.0 || p.max_elevation_deg < 0.0)
        throw std::invalid_argument("pose grid bounds must be nonnegative");

    // Index-based stepping avoids drift from repeated addition; the tolerance
    // keeps the inclusive upper bound robust when offset divides the span.
    const double eps = 1e-9;
    std::vector<Pose> grid;
    for (int ei = 0;; ++ei) {
        const double el = -p.max_elevation_deg + ei * p.offset_deg;
        if (el > p.max_elevation_deg + eps) break;
        for (int ai = 0;; ++ai) {
            const double az = -p.max_azimuth_deg + ai * p.offset_deg;
            if (az > p.max_azimuth_deg + eps) break;
            grid.push_back({az, el});
        }
    }
    return grid;
}

std::vector<ProjectedVertex> project_vertices(const Mesh& m, const Pose& pose,
                                              const Camera& cam) {
    validate_camera(cam);
    const double cx = cam.width / 2.0;
    const double cy = cam.height / 2.0;
    const double half_min = std::min(cam.width, cam.height) / 2.0;
    const double focal =
        half_min / std::tan(cam.fov_deg * kPi / 360.0);  // pixels
    const double ortho_scale = half_min / cam.ortho_half_extent;

    std::vector<ProjectedVertex> out;
    out.reserve(m.vertices.size());
    for (const auto& v : m.vertices) {
        const Vec3 r = rotate(v, pose.azimuth_deg, pose.elevation_deg);
        ProjectedVertex pv;
        // Camera sits at (0, 0, subject_distance) looking at the origin.
        pv.depth = cam.subject_distance - r[2];
        if (cam.projection == Projection::perspective) {
            if (pv.depth <= 0.0) {
                pv.behind_camera = true;
                out.push_back(pv);
                continue;
            }
            pv.x = cx + focal * r[0] / pv.depth;
            pv.y = cy - focal * r[1] / pv.depth;
        } else {
            pv.x = cx + ortho_scale * r[0];
            pv.y = cy - ortho_scale * r[1];
        }
        out.push_back(pv);
    }
    return out;
}

ViewImage rasterize(const Mesh& m, const Pose& pose, const Camera& cam,
                    Shading shading) {
    validate_camera(cam);
    const auto projected = project_vertices(m, pose, cam);

    ViewImage img;
    img.pose = pose;
    img.width = cam.width;
    img.height = cam.height;
    img.channels = m.has_colors() ? 3 : 1;
    img.pixels.assign(static_cast<std::size_t>(cam.width) * cam.height * img.channels, 0.0);
    img.depth.assign(static_cast<std::size_t>(cam.width) * cam.height,
                     std::numeric_limits<double>::infinity());

    for (const auto& tri : m.triangles) {
        const ProjectedVertex& a = projected[tri[0]];
        const ProjectedVertex& b = projected[tri[1]];
        const ProjectedVertex& c = projected[tri[2]];
        if (a.behind_camera || b.behind_camera || c.behind_camera) continue;

        double area = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        if (area == 0.0) continue;  // edge-on

        double intensity = 1.0;
        if (shading == Shading::lambert) {
            // Headlight: face normal in rotated space against the view axis.
            const Vec3 ra = rotate(m.vertices[tri[0]], pose.azimuth_deg, pose.elevation_deg);
            const Vec3 rb = rotate(m.vertices[tri[1]], pose.azimuth_deg, pose.elevation_deg);
            const Vec3 rc = rotate(m.vertices[tri[2]], pose.azimuth_deg, pose.elevation_deg);
            const Vec3 e1 = {rb[0] - ra[0], rb[1] - ra[1], rb[2] - ra[2]};
            const Vec3 e2 = {rc[0] - ra[0], rc[1] - ra[1], rc[2] - ra[2]};
            Vec3 n = {e1[1] * e2[2] - e1[2] * e2[1], e1[2] * e2[0] - e1[0] * e2[2],
                      e1[0] * e2[1] - e1[1] * e2[0]};
            const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
            // Light travels along -z; flip the normal toward the camera.
            intensity = len > 0.0 ? std::abs(n[2]) / len : 0.0;
        }

        const int min_x = std::max(0, static_cast<int>(std::floor(
                                          std::min({a.x, b.x, c.x}) - 0.5)));
        const int max_x = std::min(cam.width - 1,
                                   static_cast<int>(std::ceil(std::max({a.x, b.x, c.x}))));
        const int min_y = std::max(0, static_cast<int>(std::floor(
                                          std::min({a.y, b.y, c.y}) - 0.5)));
        const int max_y = std::min(cam.height - 1,
                                   static_cast<int>(std::ceil(std::max({a.y, b.y, c.y}))));

        const double inv_area = 1.0 / area;
        for (int py = min_y; py <= max_y; ++py) {
            const double sy = py + 0.5;  // pixel-center sampling
            for (int px = min_x; px <= max_x; ++px) {
                const double sx = px + 0.5;
                double w0 = ((b.x - a.x) * (sy - a.y) - (b.y - a.y) * (sx - a.x)) * inv_area;
                double w1 = ((c.x - b.x) * (sy - b.y) - (c.y - b.y) * (sx - b.x)) * inv_area;
                double w2 = ((a.x - c.x) * (sy - c.y) - (a.y - c.y) * (sx - c.x)) * inv_area;
                if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
                // Barycentric weights: w1 belongs to vertex a, w2 to b, w0 to c.
                const double depth = w1 * a.depth + w2 * b.depth + w0 * c.depth;
                const std::size_t pix = static_cast<std::size_t>(py) * cam.width + px;
                if (depth >= img.depth[pix]) continue;  // nearer surface wins
                img.depth[pix] = depth;
                if (img.channels == 3) {
                    const Vec3& ca_ = m.colors[tri[0]];
                    const Vec3& cb_ = m.colors[tri[1]];
                    const Vec3& cc_ = m.colors[tri[2]];
                    for (int k = 0; k < 3; ++k)
                        img.pixels[pix * 3 + k] =
                            intensity * (w1 * ca_[k] + w2 * cb_[k] + w0 * cc_[k]);
                } else {
                    img.pixels[pix] = intensity;
                }
            }
        }
    }
    return img;
}

std::vector<ViewImage> enlarge_gallery(const Mesh& m, const PoseGridParams& p,
                                       const Camera& cam, Shading shading,
                                       int threads) {
    const std::vector<Pose> grid = pose_grid(p);
    std::vector<ViewImage> images(grid.size());
    if (threads < 1) threads = 1;
    threads = std::min<int>(threads, static_cast<int>(grid.size()));

    if (threads == 1) {
        for (std::size_t i = 0; i < grid.size(); ++i)
            images[i] = rasterize(m, grid[i], cam, shading);
        return images;
    }
    // Each pose is rendered whole by one worker, so the pixel content cannot
    // depend on the thread count.
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < grid.size();
                 i = next.fetch_add(1))
                images[i] = rasterize(m, grid[i], cam, shading);
        });
    }
    for (auto& th : pool) th.join();
    return images;
}

}  // namespace fusekit
