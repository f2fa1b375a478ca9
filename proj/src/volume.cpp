/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "blueprint/volume.hpp"
#include "blueprint/error.hpp"
#include "blueprint/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace blueprint {

std::size_t VolumeProxy::lookup(const Eigen::Vector3d& p) const
{
    int idx[3];
    for (int a = 0; a < 3; ++a) {
        const int k = static_cast<int>(std::floor((p[a] - bounds.min[a]) / voxel[a]));
        idx[a] = std::clamp(k, 0, dims[a] - 1);
    }
    return index(idx[0], idx[1], idx[2]);
}

Eigen::Vector3d VolumeProxy::voxel_center(int x, int y, int z) const
{
    return bounds.min + (Eigen::Vector3d(x, y, z).array() + 0.5).matrix().cwiseProduct(voxel);
}

std::size_t VolumeProxy::occupied_interior_voxels() const
{
    std::size_t n = 0;
    for (int z = 1; z + 1 < dims.z(); ++z) {
        for (int y = 1; y + 1 < dims.y(); ++y) {
            for (int x = 1; x + 1 < dims.x(); ++x) {
                n += density[index(x, y, z)] > 0.0 ? 1 : 0;
            }
        }
    }
    return n;
}

VolumeProxy build_volume_proxy(const Scene& scene, double voxel_size, double sigma_solid)
{
    if (!(voxel_size > 0.0)) {
        throw Error("voxel size must be positive");
    }
    VolumeProxy proxy;
    proxy.room = scene.room;
    const Eigen::Vector3d extent = scene.room.extent();
    for (int a = 0; a < 3; ++a) {
        const int n = std::max(1, static_cast<int>(std::lround(extent[a] / voxel_size)));
        proxy.voxel[a] = extent[a] / n;
        proxy.dims[a] = n + 2;
    }
    proxy.bounds = {scene.room.min - proxy.voxel, scene.room.max + proxy.voxel};

    const std::size_t count = static_cast<std::size_t>(proxy.dims.prod());
    proxy.density.assign(count, 0.0);
    proxy.color.assign(count, Color{0.0, 0.0, 0.0});
    proxy.labels.assign(count, kVoidClass);

    for (int z = 0; z < proxy.dims.z(); ++z) {
        for (int y = 0; y < proxy.dims.y(); ++y) {
            for (int x = 0; x < proxy.dims.x(); ++x) {
                const std::size_t k = proxy.index(x, y, z);
                int cls = kVoidClass;
                Rgb8 rgb{0, 0, 0};
                if (z == 0) {
                    cls = scene.floor_class;
                } else if (z == proxy.dims.z() - 1) {
                    cls = scene.ceiling_class;
                } else if (x == 0 || y == 0 || x == proxy.dims.x() - 1 || y == proxy.dims.y() - 1) {
                    cls = scene.wall_class;
                }
                if (cls != kVoidClass) {
                    rgb = scene.class_color(cls);
                } else {
                    const Eigen::Vector3d c = proxy.voxel_center(x, y, z);
                    for (const auto& b : scene.boxes) {
                        if (b.bounds.contains(c)) {
                            cls = b.class_id;
                            rgb = b.color;
                            break;
                        }
                    }
                }
                if (cls != kVoidClass) {
                    proxy.density[k] = sigma_solid;
                    proxy.color[k] = to_color(rgb);
                    proxy.labels[k] = cls;
                }
            }
        }
    }
    return proxy;
}

RayResult march_ray(const VolumeProxy& proxy, const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                    double s_near, double s_far, int samples, const EditSet* edits)
{
    RayResult out;
    if (!(s_far > s_near) || samples < 1) {
        return out;
    }
    const double ds = (s_far - s_near) / samples;
    const double delta = ds * dir.norm();
    const bool editing = edits && !edits->empty();

    double transmittance = 1.0;
    double weight_sum = 0.0;
    double depth_sum = 0.0;
    double best_weight = -1.0;
    for (int i = 0; i < samples; ++i) {
        const double s = s_near + (i + 0.5) * ds;
        const Eigen::Vector3d p = origin + s * dir;
        const std::size_t k = proxy.lookup(p);
        double sigma = proxy.density[k];
        Color c = proxy.color[k];
        bool in_mask = false;
        if (editing) {
            const EditedSample e = apply_to_sample(*edits, WorldPoint::from(p), sigma, c);
            sigma = e.sigma;
            c = e.color;
            in_mask = e.in_mask;
            out.touched = out.touched || e.in_region;
        }
        const double attenuation = std::exp(-sigma * delta);
        const double w = transmittance * (1.0 - attenuation);
        transmittance *= attenuation;
        for (int ch = 0; ch < 3; ++ch) {
            out.color[ch] += w * c[ch];
        }
        weight_sum += w;
        depth_sum += w * s;
        if (w > best_weight) {
            best_weight = w;
            out.label = w > 0.0 ? proxy.labels[k] : kVoidClass;
            out.in_mask = w > 0.0 && in_mask;
        }
    }
    out.opacity = weight_sum;
    if (weight_sum < 1e-6) {
        out.depth = 0.0;
        out.label = kVoidClass;
        out.in_mask = false;
    } else {
        out.depth = depth_sum / weight_sum;
    }
    return out;
}

VolumeRender render_volume(const VolumeProxy& proxy, const CameraParams& cam, int samples_per_ray,
                           const EditSet* edits, int threads)
{
    if (samples_per_ray < 2) {
        throw Error("samples_per_ray must be at least 2");
    }
    cam.validate();
    VolumeRender out;
    out.rgb = Image<Color>(cam.width, cam.height, Color{0.0, 0.0, 0.0});
    out.depth = Image<double>(cam.width, cam.height, 0.0);
    out.opacity = Image<double>(cam.width, cam.height, 0.0);
    out.mask = Image<std::uint8_t>(cam.width, cam.height, 0);
    out.touched = Image<std::uint8_t>(cam.width, cam.height, 0);
    out.semantic = Image<int>(cam.width, cam.height, kVoidClass);

    const Eigen::Vector3d origin = cam.center();
    parallel_for(static_cast<std::size_t>(cam.height), threads, [&](std::size_t v0, std::size_t v1) {
        for (auto v = static_cast<int>(v0); v < static_cast<int>(v1); ++v) {
            for (int u = 0; u < cam.width; ++u) {
                const Eigen::Vector3d dir = cam.ray_direction(u + 0.5, v + 0.5);
                const auto span = proxy.bounds.intersect(origin, dir);
                if (!span) {
                    continue;
                }
                const double s_near = std::max(0.0, span->first);
                const RayResult r = march_ray(proxy, origin, dir, s_near, span->second, samples_per_ray, edits);
                out.rgb.at(u, v) = r.color;
                out.depth.at(u, v) = r.depth;
                out.opacity.at(u, v) = r.opacity;
                out.mask.at(u, v) = r.in_mask ? 1 : 0;
                out.touched.at(u, v) = r.touched ? 1 : 0;
                out.semantic.at(u, v) = r.label;
            }
        }
    });
    return out;
}

} // namespace blueprint
