#include "gridmotion/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "gridmotion/random.hpp"

namespace gmc {

void SceneConfig::validate() const {
    if (intrinsics.fx <= 0.0 || intrinsics.fy <= 0.0)
        throw Error("SceneConfig: focal lengths must be positive");
    if (intrinsics.width <= 0 || intrinsics.height <= 0)
        throw Error("SceneConfig: image dimensions must be positive");
    if (n_static < 0)
        throw Error("SceneConfig: n_static must be >= 0");
    if (!(z_min > 0.0 && z_max >= z_min))
        throw Error("SceneConfig: depth range must satisfy 0 < z_min <= z_max");
    if (!camera_motion.is_valid())
        throw Error("SceneConfig: camera_motion is not a valid SE3");
    for (const auto& obj : objects) {
        if (obj.n_points < 0)
            throw Error("SceneConfig: object n_points must be >= 0");
        if (obj.extent <= 0.0)
            throw Error("SceneConfig: object extent must be positive");
        if (!obj.motion.is_valid())
            throw Error("SceneConfig: object motion is not a valid SE3");
    }
    if (pixel_noise_sigma < 0.0 || depth_noise_sigma < 0.0)
        throw Error("SceneConfig: noise sigmas must be >= 0");
    if (!(false_match_rate >= 0.0 && false_match_rate < 1.0))
        throw Error("SceneConfig: false_match_rate must lie in [0, 1)");
}

namespace {

constexpr int kMaxRetries = 100;

// Adds per-frame pixel and relative depth noise, then back-projects so the
// emitted pixel and 3D point stay consistent. Draw order per side: du, dv,
// dz (redrawn wholesale when the result leaves the frustum).
void apply_noise(const Intrinsics& cam, double pixel_sigma, double depth_sigma,
                 Rng& rng, Vec2& px, Vec3& x) {
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        const double u = px.x() + pixel_sigma * normal01(rng);
        const double v = px.y() + pixel_sigma * normal01(rng);
        const double z = x.z() * (1.0 + depth_sigma * normal01(rng));
        if (z > 0.0 && cam.in_bounds({u, v})) {
            px = {u, v};
            x = cam.backproject(u, v, z);
            return;
        }
    }
    throw Error("generate: noise repeatedly pushed a point outside the frustum");
}

} // namespace

Scene generate(const SceneConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);

    Scene scene;
    scene.truth.pose = cfg.camera_motion.inverse();
    const SE3& pose_gt = scene.truth.pose; // matched -> reference
    const Intrinsics& cam = cfg.intrinsics;
    const bool noisy = cfg.pixel_noise_sigma > 0.0 || cfg.depth_noise_sigma > 0.0;

    int next_id = 0;
    // Static points: sampled in the matched frustum, transported to the
    // reference frame with the exact transform the residual uses.
    for (int i = 0; i < cfg.n_static; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxRetries && !placed; ++attempt) {
            const double u = uniform(rng, 0.0, cam.width);
            const double v = uniform(rng, 0.0, cam.height);
            const double z = uniform(rng, cfg.z_min, cfg.z_max);
            const Vec3 x_ma = cam.backproject(u, v, z);
            const Vec3 x_re = transform_point(pose_gt, x_ma);
            if (x_re.z() <= 0.0 || !cam.in_bounds(cam.project(x_re))) continue;

            Correspondence c;
            c.id = next_id;
            c.x_ma = x_ma;
            c.x_re = x_re;
            c.px_ma = {u, v};
            c.px_re = cam.project(x_re);
            scene.matches.push_back(c);
            placed = true;
        }
        if (!placed)
            throw Error("generate: cannot place a static point in both frusta");
        ++next_id;
    }

    // Object points: sampled in the object's box in the reference frame,
    // displaced by the object motion, then expressed in matched-frame
    // coordinates.
    for (const auto& obj : cfg.objects) {
        std::vector<int>& members = scene.truth.object_members.emplace_back();
        for (int i = 0; i < obj.n_points; ++i) {
            bool placed = false;
            for (int attempt = 0; attempt < kMaxRetries && !placed; ++attempt) {
                Vec3 x_re;
                for (int k = 0; k < 3; ++k)
                    x_re[k] = uniform(rng, obj.center[k] - 0.5 * obj.extent,
                                      obj.center[k] + 0.5 * obj.extent);
                if (x_re.z() <= 0.0 || !cam.in_bounds(cam.project(x_re))) continue;
                const Vec3 moved = transform_point(obj.motion, x_re);
                const Vec3 x_ma = transform_point(cfg.camera_motion, moved);
                if (x_ma.z() <= 0.0 || !cam.in_bounds(cam.project(x_ma))) continue;

                Correspondence c;
                c.id = next_id;
                c.x_re = x_re;
                c.x_ma = x_ma;
                c.px_re = cam.project(x_re);
                c.px_ma = cam.project(x_ma);
                scene.matches.push_back(c);
                members.push_back(c.id);
                scene.truth.dynamic_ids.push_back(c.id);
                placed = true;
            }
            if (!placed)
                throw Error("generate: cannot place an object point in both frusta");
            ++next_id;
        }
    }

    if (noisy) {
        for (auto& c : scene.matches) {
            apply_noise(cam, cfg.pixel_noise_sigma, cfg.depth_noise_sigma, rng,
                        c.px_re, c.x_re);
            apply_noise(cam, cfg.pixel_noise_sigma, cfg.depth_noise_sigma, rng,
                        c.px_ma, c.x_ma);
        }
    }

    if (cfg.false_match_rate > 0.0) {
        scene.truth.false_match_ids = inject_false_matches(
            scene.matches, cfg.false_match_rate, cfg.seed ^ 0x5851f42d4c957f2dULL);
    }

    std::sort(scene.truth.dynamic_ids.begin(), scene.truth.dynamic_ids.end());
    return scene;
}

std::vector<int> inject_false_matches(std::vector<Correspondence>& matches,
                                      double rate, std::uint64_t seed) {
    if (!(rate >= 0.0 && rate < 1.0))
        throw Error("inject_false_matches: rate must lie in [0, 1)");
    const std::size_t n = matches.size();
    const std::size_t k = static_cast<std::size_t>(rate * static_cast<double>(n));
    if (k == 0) return {};

    Rng rng(seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + uniform_index(rng, n - i);
        std::swap(order[i], order[j]);
    }
    std::vector<std::size_t> chosen(order.begin(), order.begin() + k);
    std::sort(chosen.begin(), chosen.end());

    // Cycle the matched sides among the chosen records; with k >= 2 every
    // chosen record receives another correspondence's matched side.
    const Vec2 first_px = matches[chosen[0]].px_ma;
    const Vec3 first_x = matches[chosen[0]].x_ma;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        matches[chosen[i]].px_ma = matches[chosen[i + 1]].px_ma;
        matches[chosen[i]].x_ma = matches[chosen[i + 1]].x_ma;
    }
    matches[chosen[k - 1]].px_ma = first_px;
    matches[chosen[k - 1]].x_ma = first_x;

    std::vector<int> ids;
    ids.reserve(k);
    for (std::size_t i : chosen) ids.push_back(matches[i].id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

SceneConfig default_scene() {
    SceneConfig cfg;
    cfg.n_static = 2000;
    cfg.z_min = 2.0;
    cfg.z_max = 8.0;
    cfg.camera_motion =
        SE3::from_axis_angle({0.0, 1.0, 0.0}, 0.005, {0.03, 0.0, -0.05});
    ObjectConfig obj;
    obj.n_points = 300;
    obj.center = {0.8, 0.15, 4.5};
    obj.extent = 0.6;
    obj.motion = SE3{Mat3::Identity(), {0.3, 0.0, 0.0}};
    cfg.objects.push_back(obj);
    cfg.pixel_noise_sigma = 0.5;
    cfg.depth_noise_sigma = 0.01;
    cfg.false_match_rate = 0.0;
    cfg.seed = 1;
    return cfg;
}

} // namespace gmc
