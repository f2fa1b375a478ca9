/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "blueprint/dataset.hpp"
#include "blueprint/editing.hpp"
#include "blueprint/field.hpp"
#include "blueprint/scene.hpp"
#include "blueprint/volume.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace blueprint {

struct ServiceOptions {
    double cell_size = 0.1;
    double voxel_size = 0.05;
    int samples_per_ray = 128;
    int cameras = 12;         ///< trajectory views offered for rendering
    std::uint64_t seed = 0;
    TrajectoryConfig trajectory;
    int threads = 1;
};

/// Training settings for a service started without a field file.
struct StartupTraining {
    int frames = 45;
    EncoderConfig encoder;
    TrainConfig train;
};

/// Client-visible failure: HTTP status plus message.
struct ServiceError : std::runtime_error {
    int status;
    ServiceError(int status_, const std::string& msg) : std::runtime_error(msg), status(status_) {}
};

/// Read-only scene state plus per-session edit lists. All handlers are safe
/// to call concurrently.
class Service {
public:
    Service(Scene scene, FieldParams field, const ServiceOptions& opts = {});

    /// Trains a field on the scene's own trajectory before serving.
    static std::unique_ptr<Service> train_on_start(Scene scene, const StartupTraining& training,
                                                   const ServiceOptions& opts = {});

    nlohmann::json scene_json() const;
    nlohmann::json blueprint_json() const;
    std::vector<std::uint8_t> blueprint_png() const;
    nlohmann::json components_json() const;
    nlohmann::json select(const nlohmann::json& request) const;
    nlohmann::json cameras_json() const;

    nlohmann::json add_edit(const std::string& session, const nlohmann::json& command);
    nlohmann::json edits_json(const std::string& session) const;
    /// Drops one component's edit, or all of them.
    nlohmann::json clear_edits(const std::string& session, std::optional<int> component);

    struct Render {
        VolumeRender view;
        std::vector<std::uint8_t> png;
    };
    /// {camera: index | camera object, edits?: [...], samples_per_ray?}.
    /// Without `edits`, the session's edit list applies.
    Render render(const std::string& session, const nlohmann::json& request) const;

    const Scene& scene() const { return scene_; }
    const FieldParams& field() const { return field_; }
    const BlueprintRaster& blueprint() const { return blueprint_; }
    const ComponentMap& components() const { return components_; }
    const VolumeProxy& proxy() const { return proxy_; }
    const std::vector<CameraParams>& cameras() const { return cameras_; }
    EditOptions edit_options() const;

private:
    EditCommand parse_command(const nlohmann::json& j) const;

    Scene scene_;
    FieldParams field_;
    ServiceOptions opts_;
    BlueprintBounds bounds_;
    BlueprintRaster blueprint_;
    ComponentMap components_;
    VolumeProxy proxy_;
    std::vector<CameraParams> cameras_;

    struct Session {
        std::mutex mutex;
        std::vector<EditCommand> edits;
    };
    Session& session(const std::string& id) const;
    mutable std::mutex sessions_mutex_;
    mutable std::map<std::string, std::unique_ptr<Session>> sessions_;
};

/// HTTP front end for a Service.
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds (port 0 picks a free port) and serves on a background thread.
    /// Returns the bound port; throws when binding fails.
    int start(const std::string& host, int port);
    /// Binds and serves on the calling thread until stop().
    void run(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Splits "host:port"; a bare port binds 127.0.0.1.
std::pair<std::string, int> parse_bind_address(const std::string& addr);

} // namespace blueprint
