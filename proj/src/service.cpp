/* SPDX-FileCopyrightText: 2026 Blueprint Field Authors
 *
 * SPDX-License-Identifier: Apache-2.0 */

#include "blueprint/service.hpp"
#include "blueprint/error.hpp"
#include "blueprint/image_io.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <thread>

namespace blueprint {

using nlohmann::json;

namespace {

json bounds_json(const BlueprintBounds& b)
{
    return {{"x_min", b.x_min}, {"x_max", b.x_max}, {"y_min", b.y_min}, {"y_max", b.y_max}};
}

json palette_json(const Scene& scene)
{
    json classes = json::array();
    for (const auto& c : scene.classes) {
        classes.push_back({{"id", c.id}, {"name", c.name}, {"color", {c.color[0], c.color[1], c.color[2]}}});
    }
    return classes;
}

GridSize grid_for(const BlueprintBounds& b, double cell)
{
    return {std::max(1, static_cast<int>(std::lround(b.width() / cell))),
            std::max(1, static_cast<int>(std::lround(b.depth() / cell)))};
}

std::vector<View> render_views(const Scene& scene, const std::vector<CameraParams>& cams, int threads)
{
    std::vector<View> views;
    views.reserve(cams.size());
    for (const auto& c : cams) {
        views.push_back(render_view(scene, c, threads));
    }
    return views;
}

} // namespace

Service::Service(Scene scene, FieldParams field, const ServiceOptions& opts)
    : scene_(std::move(scene)), field_(std::move(field)), opts_(opts)
{
    scene_.validate();
    if (opts_.cameras < 1 || !(opts_.cell_size > 0.0) || !(opts_.voxel_size > 0.0) || opts_.samples_per_ray < 2) {
        throw Error("invalid service options");
    }
    if (field_.num_classes != scene_.num_classes()) {
        throw Error("field classes do not match the scene");
    }
    bounds_ = scene_.floor_bounds();
    blueprint_ = rasterize_field(field_, bounds_, grid_for(bounds_, opts_.cell_size), opts_.threads);
    cameras_ = sample_trajectory(scene_, opts_.cameras, opts_.seed, opts_.trajectory);
    const auto views = render_views(scene_, cameras_, opts_.threads);
    const auto ds = project_dataset(views, bounds_);
    components_ = connected_components(blueprint_, ds.samples, scene_.room.min.z(), scene_.room.max.z());
    proxy_ = build_volume_proxy(scene_, opts_.voxel_size);
}

std::unique_ptr<Service> Service::train_on_start(Scene scene, const StartupTraining& training,
                                                 const ServiceOptions& opts)
{
    scene.validate();
    const auto cams = sample_trajectory(scene, training.frames, opts.seed, opts.trajectory);
    const auto views = render_views(scene, cams, opts.threads);
    const auto ds = project_dataset(views, scene.floor_bounds());
    TrainConfig tc = training.train;
    tc.bounds = scene.floor_bounds();
    tc.num_classes = scene.num_classes();
    auto result = train_field(ds.samples, training.encoder, tc);
    return std::make_unique<Service>(std::move(scene), std::move(result.params), opts);
}

EditOptions Service::edit_options() const
{
    EditOptions o;
    o.vertical_padding = opts_.voxel_size;
    o.room_z_min = scene_.room.min.z();
    o.room_z_max = scene_.room.max.z();
    return o;
}

json Service::scene_json() const
{
    json j = scene_to_json(scene_);
    j["palette"] = palette_json(scene_);
    j["bounds"] = bounds_json(bounds_);
    return j;
}

std::vector<std::uint8_t> Service::blueprint_png() const
{
    auto palette = scene_.palette();
    return encode_png_indexed(raster_to_image(blueprint_), palette);
}

json Service::blueprint_json() const
{
    const auto png = blueprint_png();
    json j = raster_sidecar(blueprint_, scene_.palette());
    j["png"] = base64_encode(png);
    return j;
}

json Service::components_json() const
{
    json list = json::array();
    for (const auto& c : components_.components) {
        const auto* info = scene_.find_class(c.class_id);
        list.push_back({{"id", c.id},
                        {"class", c.class_id},
                        {"class_name", info ? info->name : std::string()},
                        {"cells", c.cells},
                        {"extent", bounds_json(c.extent)},
                        {"z_min", c.z_min},
                        {"z_max", c.z_max}});
    }
    return {{"nx", components_.size.nx}, {"ny", components_.size.ny}, {"components", list}};
}

json Service::select(const json& request) const
{
    BlueprintCoord c;
    try {
        c = {request.at("x").get<double>(), request.at("y").get<double>()};
    } catch (const json::exception&) {
        throw ServiceError(400, "select needs numeric x and y");
    }
    int id = 0;
    try {
        id = select_component(components_, c);
    } catch (const Error& e) {
        throw ServiceError(400, e.what());
    }
    if (id == 0) {
        return {{"component", 0}, {"class", kVoidClass}, {"cells", json::array()}};
    }
    json cells = json::array();
    for (const auto& cell : components_.cells_of(id)) {
        cells.push_back({cell.i, cell.j});
    }
    const auto& info = components_.info(id);
    return {{"component", id}, {"class", info.class_id}, {"cells", cells}};
}

json Service::cameras_json() const
{
    json list = json::array();
    for (std::size_t k = 0; k < cameras_.size(); ++k) {
        json c = camera_to_json(cameras_[k]);
        c["index"] = k;
        list.push_back(c);
    }
    return list;
}

EditCommand Service::parse_command(const json& j) const
{
    if (j.contains("image")) {
        throw ServiceError(400, "image paths are not accepted over HTTP; send image_data (base64 PNG)");
    }
    json cmd = j;
    std::optional<Image<Rgba8>> image;
    if (j.contains("image_data")) {
        try {
            image = decode_png(base64_decode(j.at("image_data").get<std::string>()));
        } catch (const std::exception& e) {
            throw ServiceError(400, std::string("image_data: ") + e.what());
        }
        cmd.erase("image_data");
    }
    EditCommand out;
    try {
        out = parse_edit_command(cmd, nullptr);
    } catch (const Error& e) {
        throw ServiceError(400, e.what());
    }
    out.image = std::move(image);
    return out;
}

Service::Session& Service::session(const std::string& id) const
{
    std::lock_guard lock(sessions_mutex_);
    auto& slot = sessions_[id];
    if (!slot) {
        slot = std::make_unique<Session>();
    }
    return *slot;
}

json Service::edits_json(const std::string& id) const
{
    auto& s = session(id);
    std::lock_guard lock(s.mutex);
    json list = json::array();
    for (const auto& e : s.edits) {
        json j = edit_command_to_json(e);
        if (e.image) {
            j["has_image"] = true;
        }
        list.push_back(j);
    }
    return {{"session", id}, {"edits", list}};
}

json Service::add_edit(const std::string& id, const json& command)
{
    EditCommand cmd = parse_command(command);
    auto& s = session(id);
    {
        std::lock_guard lock(s.mutex);
        auto edits = s.edits;
        std::erase_if(edits, [&](const EditCommand& e) { return e.component == cmd.component; });
        edits.push_back(cmd);
        try {
            compile_edits(components_, edits, edit_options());
        } catch (const Error& e) {
            throw ServiceError(400, e.what());
        }
        s.edits = std::move(edits);
    }
    return edits_json(id);
}

json Service::clear_edits(const std::string& id, std::optional<int> component)
{
    auto& s = session(id);
    {
        std::lock_guard lock(s.mutex);
        if (component) {
            std::erase_if(s.edits, [&](const EditCommand& e) { return e.component == *component; });
        } else {
            s.edits.clear();
        }
    }
    return edits_json(id);
}

Service::Render Service::render(const std::string& id, const json& request) const
{
    CameraParams cam;
    try {
        const auto& c = request.at("camera");
        if (c.is_number_integer()) {
            const auto k = c.get<long long>();
            if (k < 0 || k >= static_cast<long long>(cameras_.size())) {
                throw ServiceError(400, "camera index out of range");
            }
            cam = cameras_[static_cast<std::size_t>(k)];
        } else {
            cam = camera_from_json(c);
        }
    } catch (const json::exception&) {
        throw ServiceError(400, "render needs a camera index or camera object");
    } catch (const Error& e) {
        throw ServiceError(400, e.what());
    }

    std::vector<EditCommand> edits;
    if (request.contains("edits")) {
        if (!request.at("edits").is_array()) {
            throw ServiceError(400, "edits must be a list");
        }
        for (const auto& e : request.at("edits")) {
            edits.push_back(parse_command(e));
        }
    } else {
        auto& s = session(id);
        std::lock_guard lock(s.mutex);
        edits = s.edits;
    }
    int spr = opts_.samples_per_ray;
    if (request.contains("samples_per_ray")) {
        spr = request.at("samples_per_ray").get<int>();
        if (spr < 2 || spr > 4096) {
            throw ServiceError(400, "samples_per_ray out of range");
        }
    }

    EditSet es;
    try {
        es = compile_edits(components_, edits, edit_options());
    } catch (const Error& e) {
        throw ServiceError(400, e.what());
    }
    Render out;
    out.view = render_volume(proxy_, cam, spr, es.empty() ? nullptr : &es, opts_.threads);
    out.png = encode_png(to_rgb8_image(out.view.rgb));
    return out;
}

std::pair<std::string, int> parse_bind_address(const std::string& addr)
{
    std::string host = "127.0.0.1";
    std::string port_text = addr;
    if (const auto colon = addr.rfind(':'); colon != std::string::npos) {
        host = addr.substr(0, colon);
        port_text = addr.substr(colon + 1);
        if (host.size() >= 2 && host.front() == '[' && host.back() == ']') {
            host = host.substr(1, host.size() - 2);
        }
    }
    int port = -1;
    const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc() || ptr != port_text.data() + port_text.size() || port < 0 || port > 65535 || host.empty()) {
        throw Error("invalid bind address '" + addr + "'");
    }
    return {host, port};
}

struct HttpServer::Impl {
    Service& service;
    httplib::Server server;
    std::thread thread;

    explicit Impl(Service& s) : service(s) { routes(); }

    static std::string session_of(const httplib::Request& req)
    {
        if (req.has_header("X-Session")) {
            return req.get_header_value("X-Session");
        }
        if (req.has_param("session")) {
            return req.get_param_value("session");
        }
        return "default";
    }

    static json body_json(const httplib::Request& req)
    {
        try {
            return req.body.empty() ? json::object() : json::parse(req.body);
        } catch (const json::exception&) {
            throw ServiceError(400, "request body is not valid JSON");
        }
    }

    static void send_json(httplib::Response& res, const json& j, int status = 200)
    {
        res.status = status;
        res.set_content(j.dump(), "application/json");
    }

    template <class Fn>
    auto guarded(Fn fn)
    {
        return [fn](const httplib::Request& req, httplib::Response& res) {
            try {
                fn(req, res);
            } catch (const ServiceError& e) {
                send_json(res, {{"error", e.what()}}, e.status);
            } catch (const std::exception& e) {
                send_json(res, {{"error", e.what()}}, 500);
            }
        };
    }

    void routes()
    {
        auto& s = service;
        server.Get("/api/scene", guarded([&s](const auto&, auto& res) { send_json(res, s.scene_json()); }));
        server.Get("/api/blueprint", guarded([&s](const httplib::Request& req, httplib::Response& res) {
                       if (req.has_param("format") && req.get_param_value("format") == "png") {
                           const auto png = s.blueprint_png();
                           res.set_content(std::string(png.begin(), png.end()), "image/png");
                           return;
                       }
                       send_json(res, s.blueprint_json());
                   }));
        server.Get("/api/components", guarded([&s](const auto&, auto& res) { send_json(res, s.components_json()); }));
        server.Get("/api/cameras", guarded([&s](const auto&, auto& res) { send_json(res, s.cameras_json()); }));
        server.Post("/api/select", guarded([&s](const httplib::Request& req, httplib::Response& res) {
                        send_json(res, s.select(body_json(req)));
                    }));
        server.Get("/api/edit", guarded([&s](const httplib::Request& req, httplib::Response& res) {
                       send_json(res, s.edits_json(session_of(req)));
                   }));
        server.Post("/api/edit", guarded([&s](const httplib::Request& req, httplib::Response& res) {
                        send_json(res, s.add_edit(session_of(req), body_json(req)));
                    }));
        server.Delete("/api/edit", guarded([&s](const httplib::Request& req, httplib::Response& res) {
                          std::optional<int> component;
                          if (req.has_param("component")) {
                              try {
                                  component = std::stoi(req.get_param_value("component"));
                              } catch (const std::exception&) {
                                  throw ServiceError(400, "component must be an integer");
                              }
                          }
                          send_json(res, s.clear_edits(session_of(req), component));
                      }));
        server.Post("/api/render", guarded([&s](const httplib::Request& req, httplib::Response& res) {
                        const auto r = s.render(session_of(req), body_json(req));
                        if (req.has_param("format") && req.get_param_value("format") == "json") {
                            Image<std::uint8_t> touched = r.view.touched;
                            for (auto& v : touched.pixels) {
                                v = v ? 255 : 0;
                            }
                            Image<Rgb8> touched_rgb(touched.width, touched.height);
                            for (std::size_t k = 0; k < touched.pixels.size(); ++k) {
                                touched_rgb.pixels[k] = {touched.pixels[k], touched.pixels[k], touched.pixels[k]};
                            }
                            std::size_t count = 0;
                            for (auto v : r.view.touched.pixels) {
                                count += v;
                            }
                            send_json(res, {{"width", r.view.rgb.width},
                                            {"height", r.view.rgb.height},
                                            {"png", base64_encode(r.png)},
                                            {"edit_pixels_png", base64_encode(encode_png(touched_rgb))},
                                            {"edit_pixel_count", count}});
                            return;
                        }
                        res.set_content(std::string(r.png.begin(), r.png.end()), "image/png");
                    }));
        server.set_pre_routing_handler([](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Origin", "*");
            res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Session");
            res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
            return httplib::Server::HandlerResponse::Unhandled;
        });
        server.Options(R"(/api/.*)", [](const auto&, auto& res) { res.status = 204; });
    }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port)
{
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound <= 0) {
        throw Error("cannot bind " + host + ":" + std::to_string(port));
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void HttpServer::run(const std::string& host, int port)
{
    if (!impl_->server.bind_to_port(host, port)) {
        throw Error("cannot bind " + host + ":" + std::to_string(port));
    }
    impl_->server.listen_after_bind();
}

void HttpServer::stop()
{
    if (!impl_) {
        return;
    }
    impl_->server.stop();
    if (impl_->thread.joinable()) {
        impl_->thread.join();
    }
}

} // namespace blueprint
