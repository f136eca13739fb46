#include "treemem/simworld/scenario.hpp"

#include "treemem/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace treemem::simworld {

using nlohmann::json;

bool ObjectSpec::hidden_at(int t) const {
    return std::any_of(occlusion_windows.begin(), occlusion_windows.end(),
                       [t](const auto& w) { return t >= w.first && t <= w.second; });
}

const ObjectSpec& ScenarioSpec::object(int id) const {
    for (const auto& o : objects) {
        if (o.id == id) return o;
    }
    throw ConfigError("scenario " + name + " has no object " + std::to_string(id));
}

std::vector<int> ScenarioSpec::target_ids() const {
    std::vector<int> out;
    for (const auto& o : objects) {
        if (o.is_target) out.push_back(o.id);
    }
    return out;
}

void validate(const ScenarioSpec& s) {
    auto fail = [&](const std::string& what) { throw ConfigError("scenario " + s.name + ": " + what); };
    if (s.width < 1 || s.height < 1) fail("canvas must be at least 1x1");
    if (s.num_frames < 2) fail("num_frames must be at least 2");
    if (s.objects.empty()) fail("no objects");
    if (s.target_ids().empty()) fail("no object is marked as target");
    std::set<int> ids;
    for (const auto& o : s.objects) {
        const auto tag = "object " + std::to_string(o.id) + ": ";
        if (!ids.insert(o.id).second) fail(tag + "duplicate id");
        if (!(o.width >= 0.0) || !(o.height >= 0.0)) fail(tag + "negative size");
        if (o.trajectory.empty()) fail(tag + "empty trajectory");
        for (std::size_t i = 0; i < o.trajectory.size(); ++i) {
            const auto& w = o.trajectory[i];
            if (i > 0 && w.frame <= o.trajectory[i - 1].frame) fail(tag + "waypoint frames must increase");
            if (w.x < 0.0 || w.y < 0.0 || w.x >= s.width || w.y >= s.height) fail(tag + "waypoint outside the canvas");
        }
        for (const auto& [a, b] : o.occlusion_windows) {
            if (a < 0 || b >= s.num_frames || a > b) fail(tag + "occlusion window outside [0, num_frames)");
        }
        if (!(o.distractor_similarity >= 0.0 && o.distractor_similarity <= 1.0)) {
            fail(tag + "distractor_similarity outside [0,1]");
        }
        if (o.is_target && o.hidden_at(0)) fail(tag + "target hidden at the prompt frame");
    }
    const auto& n = s.noise;
    for (double v : {n.iou_calibration_noise, n.occ_margin, n.uncertain_band, n.mask_jitter, n.path_noise,
                     n.occluded_empty_iou, n.consistency_power}) {
        if (!(v >= 0.0)) fail("noise parameters must be non-negative");
    }
    if (n.mask_jitter > 1.0) fail("mask_jitter is a probability");
    if (n.occluded_empty_iou > 1.0) fail("occluded_empty_iou must be in [0,1]");
}

namespace {

std::string shape_name(ShapeKind k) { return k == ShapeKind::rect ? "rect" : "disc"; }

ShapeKind shape_from(const std::string& s) {
    if (s == "rect") return ShapeKind::rect;
    if (s == "disc") return ShapeKind::disc;
    throw ParseError("unknown shape '" + s + "'");
}

json object_json(const ObjectSpec& o) {
    json traj = json::array();
    for (const auto& w : o.trajectory) traj.push_back({{"frame", w.frame}, {"x", w.x}, {"y", w.y}});
    json windows = json::array();
    for (const auto& [a, b] : o.occlusion_windows) windows.push_back({a, b});
    json size = o.shape == ShapeKind::rect ? json{o.width, o.height} : json(o.width);
    return {
        {"id", o.id},
        {"shape", shape_name(o.shape)},
        {"size", size},
        {"trajectory", traj},
        {"occlusion_windows", windows},
        {"is_target", o.is_target},
        {"distractor_similarity", o.distractor_similarity},
    };
}

ObjectSpec object_from(const json& j) {
    ObjectSpec o;
    o.id = j.at("id").get<int>();
    o.shape = shape_from(j.at("shape").get<std::string>());
    const auto& size = j.at("size");
    if (o.shape == ShapeKind::rect) {
        if (!size.is_array() || size.size() != 2) throw ParseError("rect size must be [width, height]");
        o.width = size[0].get<double>();
        o.height = size[1].get<double>();
    } else {
        o.width = size.get<double>();
    }
    for (const auto& w : j.at("trajectory")) {
        o.trajectory.push_back({w.at("frame").get<int>(), w.at("x").get<double>(), w.at("y").get<double>()});
    }
    for (const auto& w : j.value("occlusion_windows", json::array())) {
        if (!w.is_array() || w.size() != 2) throw ParseError("occlusion window must be [start, end]");
        o.occlusion_windows.emplace_back(w[0].get<int>(), w[1].get<int>());
    }
    o.is_target = j.value("is_target", false);
    o.distractor_similarity = j.value("distractor_similarity", 0.0);
    return o;
}

}  // namespace

json to_json(const ScenarioSpec& s) {
    json objects = json::array();
    for (const auto& o : s.objects) objects.push_back(object_json(o));
    const auto& n = s.noise;
    return {
        {"name", s.name},
        {"seed", s.seed},
        {"width", s.width},
        {"height", s.height},
        {"num_frames", s.num_frames},
        {"objects", objects},
        {"noise",
         {
             {"iou_calibration_noise", n.iou_calibration_noise},
             {"occ_margin", n.occ_margin},
             {"uncertain_band", n.uncertain_band},
             {"mask_jitter", n.mask_jitter},
             {"path_noise", n.path_noise},
             {"occluded_empty_iou", n.occluded_empty_iou},
             {"consistency_power", n.consistency_power},
         }},
    };
}

ScenarioSpec scenario_from_json(const json& j) {
    ScenarioSpec s;
    try {
        s.name = j.value("name", std::string("scenario"));
        s.seed = j.at("seed").get<std::uint64_t>();
        s.width = j.at("width").get<int>();
        s.height = j.at("height").get<int>();
        s.num_frames = j.at("num_frames").get<int>();
        for (const auto& o : j.at("objects")) s.objects.push_back(object_from(o));
        if (j.contains("noise")) {
            const auto& n = j.at("noise");
            static const std::set<std::string> known{"iou_calibration_noise", "occ_margin", "uncertain_band",
                                                     "mask_jitter", "path_noise", "occluded_empty_iou",
                                                     "consistency_power"};
            for (const auto& [key, _] : n.items()) {
                if (!known.count(key)) throw ParseError("unknown noise parameter '" + key + "'");
            }
            auto& d = s.noise;
            d.iou_calibration_noise = n.value("iou_calibration_noise", d.iou_calibration_noise);
            d.occ_margin = n.value("occ_margin", d.occ_margin);
            d.uncertain_band = n.value("uncertain_band", d.uncertain_band);
            d.mask_jitter = n.value("mask_jitter", d.mask_jitter);
            d.path_noise = n.value("path_noise", d.path_noise);
            d.occluded_empty_iou = n.value("occluded_empty_iou", d.occluded_empty_iou);
            d.consistency_power = n.value("consistency_power", d.consistency_power);
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed scenario: ") + e.what());
    }
    validate(s);
    return s;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("malformed scenario " + path.string() + ": " + e.what());
    }
    return scenario_from_json(j);
}

void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << to_json(spec).dump(2) << '\n';
}

std::vector<ScenarioSpec> load_suite(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError(dir.string() + " is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<ScenarioSpec> out;
    for (const auto& f : files) out.push_back(load_scenario(f));
    return out;
}

}  // namespace treemem::simworld
