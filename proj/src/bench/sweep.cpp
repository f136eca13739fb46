#include "treemem/bench/sweep.hpp"

#include "treemem/bench/svg.hpp"
#include "treemem/core/errors.hpp"

#include <cstdio>
#include <filesystem>

namespace treemem::bench {

SweepAxis sweep_axis_from_string(const std::string& name) {
    if (name == "P") return SweepAxis::pathways;
    if (name == "delta_conf") return SweepAxis::delta_conf;
    if (name == "delta_iou") return SweepAxis::delta_iou;
    if (name == "modulation") return SweepAxis::modulation;
    throw ConfigError("unknown sweep axis '" + name + "' (P, delta_conf, delta_iou, modulation)");
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::pathways: return "P";
        case SweepAxis::delta_conf: return "delta_conf";
        case SweepAxis::delta_iou: return "delta_iou";
        case SweepAxis::modulation: return "modulation";
    }
    return "P";
}

namespace {

double parse_number(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw ConfigError("sweep value '" + s + "' is not a number");
    return v;
}

}  // namespace

RunConfig apply_axis(const RunConfig& base, SweepAxis axis, const std::string& value) {
    RunConfig c = base;
    auto& h = c.hyperparams;
    switch (axis) {
        case SweepAxis::pathways: {
            const double v = parse_number(value);
            if (v != static_cast<int>(v)) throw ConfigError("P must be an integer, got '" + value + "'");
            h.pathways = static_cast<int>(v);
            break;
        }
        case SweepAxis::delta_conf: h.delta_conf = parse_number(value); break;
        case SweepAxis::delta_iou: h.delta_iou = parse_number(value); break;
        case SweepAxis::modulation: {
            const auto colon = value.find(':');
            if (colon == std::string::npos) throw ConfigError("modulation value must be low:high, got '" + value + "'");
            h.w_low = parse_number(value.substr(0, colon));
            h.w_high = parse_number(value.substr(colon + 1));
            break;
        }
    }
    if (auto err = treemem::validate(h)) throw ConfigError("sweep value '" + value + "': " + *err);
    return c;
}

std::vector<SweepRow> sweep(const RunConfig& base, SweepAxis axis, const std::vector<std::string>& values) {
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    std::vector<RunConfig> configs;
    for (const auto& v : values) configs.push_back(apply_axis(base, axis, v));
    const auto specs = resolve_scenarios(base);

    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto c = configs[i];
        c.output_dir.clear();
        const auto result =
            run_scenarios(c, specs, [&](const simworld::ScenarioSpec& s) { return make_backend(c, s); });
        rows.push_back({values[i], result.summary.at("aggregate")});
    }

    if (!base.output_dir.empty()) {
        const std::filesystem::path dir = base.output_dir;
        std::filesystem::create_directories(dir);
        write_file_atomic(dir / "sweep.csv", sweep_csv(axis, rows));
        nlohmann::json j{{"axis", to_string(axis)}, {"git_describe", git_describe()}, {"config", to_json(base)}};
        for (const auto& r : rows) j["rows"].push_back({{"value", r.value}, {"aggregate", r.aggregate}});
        write_file_atomic(dir / "sweep.json", j.dump(2) + "\n");
        if (base.svg) {
            Series s{"mean J&F", {}, {}};
            for (std::size_t i = 0; i < rows.size(); ++i) {
                s.x.push_back(static_cast<double>(i));
                s.y.push_back(rows[i].aggregate.at("mean_jf").get<double>());
            }
            write_file_atomic(dir / "sweep.svg", line_chart({s}, "sweep over " + to_string(axis)));
        }
    }
    return rows;
}

std::string sweep_csv(SweepAxis axis, const std::vector<SweepRow>& rows) {
    std::string out = "axis,value,mean_j,mean_f,mean_jf,post_occlusion_jf,mean_pairwise_iou\n";
    auto cell = [](const nlohmann::json& v) -> std::string {
        if (!v.is_number()) return "";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", v.get<double>());
        return buf;
    };
    for (const auto& r : rows) {
        const auto& a = r.aggregate;
        out += to_string(axis) + "," + r.value + "," + cell(a.at("mean_j")) + "," + cell(a.at("mean_f")) + "," +
               cell(a.at("mean_jf")) + "," + cell(a.at("post_occlusion_jf")) + "," +
               cell(a.at("mean_pairwise_iou")) + "\n";
    }
    return out;
}

}  // namespace treemem::bench
