#include "pocketforge/advisor.hpp"
#include "pocketforge/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace pocketforge;

namespace {

struct Options {
    std::string pocket;
    std::string tools;
    std::string machine;
    std::string strategy;
    std::string toolpath;
    std::string rules;
    std::string out = ".";
    std::string feed;
    bool gcode = false;
    bool discretize = false;
};

void require(const std::string& value, const char* flag)
{
    if (value.empty()) throw ValidationError("missing_option", std::string(flag) + " is required");
}

std::string pocket_stem(const Options& o)
{
    if (!o.pocket.empty()) return fs::path(o.pocket).stem().string();
    std::string stem = fs::path(o.toolpath).stem().string();
    const std::string suffix = ".pathgen";
    if (stem.size() > suffix.size() && stem.ends_with(suffix)) stem.resize(stem.size() - suffix.size());
    return stem;
}

class Writer {
public:
    Writer(const Options& o, std::string command) : dir_(o.out), stem_(pocket_stem(o)), command_(std::move(command))
    {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) throw IoError("bad_out_dir", "cannot create output directory " + dir_.string());
    }

    void write(const std::string& ext, const std::string& text)
    {
        const fs::path p = dir_ / (stem_ + "." + command_ + "." + ext);
        write_text_file(p, text);
        std::cout << p.string() << "\n";
    }

    void write_json(const json& j) { write("json", j.dump(2) + "\n"); }

private:
    fs::path dir_;
    std::string stem_;
    std::string command_;
};

AdvisorRules rules_of(const Options& o) { return o.rules.empty() ? AdvisorRules{} : load_rules(o.rules); }

std::optional<double> feed_of(const Options& o)
{
    if (o.feed.empty()) return std::nullopt;
    return parse_feed(o.feed);
}

void cmd_classify(const Options& o)
{
    require(o.pocket, "--pocket");
    const Pocket pocket = load_pocket(o.pocket);
    json j = with_schema({{"pocket", pocket.name}});
    json cls = classify_pocket(pocket);
    for (auto& [k, v] : cls.items()) j[k] = v;
    const Promotion promo = promote_negative_islands(pocket);
    j["promoted"] = json::array();
    for (const Pocket& p : promo.promoted) j["promoted"].push_back({{"name", p.name}, {"class", classify_pocket(p)}});
    Writer(o, "classify").write_json(j);
}

Decomposition decompose(const Pocket& pocket, const std::vector<Tool>& tools, const AdvisorRules& rules,
                        Region* machinable_out = nullptr)
{
    const Region machinable = machinable_region(pocket, tools, rules);
    const DiameterBounds bounds = diameter_bounds(machinable, rules.chord_tol);
    if (machinable_out) *machinable_out = machinable;
    return dichotomy_decompose(machinable, pocket.depth, bounds, tools);
}

void cmd_decompose(const Options& o)
{
    require(o.pocket, "--pocket");
    require(o.tools, "--tools");
    const Pocket pocket = load_pocket(o.pocket);
    const auto tools = load_tools(o.tools);
    const Decomposition d = decompose(pocket, tools, rules_of(o));
    Writer w(o, "decompose");
    json j = d;
    w.write_json(with_schema({{"pocket", pocket.name}, {"decomposition", j}}));
    std::vector<Region> zones;
    for (const ChosenTool& c : d.chosen) zones.push_back(c.zone);
    w.write("svg", zones_svg(pocket_area(pocket), zones));
}

struct PathSet {
    Region underlay;
    std::vector<StrategyParams> strategies;
    std::vector<Toolpath> paths;
};

// Strategy keys that are absent fall back to the advisor's choice.
StrategyParams resolve_strategy(const json& overrides, const PocketClass& cls, const Tool& tool, const Region& zone,
                                const AdvisorRules& rules)
{
    StrategyParams p = parse_as<StrategyParams>(overrides, "strategy");
    if (!overrides.contains("stepover")) p.stepover = rules.stepover_ratio * tool.diameter;
    if (!overrides.contains("entry")) p.entry = cls.closure == Closure::closed ? rules.entry_closed : rules.entry_open;
    if (!overrides.contains("zigzag_direction")) p.zigzag_direction = longest_extent_direction(zone);
    if (!overrides.contains("chord_tol")) p.chord_tol = rules.chord_tol;
    return p;
}

PathSet build_paths(const Options& o)
{
    require(o.pocket, "--pocket");
    require(o.tools, "--tools");
    const Pocket pocket = load_pocket(o.pocket);
    const auto tools = load_tools(o.tools);
    const AdvisorRules rules = rules_of(o);
    const json overrides = o.strategy.empty() ? json::object() : read_json_file(o.strategy);
    const auto feed = feed_of(o);

    Region machinable;
    const Decomposition d = decompose(pocket, tools, rules, &machinable);
    const PocketClass cls = classify_pocket(pocket);
    const auto hint = open_entry_hint(pocket);
    PathSet set;
    set.underlay = machinable;
    for (const ChosenTool& c : d.chosen) {
        const Region zone = opening(machinable, c.tool.diameter, rules.chord_tol);
        const StrategyParams p = resolve_strategy(overrides, cls, c.tool, zone, rules);
        Toolpath path = generate_toolpath(zone, cls, c.tool, p, pocket.depth, feed.value_or(c.tool.vc), hint);
        if (o.discretize) path = discretize_arcs(path, p.chord_tol);
        set.strategies.push_back(p);
        set.paths.push_back(std::move(path));
    }
    return set;
}

void cmd_pathgen(const Options& o)
{
    const PathSet set = build_paths(o);
    Writer w(o, "pathgen");
    w.write_json(with_schema({{"pocket", fs::path(o.pocket).stem().string()},
                              {"strategies", set.strategies},
                              {"toolpaths", set.paths}}));
    w.write("svg", toolpath_svg(set.underlay, set.paths));
    if (o.gcode) w.write("nc", to_gcode(set.paths));
}

std::vector<Toolpath> load_toolpaths(const std::string& file)
{
    const json j = read_json_file(file);
    if (j.contains("toolpaths")) return parse_as<std::vector<Toolpath>>(j["toolpaths"], "toolpath");
    return {parse_as<Toolpath>(j, "toolpath")};
}

void cmd_simulate(const Options& o)
{
    require(o.machine, "--machine");
    if (o.toolpath.empty() && o.pocket.empty()) throw ValidationError("missing_option", "--toolpath or --pocket is required");
    const MachineParams machine = load_machine(o.machine);
    std::vector<Toolpath> paths = o.toolpath.empty() ? build_paths(o).paths : load_toolpaths(o.toolpath);
    const auto feed = feed_of(o);

    std::vector<SimResult> results;
    double time = 0.0, cam_time = 0.0;
    for (const Toolpath& p : paths) {
        SimResult r = simulate(p, machine, feed.value_or(p.feed));
        r.blocks.clear();
        time += r.time;
        cam_time += r.cam_time;
        results.push_back(std::move(r));
    }
    Writer w(o, "simulate");
    w.write_json(with_schema({{"machine", machine}, {"time", time}, {"cam_time", cam_time}, {"results", results}}));
    w.write("profile.csv", profile_csv(results));
    w.write("histogram.csv", histogram_csv(results));
}

void cmd_advise(const Options& o)
{
    require(o.pocket, "--pocket");
    require(o.tools, "--tools");
    require(o.machine, "--machine");
    const Pocket pocket = load_pocket(o.pocket);
    const auto tools = load_tools(o.tools);
    const MachineParams machine = load_machine(o.machine);
    const AdvisorRules rules = rules_of(o);
    const PocketAdvice advice = advise_pocket(pocket, tools, machine, feed_of(o).value_or(0.0), rules);
    Writer w(o, "advise");
    json j = advice;
    w.write_json(with_schema({{"machine", machine}, {"rules", rules}, {"advice", j}}));
    w.write("md", report_markdown(advice));
}

int report_error(int code, const std::string& id, const std::string& message)
{
    std::cerr << json{{"schema", kSchema}, {"error", {{"code", id}, {"message", message}, {"exit", code}}}}.dump()
              << "\n";
    return code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Pocket milling strategy planner"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--pocket", o.pocket, "Pocket JSON");
        sub->add_option("--tools", o.tools, "Tool catalog JSON");
        sub->add_option("--machine", o.machine, "Machine JSON");
        sub->add_option("--strategy", o.strategy, "Strategy JSON");
        sub->add_option("--rules", o.rules, "Advisor rule JSON");
        sub->add_option("--out", o.out, "Output directory")->capture_default_str();
        sub->add_option("--feed", o.feed, "Programmed feed with unit, e.g. 10m/min");
    };

    auto* classify = app.add_subcommand("classify", "Classify a pocket");
    auto* decomp = app.add_subcommand("decompose", "Tool decomposition and zones");
    auto* pathgen = app.add_subcommand("pathgen", "Generate tool paths");
    auto* sim = app.add_subcommand("simulate", "Simulate a tool path on a machine");
    auto* advise = app.add_subcommand("advise", "Rank strategies per tool");
    for (auto* sub : {classify, decomp, pathgen, sim, advise}) add_common(sub);
    for (auto* sub : {pathgen, sim}) sub->add_flag("--discretize", o.discretize, "Replace arcs by chords");
    pathgen->add_flag("--gcode", o.gcode, "Also write a G-code subset");
    sim->add_option("--toolpath", o.toolpath, "Toolpath JSON (single path or pathgen output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error(1, "bad_arguments", e.what());
    }

    try {
        if (*classify) cmd_classify(o);
        else if (*decomp) cmd_decompose(o);
        else if (*pathgen) cmd_pathgen(o);
        else if (*sim) cmd_simulate(o);
        else if (*advise) cmd_advise(o);
    } catch (const Error& e) {
        return report_error(static_cast<int>(e.kind()), e.code(), e.what());
    } catch (const json::exception& e) {
        return report_error(1, "bad_json", e.what());
    } catch (const std::exception& e) {
        return report_error(1, "internal", e.what());
    }
    return 0;
}
