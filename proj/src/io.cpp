#include "pocketforge/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <regex>
#include <sstream>

namespace pocketforge {

namespace {

std::string num(const char* pattern, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

template <typename T>
void get_opt(const json& j, const char* key, T& out)
{
    if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->template get<T>();
}

} // namespace

void to_json(json& j, const Point& p) { j = json::array({p.x, p.y}); }

void from_json(const json& j, Point& p)
{
    if (!j.is_array() || j.size() != 2) throw json::type_error::create(302, "point must be [x, y]", &j);
    p = {j[0].get<double>(), j[1].get<double>()};
}

void to_json(json& j, const PolygonWithHoles& p) { j = {{"outer", p.outer}, {"holes", p.holes}}; }

void from_json(const json& j, PolygonWithHoles& p)
{
    p.outer = j.at("outer").get<Loop>();
    p.holes.clear();
    get_opt(j, "holes", p.holes);
}

void to_json(json& j, const Region& r) { j = {{"parts", r.parts}}; }
void from_json(const json& j, Region& r) { r.parts = j.at("parts").get<std::vector<PolygonWithHoles>>(); }

void to_json(json& j, const IslandInfo& i)
{
    j = {{"negative", i.negative}, {"extends_below_floor", i.extends_below_floor}};
    if (i.depth) j["depth"] = *i.depth;
}

void from_json(const json& j, IslandInfo& i)
{
    i = {};
    get_opt(j, "negative", i.negative);
    get_opt(j, "extends_below_floor", i.extends_below_floor);
    if (j.contains("depth") && !j["depth"].is_null()) i.depth = j["depth"].get<double>();
}

void to_json(json& j, const SpecificEntity& e)
{
    j = {{"kind", e.kind}, {"footprint", e.footprint}};
    if (e.guard_margin) j["guard_margin"] = *e.guard_margin;
}

void from_json(const json& j, SpecificEntity& e)
{
    e = {};
    e.kind = j.at("kind").get<EntityKind>();
    e.footprint = j.at("footprint").get<Region>();
    if (j.contains("guard_margin") && !j["guard_margin"].is_null()) e.guard_margin = j["guard_margin"].get<double>();
}

void to_json(json& j, const Pocket& p)
{
    j = {{"name", p.name},     {"boundary", p.boundary}, {"islands", p.islands},
         {"depth", p.depth},   {"open_edges", p.open_edges}, {"floor", p.floor},
         {"wall", p.wall},     {"entities", p.entities}};
}

void from_json(const json& j, Pocket& p)
{
    p = {};
    get_opt(j, "name", p.name);
    p.boundary = j.at("boundary").get<PolygonWithHoles>();
    get_opt(j, "islands", p.islands);
    // Island attributes are optional; missing entries are plain islands.
    if (p.islands.size() < p.boundary.holes.size()) p.islands.resize(p.boundary.holes.size());
    p.depth = j.at("depth").get<double>();
    get_opt(j, "open_edges", p.open_edges);
    get_opt(j, "floor", p.floor);
    get_opt(j, "wall", p.wall);
    get_opt(j, "entities", p.entities);
}

void to_json(json& j, const PocketClass& c)
{
    j = {{"closure", c.closure}, {"floor", c.floor}, {"wall", c.wall},
         {"has_islands", c.has_islands}, {"has_specific", c.has_specific}};
}

void from_json(const json& j, PocketClass& c)
{
    c.closure = j.at("closure").get<Closure>();
    c.floor = j.at("floor").get<FloorKind>();
    c.wall = j.at("wall").get<WallKind>();
    c.has_islands = j.at("has_islands").get<bool>();
    c.has_specific = j.at("has_specific").get<bool>();
}

void to_json(json& j, const Tool& t)
{
    j = {{"diameter", t.diameter}, {"flutes", t.flutes}, {"vc_mm_s", t.vc}, {"plunge", t.plunge}};
}

void from_json(const json& j, Tool& t)
{
    t = {};
    t.diameter = j.at("diameter").get<double>();
    get_opt(j, "flutes", t.flutes);
    t.vc = j.at("vc_mm_s").get<double>();
    get_opt(j, "plunge", t.plunge);
}

void to_json(json& j, const MachineParams& m)
{
    j = {{"a_max", m.a_max},         {"jerk", m.jerk},           {"mode", m.mode},
         {"lookahead", m.lookahead}, {"anticipation", m.anticipation}, {"corner_dv", m.corner_dv},
         {"block_time", m.block_time}};
}

void from_json(const json& j, MachineParams& m)
{
    m = {};
    get_opt(j, "a_max", m.a_max);
    get_opt(j, "jerk", m.jerk);
    get_opt(j, "mode", m.mode);
    get_opt(j, "lookahead", m.lookahead);
    get_opt(j, "anticipation", m.anticipation);
    get_opt(j, "corner_dv", m.corner_dv);
    get_opt(j, "block_time", m.block_time);
}

void to_json(json& j, const StrategyParams& s)
{
    j = {{"mode", s.mode},   {"stepover", s.stepover}, {"zigzag_direction", s.zigzag_direction},
         {"links", s.links}, {"corner_radius", s.corner_radius}, {"entry", s.entry},
         {"chord_tol", s.chord_tol}};
}

void from_json(const json& j, StrategyParams& s)
{
    s = {};
    get_opt(j, "mode", s.mode);
    get_opt(j, "stepover", s.stepover);
    get_opt(j, "zigzag_direction", s.zigzag_direction);
    get_opt(j, "links", s.links);
    get_opt(j, "corner_radius", s.corner_radius);
    get_opt(j, "entry", s.entry);
    get_opt(j, "chord_tol", s.chord_tol);
}

void to_json(json& j, const Move& m)
{
    j = {{"kind", m.kind}, {"start", m.start}, {"end", m.end}, {"intent", m.intent}};
    if (m.is_arc()) j["center"] = m.center;
}

void from_json(const json& j, Move& m)
{
    m = {};
    m.kind = j.at("kind").get<MoveKind>();
    m.start = j.at("start").get<Point>();
    m.end = j.at("end").get<Point>();
    get_opt(j, "center", m.center);
    get_opt(j, "intent", m.intent);
}

void to_json(json& j, const Toolpath& t)
{
    j = {{"tool", t.tool},
         {"feed", t.feed},
         {"axial_plunge", t.axial_plunge},
         {"flags", t.flags},
         {"moves", t.moves}};
}

void from_json(const json& j, Toolpath& t)
{
    t = {};
    t.tool = j.at("tool").get<Tool>();
    t.feed = j.at("feed").get<double>();
    get_opt(j, "axial_plunge", t.axial_plunge);
    get_opt(j, "flags", t.flags);
    t.moves = j.at("moves").get<std::vector<Move>>();
}

void to_json(json& j, const ProfileSample& s) { j = json::array({s.s, s.v}); }

void from_json(const json& j, ProfileSample& s)
{
    if (!j.is_array() || j.size() != 2) throw json::type_error::create(302, "profile sample must be [s, v]", &j);
    s = {j[0].get<double>(), j[1].get<double>()};
}

void to_json(json& j, const SimResult& r)
{
    j = {{"time", r.time},
         {"cam_time", r.cam_time},
         {"plunge_time", r.plunge_time},
         {"min_speed", r.min_speed},
         {"length", r.length},
         {"histogram_edges", r.histogram_edges},
         {"histogram", r.histogram},
         {"profile", r.profile}};
}

void from_json(const json& j, SimResult& r)
{
    r = {};
    r.time = j.at("time").get<double>();
    r.cam_time = j.at("cam_time").get<double>();
    get_opt(j, "plunge_time", r.plunge_time);
    get_opt(j, "min_speed", r.min_speed);
    get_opt(j, "length", r.length);
    get_opt(j, "histogram_edges", r.histogram_edges);
    get_opt(j, "histogram", r.histogram);
    get_opt(j, "profile", r.profile);
}

void to_json(json& j, const DiameterBounds& b) { j = {{"d0", b.d0}, {"dx", b.dx}}; }

void from_json(const json& j, DiameterBounds& b)
{
    b.d0 = j.at("d0").get<double>();
    b.dx = j.at("dx").get<double>();
}

void to_json(json& j, const DecompositionStep& s)
{
    j = {{"diameter", s.diameter}, {"tool", s.tool}, {"zone", s.zone}, {"length", s.length},
         {"time", s.time},         {"volume", s.volume}, {"mrr", s.mrr}};
}

void from_json(const json& j, DecompositionStep& s)
{
    s.diameter = j.at("diameter").get<double>();
    s.tool = j.at("tool").get<Tool>();
    s.zone = j.at("zone").get<Region>();
    s.length = j.at("length").get<double>();
    s.time = j.at("time").get<double>();
    s.volume = j.at("volume").get<double>();
    s.mrr = j.at("mrr").get<double>();
}

void to_json(json& j, const IntervalDecision& d)
{
    j = {{"iteration", d.iteration}, {"lo", d.lo},           {"mid", d.mid},     {"hi", d.hi},
         {"mrr_lo", d.mrr_lo},       {"mrr_mid", d.mrr_mid}, {"ratio", d.ratio}, {"kept_upper", d.kept_upper}};
}

void from_json(const json& j, IntervalDecision& d)
{
    d.iteration = j.at("iteration").get<int>();
    d.lo = j.at("lo").get<double>();
    d.mid = j.at("mid").get<double>();
    d.hi = j.at("hi").get<double>();
    d.mrr_lo = j.at("mrr_lo").get<double>();
    d.mrr_mid = j.at("mrr_mid").get<double>();
    d.ratio = j.at("ratio").get<double>();
    d.kept_upper = j.at("kept_upper").get<bool>();
}

void to_json(json& j, const ChosenTool& c) { j = {{"tool", c.tool}, {"zone", c.zone}}; }

void from_json(const json& j, ChosenTool& c)
{
    c.tool = j.at("tool").get<Tool>();
    c.zone = j.at("zone").get<Region>();
}

void to_json(json& j, const Decomposition& d)
{
    j = {{"bounds", d.bounds}, {"steps", d.steps}, {"decisions", d.decisions},
         {"chosen", d.chosen}, {"residual", d.residual}};
}

void from_json(const json& j, Decomposition& d)
{
    d.bounds = j.at("bounds").get<DiameterBounds>();
    d.steps = j.at("steps").get<std::vector<DecompositionStep>>();
    d.decisions = j.at("decisions").get<std::vector<IntervalDecision>>();
    d.chosen = j.at("chosen").get<std::vector<ChosenTool>>();
    d.residual = j.at("residual").get<Region>();
}

void to_json(json& j, const ForbiddenCombo& f) { j = {{"mode", f.mode}, {"links", f.links}, {"reason", f.reason}}; }

void from_json(const json& j, ForbiddenCombo& f)
{
    f.mode = j.at("mode").get<PathMode>();
    f.links = j.at("links").get<LinkStyle>();
    f.reason.clear();
    get_opt(j, "reason", f.reason);
}

void to_json(json& j, const AdvisorRules& r)
{
    j = {{"entry_closed", r.entry_closed},
         {"entry_open", r.entry_open},
         {"stepover_ratio", r.stepover_ratio},
         {"r_min", r.r_min},
         {"short_segment", r.short_segment},
         {"discretize_arcs", r.discretize_arcs},
         {"chord_tol", r.chord_tol},
         {"guard_margin", r.guard_margin},
         {"forbidden", r.forbidden}};
}

void from_json(const json& j, AdvisorRules& r)
{
    r = {};
    get_opt(j, "entry_closed", r.entry_closed);
    get_opt(j, "entry_open", r.entry_open);
    get_opt(j, "stepover_ratio", r.stepover_ratio);
    get_opt(j, "r_min", r.r_min);
    get_opt(j, "short_segment", r.short_segment);
    get_opt(j, "discretize_arcs", r.discretize_arcs);
    get_opt(j, "chord_tol", r.chord_tol);
    get_opt(j, "guard_margin", r.guard_margin);
    get_opt(j, "forbidden", r.forbidden);
}

void to_json(json& j, const RankedStrategy& r)
{
    j = {{"order", r.order},
         {"params", r.params},
         {"sim", r.sim},
         {"short_ratio", r.short_ratio},
         {"segments", r.segments},
         {"length", {{"total", r.length.total}, {"cut", r.length.cut}}},
         {"flags", r.flags}};
}

void from_json(const json& j, RankedStrategy& r)
{
    r = {};
    r.order = j.at("order").get<int>();
    r.params = j.at("params").get<StrategyParams>();
    r.sim = j.at("sim").get<SimResult>();
    r.short_ratio = j.at("short_ratio").get<double>();
    r.segments = j.at("segments").get<std::size_t>();
    r.length.total = j.at("length").at("total").get<double>();
    r.length.cut = j.at("length").at("cut").get<double>();
    get_opt(j, "flags", r.flags);
}

void to_json(json& j, const CandidateFailure& f)
{
    j = {{"order", f.order}, {"params", f.params}, {"code", f.code}, {"message", f.message}};
}

void from_json(const json& j, CandidateFailure& f)
{
    f.order = j.at("order").get<int>();
    f.params = j.at("params").get<StrategyParams>();
    f.code = j.at("code").get<std::string>();
    f.message = j.at("message").get<std::string>();
}

void to_json(json& j, const StrategyReport& r)
{
    j = {{"tool", r.tool},     {"feed", r.feed},       {"discretized", r.discretized},
         {"ranked", r.ranked}, {"failures", r.failures}, {"recommended", r.recommended},
         {"rationale", r.rationale}};
}

void from_json(const json& j, StrategyReport& r)
{
    r = {};
    r.tool = j.at("tool").get<Tool>();
    r.feed = j.at("feed").get<double>();
    r.discretized = j.at("discretized").get<bool>();
    r.ranked = j.at("ranked").get<std::vector<RankedStrategy>>();
    get_opt(j, "failures", r.failures);
    r.recommended = j.at("recommended").get<StrategyParams>();
    get_opt(j, "rationale", r.rationale);
}

void to_json(json& j, const PocketAdvice& a)
{
    j = {{"pocket", a.pocket}, {"class", a.cls}, {"decomposition", a.decomposition}, {"reports", a.reports}};
}

void from_json(const json& j, PocketAdvice& a)
{
    a = {};
    get_opt(j, "pocket", a.pocket);
    a.cls = j.at("class").get<PocketClass>();
    a.decomposition = j.at("decomposition").get<Decomposition>();
    a.reports = j.at("reports").get<std::vector<StrategyReport>>();
}

json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("not_found", "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError("parse_error", path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_failed", "cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write_failed", "cannot write " + path.string());
}

Pocket load_pocket(const std::filesystem::path& path)
{
    Pocket p = parse_as<Pocket>(read_json_file(path), "pocket");
    if (p.name.empty()) p.name = path.stem().string();
    validate(p);
    return p;
}

std::vector<Tool> load_tools(const std::filesystem::path& path)
{
    json j = read_json_file(path);
    if (j.is_object() && j.contains("tools")) j = j["tools"];
    auto tools = parse_as<std::vector<Tool>>(j, "tools");
    if (tools.empty()) throw ValidationError("bad_tools", "tool catalog is empty");
    for (const Tool& t : tools)
        if (!(t.diameter > 0.0) || !(t.vc > 0.0) || t.flutes < 1)
            throw ValidationError("bad_tools", "tool needs positive diameter, vc_mm_s and flutes");
    return tools;
}

MachineParams load_machine(const std::filesystem::path& path)
{
    auto m = parse_as<MachineParams>(read_json_file(path), "machine");
    if (!(m.a_max > 0.0) || !(m.jerk > 0.0) || m.lookahead < 1 || m.corner_dv < 0.0 || m.block_time < 0.0)
        throw ValidationError("bad_machine", "machine needs positive a_max, jerk, lookahead");
    return m;
}

AdvisorRules load_rules(const std::filesystem::path& path)
{
    return parse_as<AdvisorRules>(read_json_file(path), "rules");
}

double parse_feed(const std::string& text)
{
    static const std::regex re(R"(\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*(m/min|mm/min|mm/s)\s*)");
    std::smatch m;
    if (!std::regex_match(text, m, re))
        throw ValidationError("bad_feed", "feed needs a unit: m/min, mm/min or mm/s (got '" + text + "')");
    const double v = std::stod(m[1].str());
    if (!(v > 0.0)) throw ValidationError("bad_feed", "feed must be positive");
    const std::string unit = m[2].str();
    if (unit == "m/min") return v * 1000.0 / 60.0;
    if (unit == "mm/min") return v / 60.0;
    return v;
}

json with_schema(json payload)
{
    json out = {{"schema", kSchema}};
    for (auto& [k, v] : payload.items()) out[k] = std::move(v);
    return out;
}

namespace {

struct SvgFrame {
    double x0 = 0, y0 = 0, w = 1, h = 1;
};

SvgFrame frame_for(const Region& r)
{
    if (r.empty()) return {};
    const BoundingBox b = bounding_box(r);
    const double m = 0.05 * std::max(b.width(), b.height()) + 1.0;
    return {b.min_x - m, b.min_y - m, b.width() + 2 * m, b.height() + 2 * m};
}

std::string svg_open(const SvgFrame& f)
{
    std::ostringstream o;
    // y flipped so the drawing is y-up.
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << num("%.4f", f.x0) << ' '
      << num("%.4f", -(f.y0 + f.h)) << ' ' << num("%.4f", f.w) << ' ' << num("%.4f", f.h) << "\">\n"
      << "<g transform=\"scale(1,-1)\">\n";
    return o.str();
}

std::string region_path(const Region& r)
{
    std::ostringstream d;
    auto loop = [&](const Loop& l) {
        for (std::size_t i = 0; i < l.size(); ++i)
            d << (i == 0 ? "M" : "L") << num("%.4f", l[i].x) << ',' << num("%.4f", l[i].y) << ' ';
        if (!l.empty()) d << "Z ";
    };
    for (const auto& p : r.parts) {
        loop(p.outer);
        for (const auto& h : p.holes) loop(h);
    }
    return d.str();
}

constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948", "#b07aa1"};

} // namespace

std::string zones_svg(const Region& pocket, const std::vector<Region>& zones)
{
    std::ostringstream o;
    o << svg_open(frame_for(pocket));
    o << "<path class=\"pocket\" fill=\"#eeeeee\" stroke=\"#333333\" stroke-width=\"0.3\" fill-rule=\"evenodd\" d=\""
      << region_path(pocket) << "\"/>\n";
    for (std::size_t i = 0; i < zones.size(); ++i)
        o << "<path class=\"zone\" data-index=\"" << i << "\" fill=\"" << kPalette[i % std::size(kPalette)]
          << "\" fill-opacity=\"0.5\" stroke=\"none\" fill-rule=\"evenodd\" d=\"" << region_path(zones[i]) << "\"/>\n";
    o << "</g>\n</svg>\n";
    return o.str();
}

std::string toolpath_svg(const Region& zone, const std::vector<Toolpath>& paths)
{
    Region extent = zone;
    for (const auto& p : paths)
        for (const auto& m : p.moves) {
            const double pad = 0.5 * p.tool.diameter + 0.1;
            extent.parts.push_back({{{m.start.x - pad, m.start.y - pad}, {m.start.x + pad, m.start.y - pad},
                                     {m.start.x + pad, m.start.y + pad}, {m.start.x - pad, m.start.y + pad}},
                                    {}});
        }
    std::ostringstream o;
    o << svg_open(frame_for(extent));
    o << "<path class=\"zone\" fill=\"#eeeeee\" stroke=\"#999999\" stroke-width=\"0.3\" fill-rule=\"evenodd\" d=\""
      << region_path(zone) << "\"/>\n";
    const std::pair<MoveIntent, const char*> styles[] = {{MoveIntent::cut, "#1f77b4"},
                                                         {MoveIntent::link, "#d62728"},
                                                         {MoveIntent::entry, "#2ca02c"},
                                                         {MoveIntent::exit, "#9467bd"}};
    for (const auto& [intent, colour] : styles) {
        o << "<g class=\"" << to_string(intent) << "\" fill=\"none\" stroke=\"" << colour
          << "\" stroke-width=\"0.25\">\n";
        for (const auto& path : paths) {
            const Toolpath flat = discretize_arcs(path, 0.05);
            std::vector<Point> run;
            auto flush = [&] {
                if (run.size() >= 2) {
                    o << "<polyline points=\"";
                    for (const Point& p : run) o << num("%.4f", p.x) << ',' << num("%.4f", p.y) << ' ';
                    o << "\"/>\n";
                }
                run.clear();
            };
            for (const auto& m : flat.moves) {
                if (m.intent != intent) {
                    flush();
                    continue;
                }
                if (run.empty() || distance(run.back(), m.start) > 1e-6) {
                    flush();
                    run.push_back(m.start);
                }
                run.push_back(m.end);
            }
            flush();
        }
        o << "</g>\n";
    }
    o << "</g>\n</svg>\n";
    return o.str();
}

std::string to_gcode(const std::vector<Toolpath>& paths)
{
    std::ostringstream o;
    o << "G17 G21 G90\n";
    auto xy = [](Point p) { return "X" + num("%.4f", p.x) + " Y" + num("%.4f", p.y); };
    for (const auto& path : paths) {
        o << "(tool D" << num("%.4f", path.tool.diameter) << ")\n";
        if (path.moves.empty()) continue;
        Point at = path.moves.front().start;
        o << "G0 " << xy(at) << "\n";
        bool feed_set = false;
        for (const auto& m : path.moves) {
            if (distance(at, m.start) > 1e-6) o << "G0 " << xy(m.start) << "\n";
            const std::string f = feed_set ? "" : " F" + num("%.4f", path.feed * 60.0);
            feed_set = true;
            if (m.is_arc()) {
                const Point ij = m.center - m.start;
                o << (m.kind == MoveKind::arc_cw ? "G2 " : "G3 ") << xy(m.end) << " I" << num("%.4f", ij.x) << " J"
                  << num("%.4f", ij.y) << f << "\n";
            } else {
                o << "G1 " << xy(m.end) << f << "\n";
            }
            at = m.end;
        }
    }
    o << "M30\n";
    return o.str();
}

std::string profile_csv(const std::vector<SimResult>& results)
{
    std::ostringstream o;
    o << "s_mm,v_mm_s\n";
    double offset = 0.0;
    for (const auto& r : results) {
        for (const auto& s : r.profile) o << num("%.6f", offset + s.s) << ',' << num("%.6f", s.v) << '\n';
        offset += r.length;
    }
    return o.str();
}

std::string histogram_csv(const std::vector<SimResult>& results)
{
    std::ostringstream o;
    o << "lo_mm,hi_mm,count\n";
    if (results.empty()) return o.str();
    const auto& edges = results.front().histogram_edges;
    std::vector<std::size_t> total(edges.size() + 1, 0);
    for (const auto& r : results) {
        if (r.histogram_edges != edges) throw ValidationError("bad_histogram", "histograms use different bin edges");
        for (std::size_t i = 0; i < r.histogram.size() && i < total.size(); ++i) total[i] += r.histogram[i];
    }
    for (std::size_t i = 0; i < total.size(); ++i) {
        const double lo = i == 0 ? 0.0 : edges[i - 1];
        o << num("%.4f", lo) << ',' << (i < edges.size() ? num("%.4f", edges[i]) : std::string("inf")) << ','
          << total[i] << '\n';
    }
    return o.str();
}

} // namespace pocketforge
