#pragma once

#include "pocketforge/advisor.hpp"
#include "pocketforge/errors.hpp"
#include "pocketforge/kinematics.hpp"
#include "pocketforge/pocket.hpp"
#include "pocketforge/tool_selection.hpp"
#include "pocketforge/toolpath.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace pocketforge {

using json = nlohmann::json;

inline constexpr const char* kSchema = "pocketforge/1";

// Enum names match the to_string() spellings.
NLOHMANN_JSON_SERIALIZE_ENUM(FloorKind, {{FloorKind::flat, "flat"}, {FloorKind::complex, "complex"}})
NLOHMANN_JSON_SERIALIZE_ENUM(WallKind, {{WallKind::perpendicular, "perpendicular"}, {WallKind::drafted, "drafted"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Closure, {{Closure::closed, "closed"}, {Closure::open, "open"}, {Closure::corner, "corner"}})
NLOHMANN_JSON_SERIALIZE_ENUM(EntityKind, {{EntityKind::thin_wall, "thin_wall"},
                                          {EntityKind::haut_d_aile, "haut_d_aile"},
                                          {EntityKind::raidisseur, "raidisseur"}})
NLOHMANN_JSON_SERIALIZE_ENUM(PlungeStyle, {{PlungeStyle::helical, "helical"},
                                           {PlungeStyle::ramp, "ramp"},
                                           {PlungeStyle::axial, "axial"}})
NLOHMANN_JSON_SERIALIZE_ENUM(MoveKind, {{MoveKind::line, "line"}, {MoveKind::arc_cw, "arc_cw"}, {MoveKind::arc_ccw, "arc_ccw"}})
NLOHMANN_JSON_SERIALIZE_ENUM(MoveIntent, {{MoveIntent::cut, "cut"},
                                          {MoveIntent::entry, "entry"},
                                          {MoveIntent::link, "link"},
                                          {MoveIntent::exit, "exit"}})
NLOHMANN_JSON_SERIALIZE_ENUM(PathMode, {{PathMode::spiral, "spiral"}, {PathMode::zigzag, "zigzag"}})
NLOHMANN_JSON_SERIALIZE_ENUM(LinkStyle, {{LinkStyle::classic, "classic"}, {LinkStyle::hsm, "hsm"}})
NLOHMANN_JSON_SERIALIZE_ENUM(EntryKind, {{EntryKind::tangential_flank, "tangential_flank"},
                                         {EntryKind::spiral_plunge, "spiral_plunge"}})
NLOHMANN_JSON_SERIALIZE_ENUM(AccelMode, {{AccelMode::brisk, "brisk"}, {AccelMode::soft, "soft"}})

void to_json(json& j, const Point& p);
void from_json(const json& j, Point& p);
void to_json(json& j, const PolygonWithHoles& p);
void from_json(const json& j, PolygonWithHoles& p);
void to_json(json& j, const Region& r);
void from_json(const json& j, Region& r);

void to_json(json& j, const IslandInfo& i);
void from_json(const json& j, IslandInfo& i);
void to_json(json& j, const SpecificEntity& e);
void from_json(const json& j, SpecificEntity& e);
void to_json(json& j, const Pocket& p);
void from_json(const json& j, Pocket& p);
void to_json(json& j, const PocketClass& c);
void from_json(const json& j, PocketClass& c);

void to_json(json& j, const Tool& t);
void from_json(const json& j, Tool& t);
void to_json(json& j, const MachineParams& m);
void from_json(const json& j, MachineParams& m);
void to_json(json& j, const StrategyParams& s);
void from_json(const json& j, StrategyParams& s);

void to_json(json& j, const Move& m);
void from_json(const json& j, Move& m);
void to_json(json& j, const Toolpath& t);
void from_json(const json& j, Toolpath& t);

void to_json(json& j, const ProfileSample& s);
void from_json(const json& j, ProfileSample& s);
/// Block plans are not serialized.
void to_json(json& j, const SimResult& r);
void from_json(const json& j, SimResult& r);

void to_json(json& j, const DiameterBounds& b);
void from_json(const json& j, DiameterBounds& b);
void to_json(json& j, const DecompositionStep& s);
void from_json(const json& j, DecompositionStep& s);
void to_json(json& j, const IntervalDecision& d);
void from_json(const json& j, IntervalDecision& d);
void to_json(json& j, const ChosenTool& c);
void from_json(const json& j, ChosenTool& c);
void to_json(json& j, const Decomposition& d);
void from_json(const json& j, Decomposition& d);

void to_json(json& j, const ForbiddenCombo& f);
void from_json(const json& j, ForbiddenCombo& f);
void to_json(json& j, const AdvisorRules& r);
void from_json(const json& j, AdvisorRules& r);
void to_json(json& j, const RankedStrategy& r);
void from_json(const json& j, RankedStrategy& r);
void to_json(json& j, const CandidateFailure& f);
void from_json(const json& j, CandidateFailure& f);
void to_json(json& j, const StrategyReport& r);
void from_json(const json& j, StrategyReport& r);
void to_json(json& j, const PocketAdvice& a);
void from_json(const json& j, PocketAdvice& a);

/// Reads and parses a JSON file. Missing or malformed files raise IoError.
json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Converts a JSON value to T; shape errors become ValidationError naming `what`.
template <typename T>
T parse_as(const json& j, const std::string& what)
{
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        throw ValidationError("bad_" + what, what + ": " + e.what());
    }
}

Pocket load_pocket(const std::filesystem::path& path);
std::vector<Tool> load_tools(const std::filesystem::path& path);
MachineParams load_machine(const std::filesystem::path& path);
AdvisorRules load_rules(const std::filesystem::path& path);

/// "10m/min", "600 mm/min" or "166.67mm/s" to mm/s. A unit is required.
double parse_feed(const std::string& text);

/// Wraps a payload object with the schema tag.
json with_schema(json payload);

/// Zone outlines as filled areas, one colour per zone.
std::string zones_svg(const Region& pocket, const std::vector<Region>& zones);
/// Zone underlay plus one polyline layer per move intent.
std::string toolpath_svg(const Region& zone, const std::vector<Toolpath>& paths);

/// G1/G2/G3 subset, XY only, fixed 4 decimals, F in mm/min.
std::string to_gcode(const std::vector<Toolpath>& paths);

std::string profile_csv(const std::vector<SimResult>& results);
std::string histogram_csv(const std::vector<SimResult>& results);

} // namespace pocketforge
