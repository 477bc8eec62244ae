#pragma once

namespace pocketforge {

enum class PlungeStyle { helical, ramp, axial };

/// Flat end mill as listed in the tool database.
struct Tool {
    double diameter = 0.0; // mm
    int flutes = 2;
    double vc = 0.0;       // capable feed from the tool database, mm/s
    PlungeStyle plunge = PlungeStyle::helical;

    double radius() const { return 0.5 * diameter; }
    friend bool operator==(const Tool&, const Tool&) = default;
};

const char* to_string(PlungeStyle p);

} // namespace pocketforge
