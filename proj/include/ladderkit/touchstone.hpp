#pragma once

// Touchstone v1 (.s1p / .s2p) reader and writer. Two-port rows use the v1
// column order: f S11 S21 S12 S22.

#include <string>
#include <string_view>

#include "ladderkit/network.hpp"

namespace ladderkit {

enum class FreqUnit { Hz, kHz, MHz, GHz };
enum class DataFormat { RI, MA, DB };

struct TouchstoneHeader {
    FreqUnit unit = FreqUnit::GHz;
    DataFormat format = DataFormat::RI;  // the reader assumes MA when a file omits it
    double reference = 50.0;
};

struct TouchstoneData {
    TouchstoneHeader header;
    int ports = 2;
    // One-port files fill s11 only; the remaining entries are zero.
    SSweep sweep;
};

double unit_scale(FreqUnit unit);

// ports == 0 detects the port count from the first data row (3 or 9 numbers).
// Throws ParseError carrying the offending line number.
TouchstoneData read_touchstone(std::string_view text, int ports = 0);

// Frequencies are written in header.unit, data in header.format (nine
// significant digits for RI, twelve for MA and DB). Flagged points are omitted.
std::string write_touchstone(const TouchstoneHeader& header, const SSweep& sweep, int ports = 2);

// Y = (1 / z0) (1 - S11) / (1 + S11).
Complex s11_to_admittance(Complex s11, double z0);

}  // namespace ladderkit
