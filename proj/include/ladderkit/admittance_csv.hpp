#pragma once

// One-port admittance sweeps as CSV. The header row names the columns:
// freq_hz plus exactly one of {y_re, y_im}, {y_mag_s, y_phase_deg} or
// {y_mag_db, y_phase_deg}, in any order. y_mag_db is 20 log10(|Y| / 1 S).

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ladderkit/network.hpp"

namespace ladderkit {

struct AdmittanceData {
    std::vector<double> freqs;
    std::vector<Complex> y;
};

AdmittanceData read_admittance_csv(std::string_view text);

// Writes freq_hz,y_re,y_im with 17 significant digits (exact double round trip).
std::string write_admittance_csv(std::span<const double> freqs, std::span<const Complex> y);

}  // namespace ladderkit
