#include "ladderkit/admittance_csv.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>

#include "text.hpp"

namespace ladderkit {

namespace {

enum Column { kFreq, kRe, kIm, kMagS, kMagDb, kPhase, kColumnCount };

constexpr std::array<std::string_view, kColumnCount> kNames = {"freq_hz",  "y_re",     "y_im",
                                                               "y_mag_s",  "y_mag_db", "y_phase_deg"};

}  // namespace

AdmittanceData read_admittance_csv(std::string_view text) {
    const auto lines = split_lines(text);
    std::size_t line_no = 0;
    std::array<std::optional<std::size_t>, kColumnCount> pos{};
    std::size_t ncols = 0;
    bool have_header = false;
    AdmittanceData out;

    for (std::string_view raw : lines) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto cells = split_char(line, ',');
        if (!have_header) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                const std::string name = lower(trim(cells[i]));
                std::size_t k = 0;
                while (k < kColumnCount && kNames[k] != name) ++k;
                if (k == kColumnCount) throw ParseError(line_no, "unknown column '" + name + "'");
                if (pos[k]) throw ParseError(line_no, "duplicate column '" + name + "'");
                pos[k] = i;
            }
            ncols = cells.size();
            const bool ri = pos[kRe] || pos[kIm];
            const bool polar = pos[kMagS] || pos[kMagDb] || pos[kPhase];
            if (!pos[kFreq]) throw ParseError(line_no, "missing freq_hz column");
            if (ri && polar) throw ParseError(line_no, "mixing rectangular and polar admittance columns");
            if (ri && !(pos[kRe] && pos[kIm])) throw ParseError(line_no, "y_re and y_im must appear together");
            if (polar && !(pos[kPhase] && (pos[kMagS].has_value() != pos[kMagDb].has_value()))) {
                throw ParseError(line_no, "polar form needs y_phase_deg and exactly one of y_mag_s, y_mag_db");
            }
            if (!ri && !polar) throw ParseError(line_no, "no admittance columns");
            have_header = true;
            continue;
        }
        if (cells.size() != ncols) {
            throw ParseError(line_no, "expected " + std::to_string(ncols) + " cells, got " +
                                          std::to_string(cells.size()));
        }
        auto cell = [&](Column c) {
            const auto v = parse_double(trim(cells[*pos[c]]));
            if (!v) throw ParseError(line_no, "column " + std::string(kNames[c]) + " is not a number");
            return *v;
        };
        const double f = cell(kFreq);
        if (!(f > 0.0)) throw ParseError(line_no, "frequency must be positive");
        if (!out.freqs.empty() && !(f > out.freqs.back())) {
            throw ParseError(line_no, "frequencies must be strictly increasing");
        }
        Complex y;
        if (pos[kRe]) {
            y = {cell(kRe), cell(kIm)};
        } else {
            const double mag = pos[kMagS] ? cell(kMagS) : std::pow(10.0, cell(kMagDb) / 20.0);
            y = std::polar(mag, cell(kPhase) * std::numbers::pi / 180.0);
        }
        out.freqs.push_back(f);
        out.y.push_back(y);
    }
    if (!have_header) throw ParseError(0, "missing header row");
    return out;
}

std::string write_admittance_csv(std::span<const double> freqs, std::span<const Complex> y) {
    if (freqs.size() != y.size()) throw InputError("frequency and admittance lengths differ");
    std::string out = "freq_hz,y_re,y_im\n";
    char buf[128];
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", freqs[i], y[i].real(), y[i].imag());
        out += buf;
    }
    return out;
}

}  // namespace ladderkit
