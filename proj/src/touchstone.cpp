#include "ladderkit/touchstone.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <vector>

#include "text.hpp"

namespace ladderkit {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Complex to_complex(DataFormat fmt, double a, double b) {
    switch (fmt) {
        case DataFormat::RI:
            return {a, b};
        case DataFormat::MA:
            return std::polar(a, b * kDeg);
        case DataFormat::DB:
            return std::polar(std::pow(10.0, a / 20.0), b * kDeg);
    }
    return {};
}

std::pair<double, double> from_complex(DataFormat fmt, Complex v) {
    switch (fmt) {
        case DataFormat::RI:
            return {v.real(), v.imag()};
        case DataFormat::MA:
            return {std::abs(v), std::arg(v) / kDeg};
        case DataFormat::DB:
            return {db20(v), std::arg(v) / kDeg};
    }
    return {};
}

const char* unit_name(FreqUnit u) {
    switch (u) {
        case FreqUnit::Hz: return "Hz";
        case FreqUnit::kHz: return "kHz";
        case FreqUnit::MHz: return "MHz";
        case FreqUnit::GHz: return "GHz";
    }
    return "GHz";
}

const char* format_name(DataFormat f) {
    switch (f) {
        case DataFormat::RI: return "RI";
        case DataFormat::MA: return "MA";
        case DataFormat::DB: return "DB";
    }
    return "RI";
}

TouchstoneHeader parse_option_line(std::string_view body, std::size_t line_no) {
    TouchstoneHeader h;
    h.format = DataFormat::MA;
    const auto tokens = split_ws(body);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string t = upper(tokens[i]);
        if (t == "HZ") h.unit = FreqUnit::Hz;
        else if (t == "KHZ") h.unit = FreqUnit::kHz;
        else if (t == "MHZ") h.unit = FreqUnit::MHz;
        else if (t == "GHZ") h.unit = FreqUnit::GHz;
        else if (t == "RI") h.format = DataFormat::RI;
        else if (t == "MA") h.format = DataFormat::MA;
        else if (t == "DB") h.format = DataFormat::DB;
        else if (t == "S") continue;
        else if (t == "Y" || t == "Z" || t == "G" || t == "H") {
            throw ParseError(line_no, "only S-parameter files are supported, got " + t);
        } else if (t == "R") {
            if (i + 1 >= tokens.size()) throw ParseError(line_no, "option line: R needs a value");
            const auto r = parse_double(tokens[++i]);
            if (!r || !(*r > 0.0)) throw ParseError(line_no, "option line: reference must be > 0");
            h.reference = *r;
        } else {
            throw ParseError(line_no, "option line: unknown token '" + std::string(tokens[i]) + "'");
        }
    }
    return h;
}

}  // namespace

double unit_scale(FreqUnit unit) {
    switch (unit) {
        case FreqUnit::Hz: return 1.0;
        case FreqUnit::kHz: return 1e3;
        case FreqUnit::MHz: return 1e6;
        case FreqUnit::GHz: return 1e9;
    }
    return 1.0;
}

TouchstoneData read_touchstone(std::string_view text, int ports) {
    if (ports != 0 && ports != 1 && ports != 2) throw InputError("only 1- and 2-port files are supported");
    TouchstoneData out;
    out.header.format = DataFormat::MA;
    out.ports = ports;
    bool have_option = false;
    bool have_data = false;
    std::vector<double> freqs;
    std::vector<SMatrix> data;

    std::size_t line_no = 0;
    for (std::string_view raw : split_lines(text)) {
        ++line_no;
        std::string_view line = raw;
        if (auto bang = line.find('!'); bang != std::string_view::npos) line = line.substr(0, bang);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (have_data) throw ParseError(line_no, "option line after data");
            if (!have_option) out.header = parse_option_line(line.substr(1), line_no);
            have_option = true;
            continue;
        }
        if (line.front() == '[') throw ParseError(line_no, "Touchstone v2 keywords are not supported");

        const auto tokens = split_ws(line);
        std::vector<double> nums;
        nums.reserve(tokens.size());
        for (auto tok : tokens) {
            const auto v = parse_double(tok);
            if (!v) throw ParseError(line_no, "not a number: '" + std::string(tok) + "'");
            nums.push_back(*v);
        }
        const double f = nums[0] * unit_scale(out.header.unit);
        if (out.ports == 2 && nums.size() == 5 && !freqs.empty() && f <= freqs.back()) {
            throw ParseError(line_no, "noise parameter data is not supported");
        }
        if (out.ports == 0) {
            if (nums.size() == 3) out.ports = 1;
            else if (nums.size() == 9) out.ports = 2;
            else throw ParseError(line_no, "expected 3 (one-port) or 9 (two-port) columns, got " +
                                               std::to_string(nums.size()));
        }
        const std::size_t want = out.ports == 1 ? 3 : 9;
        if (nums.size() != want) {
            throw ParseError(line_no, "expected " + std::to_string(want) + " columns, got " +
                                          std::to_string(nums.size()));
        }
        if (!(f > 0.0) || !std::isfinite(f)) throw ParseError(line_no, "frequency must be positive and finite");
        if (!freqs.empty() && !(f > freqs.back())) {
            throw ParseError(line_no, "frequencies must be strictly increasing");
        }
        const DataFormat fmt = out.header.format;
        SMatrix s{};
        s.s11 = to_complex(fmt, nums[1], nums[2]);
        if (out.ports == 2) {
            s.s21 = to_complex(fmt, nums[3], nums[4]);
            s.s12 = to_complex(fmt, nums[5], nums[6]);
            s.s22 = to_complex(fmt, nums[7], nums[8]);
        }
        freqs.push_back(f);
        data.push_back(s);
        have_data = true;
    }
    if (out.ports == 0) out.ports = 2;
    out.sweep = SSweep(std::move(freqs), std::move(data));
    return out;
}

std::string write_touchstone(const TouchstoneHeader& header, const SSweep& sweep, int ports) {
    if (ports != 1 && ports != 2) throw InputError("only 1- and 2-port files are supported");
    if (!(header.reference > 0.0)) throw InputError("reference impedance must be > 0");
    std::string out = "! ladderkit\n";
    char buf[512];
    std::snprintf(buf, sizeof buf, "# %s S %s R %.12g\n", unit_name(header.unit), format_name(header.format),
                  header.reference);
    out += buf;
    const double scale = unit_scale(header.unit);
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        if (sweep.flagged(i)) continue;
        std::snprintf(buf, sizeof buf, "%.15g", sweep.freq(i) / scale);
        out += buf;
        const SMatrix& s = sweep[i];
        const Complex cols[4] = {s.s11, s.s21, s.s12, s.s22};
        for (int k = 0; k < (ports == 1 ? 1 : 4); ++k) {
            const auto [a, b] = from_complex(header.format, cols[k]);
            // Nine digits keep RI within 1e-9 for passive data; angles and dB
            // need more because the conversion back amplifies rounding.
            if (header.format == DataFormat::RI) std::snprintf(buf, sizeof buf, " %.9g %.9g", a, b);
            else std::snprintf(buf, sizeof buf, " %.12g %.12g", a, b);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

Complex s11_to_admittance(Complex s11, double z0) {
    if (!(z0 > 0.0)) throw InputError("reference impedance must be > 0");
    const Complex den = 1.0 + s11;
    if (std::abs(den) == 0.0) throw SingularNetworkError("S11 = -1 is a short circuit");
    return (1.0 - s11) / (den * z0);
}

}  // namespace ladderkit
