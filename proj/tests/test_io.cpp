#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "ladderkit/admittance_csv.hpp"
#include "ladderkit/json_io.hpp"
#include "ladderkit/touchstone.hpp"

using namespace ladderkit;

namespace {

SSweep random_sweep(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> f;
    std::vector<SMatrix> d;
    double x = 1e9;
    for (std::size_t i = 0; i < n; ++i) {
        x += 1e7 * (1.0 + (u(rng) + 1.0));
        f.push_back(x);
        auto c = [&] { return 0.7 * Complex(u(rng), u(rng)); };
        d.push_back({c(), c(), c(), c()});
    }
    return SSweep(f, d);
}

double max_err(const SSweep& a, const SSweep& b) {
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (auto [p, q] : {std::pair{a[i].s11, b[i].s11}, {a[i].s12, b[i].s12}, {a[i].s21, b[i].s21},
                            {a[i].s22, b[i].s22}}) {
            e = std::max({e, std::abs(p.real() - q.real()), std::abs(p.imag() - q.imag())});
        }
    }
    return e;
}

std::size_t error_line(const std::string& text) {
    try {
        read_touchstone(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

const char* kTemplate = R"({
  "ports": [{"r_ohm": 50, "x_ohm": 0}, {"r_ohm": 50, "x_ohm": 0}],
  "grid": {"start_hz": 30e9, "stop_hz": 48e9, "points": 2001},
  "stages": [
    {"placement": "shunt", "spec": {"fs_hz": 33e9, "k2": 0.30, "q": 13, "c0_f": 163e-15}},
    {"placement": "series", "spec": {"fs_hz": 38e9, "k2": 0.25, "q": 10, "c0_f": 201e-15}},
    {"placement": "shunt", "params": {"c0_f": 1.6e-13, "rm_ohm": 20, "lm_h": 1e-9, "cm_f": 2e-14}}
  ]
})";

}  // namespace

TEST_SUITE("io") {

TEST_CASE("touchstone examples") {
    const auto ri = read_touchstone("# GHz S RI R 50\n38.7 0.1 0.0 0.5 0.0 0.5 0.0 0.1 0.0\n");
    CHECK(ri.ports == 2);
    CHECK(ri.sweep.freq(0) == 38.7e9);
    CHECK(ri.sweep[0].s21 == Complex(0.5, 0.0));
    CHECK(ri.sweep[0].s11 == Complex(0.1, 0.0));
    const auto ma = read_touchstone("# Hz S MA R 50\n1 0.5 90 0.5 90 0.5 90 0.5 90\n");
    CHECK(std::abs(ma.sweep[0].s21 - Complex(0.0, 0.5)) < 1e-12);
    const auto db = read_touchstone("# MHz S DB R 50\n1 -6.0205999 0 -6.0205999 0 -6.0205999 0 -6.0205999 0\n");
    CHECK(std::abs(db.sweep[0].s21 - Complex(0.5, 0.0)) < 1e-6);
    CHECK(db.sweep.freq(0) == 1e6);
    const auto one = read_touchstone("! c\n# khz s ri r 75\n1 0.25 -0.5\n2 0 0\n");
    CHECK(one.ports == 1);
    CHECK(one.header.reference == 75.0);
    CHECK(one.sweep.freq(1) == 2e3);
    CHECK(one.sweep[0].s11 == Complex(0.25, -0.5));
    const auto dflt = read_touchstone("1 0.5 180\n");
    CHECK(dflt.header.format == DataFormat::MA);
    CHECK(dflt.header.unit == FreqUnit::GHz);
    CHECK(std::abs(dflt.sweep[0].s11 - Complex(-0.5, 0.0)) < 1e-15);
}

TEST_CASE("touchstone errors carry line numbers") {
    CHECK(error_line("# GHz S RI R 50\n1 0 0 0 0 0 0 0 0\n1 0 0 0 0 0 0 0 0\n") == 3);
    CHECK(error_line("! x\n# GHz Y RI R 50\n") == 2);
    CHECK(error_line("# GHz S XX R 50\n") == 1);
    CHECK(error_line("# GHz S RI R -50\n") == 1);
    CHECK(error_line("# GHz S RI R 50\n1 0 0 0 0 0 0 0\n") == 2);
    CHECK(error_line("# GHz S RI R 50\n1 0 0 0 0 0 0 0 0\n2 0 0 0 0 0 abc 0 0\n") == 3);
    CHECK(error_line("# GHz S RI R 50\n1 0 0 0 0 0 0 0 0\n2 0 0 0 0 0 0 0 0\n1 2 3 4 5\n") == 4);
    CHECK(error_line("[Version] 2.0\n") == 1);
    CHECK_THROWS_AS(read_touchstone("# GHz S RI R 50\n1 0 0\n", 2), ParseError);
}

TEST_CASE("touchstone round trip") {
    std::mt19937_64 rng(17);
    for (DataFormat fmt : {DataFormat::RI, DataFormat::MA, DataFormat::DB}) {
        for (FreqUnit unit : {FreqUnit::Hz, FreqUnit::kHz, FreqUnit::MHz, FreqUnit::GHz}) {
            const SSweep s = random_sweep(rng, 100);
            TouchstoneHeader h;
            h.format = fmt;
            h.unit = unit;
            const auto back = read_touchstone(write_touchstone(h, s));
            CHECK(back.header.format == fmt);
            CHECK(back.header.unit == unit);
            REQUIRE(back.sweep.size() == s.size());
            CHECK(max_err(s, back.sweep) <= 1e-9);
            for (std::size_t i = 0; i < s.size(); ++i) {
                CHECK(std::abs(back.sweep.freq(i) - s.freq(i)) <= 1e-12 * s.freq(i));
            }
        }
    }
}

TEST_CASE("touchstone writer details") {
    TouchstoneHeader h;
    h.format = DataFormat::RI;
    h.unit = FreqUnit::GHz;
    const std::string empty = write_touchstone(h, SSweep{});
    CHECK(empty.find("# GHz S RI R 50") != std::string::npos);
    CHECK(read_touchstone(empty).sweep.size() == 0);
    const SSweep one(std::vector<double>{38.7e9}, std::vector<SMatrix>{{0.1, 0.5, 0.5, 0.1}});
    const std::string t = write_touchstone(h, one);
    CHECK(t.find("\n38.7 ") != std::string::npos);
    const TouchstoneHeader dh;
    CHECK(dh.reference == 50.0);
    const SSweep s1(std::vector<double>{1e9}, std::vector<SMatrix>{{Complex(0.2, 0.1), 0.0, 0.0, 0.0}});
    const auto r1 = read_touchstone(write_touchstone(h, s1, 1));
    CHECK(r1.ports == 1);
    CHECK(std::abs(r1.sweep[0].s11 - Complex(0.2, 0.1)) < 1e-12);
    // Flagged points are left out.
    const SSweep fl(std::vector<double>{1e9, 2e9}, std::vector<SMatrix>(2), std::vector<bool>{false, true});
    CHECK(read_touchstone(write_touchstone(h, fl)).sweep.size() == 1);
}

TEST_CASE("format conversions compose to identity") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const Complex v(u(rng), u(rng));
        const SSweep s(std::vector<double>{1e9}, std::vector<SMatrix>{{v, v, v, v}});
        SSweep cur = s;
        for (DataFormat fmt : {DataFormat::MA, DataFormat::DB, DataFormat::RI, DataFormat::DB, DataFormat::MA}) {
            TouchstoneHeader h;
            h.format = fmt;
            cur = read_touchstone(write_touchstone(h, cur)).sweep;
        }
        CHECK(std::abs(cur[0].s21 - v) <= 1e-9);
    }
}

TEST_CASE("one-port admittance conversion") {
    CHECK(std::abs(s11_to_admittance(0.0, 50.0) - Complex(0.02)) < 1e-15);
    CHECK(std::abs(s11_to_admittance(1.0 / 3.0, 50.0) - Complex(0.01)) < 1e-15);
    CHECK_THROWS_AS(s11_to_admittance(-1.0, 50.0), SingularNetworkError);
}

TEST_CASE("admittance csv") {
    const auto a = read_admittance_csv("freq_hz,y_re,y_im\n38e9,0.0397,0.0119\n");
    CHECK(a.freqs[0] == 38e9);
    CHECK(a.y[0] == Complex(0.0397, 0.0119));
    const auto b = read_admittance_csv("# comment\nfreq_hz,y_mag_s,y_phase_deg\n1e9,0.04,90\n");
    CHECK(std::abs(b.y[0] - Complex(0.0, 0.04)) < 1e-15);
    const auto c = read_admittance_csv("y_phase_deg,freq_hz,y_mag_db\n0,1e9,-20\n");
    CHECK(std::abs(c.y[0] - Complex(0.1, 0.0)) < 1e-15);
    CHECK_THROWS_AS(read_admittance_csv("freq_hz,y_re\n1,2\n"), ParseError);
    CHECK_THROWS_AS(read_admittance_csv("freq_hz,y_re,y_foo\n"), ParseError);
    CHECK_THROWS_AS(read_admittance_csv("freq_hz,y_re,y_im,y_mag_s\n"), ParseError);
    CHECK_THROWS_AS(read_admittance_csv("freq_hz,y_mag_s,y_mag_db,y_phase_deg\n"), ParseError);
    CHECK_THROWS_AS(read_admittance_csv("freq_hz,y_re,y_im\n2,0,0\n1,0,0\n"), ParseError);
    CHECK_THROWS_AS(read_admittance_csv(""), ParseError);
    try {
        read_admittance_csv("freq_hz,y_re,y_im\n1,0,0\n2,0\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> f;
    std::vector<Complex> y;
    for (int i = 0; i < 100; ++i) {
        f.push_back(1e9 + 1e7 * i);
        y.emplace_back(u(rng), u(rng));
    }
    const auto back = read_admittance_csv(write_admittance_csv(f, y));
    CHECK(back.freqs == f);
    CHECK(back.y == y);
}

TEST_CASE("design config") {
    const DesignConfig cfg = read_design_config(kTemplate);
    CHECK(cfg.stages.size() == 3);
    const LadderDesign d = cfg.design();
    CHECK(d.stages.size() == 3);
    CHECK(d.stages[0].placement == Placement::Shunt);
    CHECK(d.stages[1].placement == Placement::Series);
    CHECK(d.stages[1].resonator == mbvd_from_spec({38e9, 0.25, 10.0, 201e-15, 0.0, 0.0}));
    CHECK(d.stages[2].resonator.rm == 20.0);
    CHECK(cfg.grid.points == 2001);
    const std::string once = write_design_config(cfg);
    const std::string twice = write_design_config(read_design_config(once));
    CHECK(once == twice);
    const DesignConfig again = read_design_config(once);
    CHECK(again.design().stages[0].resonator == d.stages[0].resonator);
    CHECK(again.stages[0].spec == cfg.stages[0].spec);
}

TEST_CASE("design config schema errors name the field") {
    auto field_of = [](const std::string& text) {
        try {
            read_design_config(text);
        } catch (const SchemaError& e) {
            return e.field();
        }
        return std::string("<none>");
    };
    CHECK(field_of(R"({"grid": {"start_hz": 1e9, "stop_hz": 2e9, "points": 3}})") == "/stages");
    CHECK(field_of(R"({"grid": {"start_hz": 1e9, "stop_hz": 2e9, "points": 3}, "stages": [
        {"placement": "shunt", "spec": {"fs_hz": 33e9, "k2": "x", "q": 13}}]})") == "/stages/0/spec/k2");
    CHECK(field_of(R"({"grid": {"start_hz": 1e9, "stop_hz": 2e9, "points": 3}, "stages": [
        {"placement": "middle", "spec": {"fs_hz": 33e9, "k2": 0.3, "q": 13}}]})") == "/stages/0/placement");
    CHECK(field_of(R"({"grid": {"start_hz": 1e9, "stop_hz": 2e9, "points": 0}, "stages": []})") ==
          "/grid/points");
    CHECK(field_of(R"({"grid": {"start_hz": 1e9, "stop_hz": 2e9, "points": 3}, "stages": [], "bogus": 1})") ==
          "/bogus");
    CHECK_THROWS_AS(read_design_config("{"), ParseError);
    CHECK_THROWS_AS(read_design_config("[1,2]"), SchemaError);
    // A template stage without c0 cannot be simulated directly.
    const DesignConfig t = read_design_config(R"({"grid": {"start_hz": 1e9, "stop_hz": 2e9, "points": 3},
        "stages": [{"placement": "shunt", "spec": {"fs_hz": 33e9, "k2": 0.3, "q": 13}}]})");
    CHECK_THROWS_AS(t.design(), SchemaError);
    CHECK(t.ladder_template().stages.size() == 1);
}

TEST_CASE("parsers survive random bytes") {
    std::mt19937_64 rng(99);
    const std::string alphabet = "0123456789.-+eE #!\n\t,SRIMADBGHzk[]{}\":ayfreq_hzimpsdb";
    for (int i = 0; i < 3000; ++i) {
        std::string s(rng() % 200, '\0');
        for (auto& c : s) c = (i % 2) ? static_cast<char>(rng() & 0xff) : alphabet[rng() % alphabet.size()];
        for (int which = 0; which < 3; ++which) {
            try {
                if (which == 0) read_touchstone(s);
                if (which == 1) read_admittance_csv(s);
                if (which == 2) read_design_config(s);
            } catch (const Error&) {
            }
        }
    }
    // Mutations of valid files.
    const std::string base = "# GHz S RI R 50\n1 0.1 0 0.5 0 0.5 0 0.1 0\n2 0.1 0 0.5 0 0.5 0 0.1 0\n";
    for (int i = 0; i < 3000; ++i) {
        std::string s = base;
        for (int k = 0; k < 3; ++k) s[rng() % s.size()] = static_cast<char>(rng() & 0xff);
        try {
            read_touchstone(s);
        } catch (const Error&) {
        }
        std::string js = kTemplate;
        for (int k = 0; k < 2; ++k) js[rng() % js.size()] = alphabet[rng() % alphabet.size()];
        try {
            read_design_config(js).design();
        } catch (const Error&) {
        }
    }
    CHECK(true);
}

}  // TEST_SUITE
