#include "ladderkit/network.hpp"

#include <cmath>
#include <string>

namespace ladderkit {

namespace {

bool finite(Complex v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

bool finite(const Abcd& m) { return finite(m.a) && finite(m.b) && finite(m.c) && finite(m.d); }

// Terminal quantities for a unit-EMF source with impedance zs driving m into zl.
// v1 = (a zl + b) i2, i1 = (c zl + d) i2, 1 = zs i1 + v1.
struct TerminatedSolve {
    Complex i1, i2, v1;
};

TerminatedSolve solve_terminated(const Abcd& m, Complex zs, Complex zl) {
    const Complex vnum = m.a * zl + m.b;
    const Complex inum = m.c * zl + m.d;
    const Complex loop = vnum + zs * inum;
    if (!finite(loop) || std::abs(loop) == 0.0 ||
        std::abs(loop) < 1e-300 * (std::abs(vnum) + std::abs(zs * inum))) {
        throw SingularNetworkError("source loop is singular");
    }
    const Complex i2 = 1.0 / loop;
    return {inum * i2, i2, vnum * i2};
}

// Reflection with conj(zs) in the numerator, written so an open input
// (c zl + d == 0) still yields a finite coefficient.
Complex power_wave_gamma(const Abcd& m, Complex zs, Complex zl) {
    const Complex vnum = m.a * zl + m.b;
    const Complex inum = m.c * zl + m.d;
    return (vnum - std::conj(zs) * inum) / (vnum + zs * inum);
}

Abcd reversed(const Abcd& m) {
    // Port swap of a two-port: [[d, b], [c, a]] / det. The det factor keeps this
    // exact for non-reciprocal data recovered from measurements.
    const Complex det = m.det();
    return {m.d / det, m.b / det, m.c / det, m.a / det};
}

}  // namespace

Abcd operator*(const Abcd& l, const Abcd& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c,
            l.c * r.b + l.d * r.d};
}

PortImpedance::PortImpedance(double r_ohm, double x_ohm) : PortImpedance(Complex{r_ohm, x_ohm}) {}

PortImpedance::PortImpedance(Complex z) : z_(z) {
    if (!finite(z) || !(z.real() > 0.0)) {
        throw InputError("port impedance must have a finite, positive real part");
    }
}

template <class T>
Sweep<T>::Sweep(std::vector<double> freqs, std::vector<T> data)
    : Sweep(std::move(freqs), std::move(data), {}) {}

template <class T>
Sweep<T>::Sweep(std::vector<double> freqs, std::vector<T> data, std::vector<bool> flagged)
    : freqs_(std::move(freqs)), data_(std::move(data)), flagged_(std::move(flagged)) {
    validate_grid(freqs_);
    if (data_.size() != freqs_.size()) {
        throw InputError("sweep data length does not match frequency count");
    }
    if (flagged_.empty()) {
        flagged_.assign(freqs_.size(), false);
    } else if (flagged_.size() != freqs_.size()) {
        throw InputError("sweep flag length does not match frequency count");
    }
}

template <class T>
std::size_t Sweep<T>::flagged_count() const {
    std::size_t n = 0;
    for (bool f : flagged_) n += f ? 1 : 0;
    return n;
}

template class Sweep<SMatrix>;
template class Sweep<Abcd>;
template class Sweep<Complex>;

void validate_grid(std::span<const double> freqs) {
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        if (!std::isfinite(freqs[i]) || !(freqs[i] > 0.0)) {
            throw InputError("frequency at index " + std::to_string(i) + " is not positive");
        }
        if (i > 0 && !(freqs[i] > freqs[i - 1])) {
            throw InputError("frequencies not strictly increasing at index " + std::to_string(i));
        }
    }
}

std::vector<double> linspace(double start, double stop, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = start;
        return out;
    }
    const double step = (stop - start) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = start + step * static_cast<double>(i);
    if (n > 1) out[n - 1] = stop;
    return out;
}

Abcd series_abcd(Complex z) {
    if (!finite(z)) throw InputError("series impedance must be finite");
    return {1.0, z, 0.0, 1.0};
}

Abcd shunt_abcd(Complex y) {
    if (!finite(y)) throw InputError("shunt admittance must be finite");
    return {1.0, 0.0, y, 1.0};
}

Abcd cascade(std::span<const Abcd> stages) {
    if (stages.empty()) throw InputError("cascade needs at least one stage");
    Abcd acc = stages.front();
    for (std::size_t i = 1; i < stages.size(); ++i) acc = acc * stages[i];
    return acc;
}

SMatrix abcd_to_s(const Abcd& m, double z0) {
    if (!(z0 > 0.0) || !std::isfinite(z0)) throw InputError("reference impedance must be > 0");
    const Complex bz = m.b / z0;
    const Complex cz = m.c * z0;
    const Complex den = m.a + bz + cz + m.d;
    if (!finite(den) || std::abs(den) == 0.0) {
        throw SingularNetworkError("a + b/z0 + c*z0 + d vanishes");
    }
    return {(m.a + bz - cz - m.d) / den, 2.0 * m.det() / den, 2.0 / den,
            (-m.a + bz - cz + m.d) / den};
}

Abcd s_to_abcd(const SMatrix& s, double z0) {
    if (!(z0 > 0.0)) throw InputError("reference impedance must be > 0");
    if (std::abs(s.s21) == 0.0) throw SingularNetworkError("S21 == 0 has no ABCD form");
    const Complex x = s.s12 * s.s21;
    const Complex two_s21 = 2.0 * s.s21;
    return {((1.0 + s.s11) * (1.0 - s.s22) + x) / two_s21,
            z0 * ((1.0 + s.s11) * (1.0 + s.s22) - x) / two_s21,
            ((1.0 - s.s11) * (1.0 - s.s22) - x) / (z0 * two_s21),
            ((1.0 - s.s11) * (1.0 + s.s22) + x) / two_s21};
}

TransducerResult transducer_gain(const Abcd& m, const PortImpedance& zs, const PortImpedance& zl) {
    const auto sol = solve_terminated(m, zs.z(), zl.z());
    // P_load = |i2|^2 Re(zl) / 2 against P_avail = 1 / (8 Re(zs)).
    const double gain = 4.0 * zs.r() * zl.r() * std::norm(sol.i2);
    return {gain, power_wave_gamma(m, zs.z(), zl.z())};
}

SMatrix power_wave_s(const Abcd& m, const PortImpedance& zs, const PortImpedance& zl) {
    const double root = std::sqrt(zs.r() * zl.r());
    const auto fwd = solve_terminated(m, zs.z(), zl.z());
    const Abcd rev_m = reversed(m);
    const auto rev = solve_terminated(rev_m, zl.z(), zs.z());
    // b2 = sqrt(R2) i2 for a1 = 1 / (2 sqrt(R1)).
    return {power_wave_gamma(m, zs.z(), zl.z()), 2.0 * root * rev.i2, 2.0 * root * fwd.i2,
            power_wave_gamma(rev_m, zl.z(), zs.z())};
}

AbcdSweep s_sweep_to_abcd(const SSweep& s, double z0) {
    std::vector<Abcd> out(s.size());
    std::vector<bool> flags(s.size(), false);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.flagged(i)) {
            flags[i] = true;
            continue;
        }
        try {
            out[i] = s_to_abcd(s[i], z0);
            if (!finite(out[i])) throw SingularNetworkError("non-finite ABCD");
        } catch (const SingularNetworkError&) {
            out[i] = Abcd{};
            flags[i] = true;
        }
    }
    return AbcdSweep({s.freqs().begin(), s.freqs().end()}, std::move(out), std::move(flags));
}

SSweep renormalize_sweep(const SSweep& s, double z0, const PortImpedance& zs,
                         const PortImpedance& zl) {
    if (zs == PortImpedance(z0) && zl == PortImpedance(z0)) return s;
    const AbcdSweep abcd = s_sweep_to_abcd(s, z0);
    std::vector<SMatrix> out(s.size());
    std::vector<bool> flags(s.size(), false);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (abcd.flagged(i)) {
            flags[i] = true;
            continue;
        }
        try {
            out[i] = power_wave_s(abcd[i], zs, zl);
        } catch (const SingularNetworkError&) {
            out[i] = SMatrix{};
            flags[i] = true;
        }
    }
    return SSweep({s.freqs().begin(), s.freqs().end()}, std::move(out), std::move(flags));
}

double db20(Complex v) { return 20.0 * std::log10(std::abs(v)); }

}  // namespace ladderkit
