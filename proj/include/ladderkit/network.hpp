#pragma once

// Two-port network algebra: element ABCD matrices, cascading, and conversion
// to scattering parameters under real (voltage-wave) and complex (power-wave)
// port references.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "ladderkit/errors.hpp"

namespace ladderkit {

using Complex = std::complex<double>;

// Transmission matrix. b is in ohms, c in siemens, a and d are dimensionless.
struct Abcd {
    Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};

    Complex det() const { return a * d - b * c; }

    static Abcd identity() { return {}; }
};

Abcd operator*(const Abcd& lhs, const Abcd& rhs);

struct SMatrix {
    Complex s11, s12, s21, s22;
};

// Port reference impedance; Re(z) > 0 is enforced at construction.
class PortImpedance {
public:
    PortImpedance(double r_ohm, double x_ohm = 0.0);
    explicit PortImpedance(Complex z);

    Complex z() const { return z_; }
    double r() const { return z_.real(); }
    double x() const { return z_.imag(); }
    bool is_real() const { return z_.imag() == 0.0; }

    friend bool operator==(const PortImpedance&, const PortImpedance&) = default;

private:
    Complex z_;
};

// Frequencies (Hz, strictly increasing, positive) with one payload per point.
// A point whose computation was singular is kept but flagged; its payload is
// value-initialized and must not be used.
template <class T>
class Sweep {
public:
    Sweep() = default;
    Sweep(std::vector<double> freqs, std::vector<T> data);
    Sweep(std::vector<double> freqs, std::vector<T> data, std::vector<bool> flagged);

    std::size_t size() const { return freqs_.size(); }
    bool empty() const { return freqs_.empty(); }
    std::span<const double> freqs() const { return freqs_; }
    std::span<const T> data() const { return data_; }
    double freq(std::size_t i) const { return freqs_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }
    bool flagged(std::size_t i) const { return flagged_[i]; }
    std::size_t flagged_count() const;

private:
    std::vector<double> freqs_;
    std::vector<T> data_;
    std::vector<bool> flagged_;
};

using SSweep = Sweep<SMatrix>;
using AbcdSweep = Sweep<Abcd>;
using AdmittanceSweep = Sweep<Complex>;

// Throws InputError unless freqs is strictly increasing and positive.
void validate_grid(std::span<const double> freqs);

// n evenly spaced points from start to stop inclusive (n == 1 yields {start}).
std::vector<double> linspace(double start, double stop, std::size_t n);

Abcd series_abcd(Complex z);
Abcd shunt_abcd(Complex y);

// Left-to-right product; stage 0 faces port 1.
Abcd cascade(std::span<const Abcd> stages);

// Voltage-wave S-parameters with the same real reference z0 at both ports.
SMatrix abcd_to_s(const Abcd& m, double z0);

// Inverse of abcd_to_s. Throws SingularNetworkError when S21 == 0.
Abcd s_to_abcd(const SMatrix& s, double z0);

struct TransducerResult {
    double gain;       // delivered / available power, in [0, 1] for passive networks
    Complex gamma_in;  // power-wave reflection at port 1 w.r.t. zs
};

// Direct solve of a unit-EMF source with internal impedance zs driving the
// network terminated in zl.
TransducerResult transducer_gain(const Abcd& m, const PortImpedance& zs, const PortImpedance& zl);

// Power-wave (Kurokawa) S-parameters of m referenced to zs at port 1 and zl at
// port 2, assembled from a forward and a reverse terminated circuit solve.
SMatrix power_wave_s(const Abcd& m, const PortImpedance& zs, const PortImpedance& zl);

// Re-express an S sweep measured at real reference z0 as power-wave S with
// references (zs, zl). Points that cannot be converted are flagged.
SSweep renormalize_sweep(const SSweep& s, double z0, const PortImpedance& zs,
                         const PortImpedance& zl);

// Converts each S point at reference z0 to ABCD; isolating points are flagged.
AbcdSweep s_sweep_to_abcd(const SSweep& s, double z0);

double db20(Complex v);

}  // namespace ladderkit
