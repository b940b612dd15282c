#pragma once

// Frequency grids, measurements, masks and the wrap-around metric shared by
// every other component. All operations here are pure value transforms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace modelsr {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Position on the unit circle [0,1).
struct WrapPosition {
    double value = 0.0;

    WrapPosition() = default;
    explicit WrapPosition(double v) : value(v) {
        if (!(v >= 0.0 && v < 1.0))
            throw std::invalid_argument("WrapPosition: value must lie in [0,1)");
    }

    // Reduce an arbitrary real into [0,1).
    static WrapPosition wrap(double x) {
        double r = x - std::floor(x);
        if (r >= 1.0) r = 0.0;  // guards against floor rounding at exact integers
        return WrapPosition(r);
    }
};

// min over integers M of |a - b - M|; lies in [0, 0.5].
inline double wrap_distance(WrapPosition a, WrapPosition b) {
    double d = std::fabs(a.value - b.value);
    return std::min(d, 1.0 - d);
}

inline double wrap_distance(double a, double b) {
    return wrap_distance(WrapPosition::wrap(a), WrapPosition::wrap(b));
}

// RL = 1/(2 K_L).
inline double rayleigh_length(int k_low) {
    if (k_low < 1) throw std::invalid_argument("rayleigh_length: k_low must be >= 1");
    return 1.0 / (2.0 * k_low);
}

inline double srf(int k_low, int k_high) {
    if (k_low < 1) throw std::invalid_argument("srf: k_low must be >= 1");
    if (k_high < k_low) throw std::invalid_argument("srf: k_high must be >= k_low");
    return static_cast<double>(k_high) / static_cast<double>(k_low);
}

// Integer-indexed sampling grid omega_k = k*step, k in [-k_max, k_max],
// optionally restricted to a mask of indices (partial sampling).
class FrequencyGrid {
  public:
    explicit FrequencyGrid(int k_max, std::optional<std::vector<int>> mask = std::nullopt,
                           double step = 1.0)
        : k_max_(k_max), step_(step) {
        if (k_max < 0) throw std::invalid_argument("FrequencyGrid: k_max must be >= 0");
        if (step != 1.0)
            throw std::invalid_argument("FrequencyGrid: only unit step grids are supported");
        if (mask) {
            auto m = *mask;
            if (m.empty()) throw std::invalid_argument("FrequencyGrid: mask must be nonempty");
            std::sort(m.begin(), m.end());
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (m[i] < -k_max || m[i] > k_max)
                    throw std::invalid_argument("FrequencyGrid: mask index out of range");
                if (i > 0 && m[i] == m[i - 1])
                    throw std::invalid_argument("FrequencyGrid: duplicate mask index");
            }
            mask_ = std::move(m);
        }
    }

    int k_max() const { return k_max_; }
    double step() const { return step_; }
    bool masked() const { return mask_.has_value(); }
    const std::vector<int>& mask() const { return *mask_; }

    std::size_t size() const {
        return mask_ ? mask_->size() : static_cast<std::size_t>(2 * k_max_ + 1);
    }

    // The k index of the i-th stored entry.
    int index(std::size_t i) const {
        return mask_ ? (*mask_)[i] : static_cast<int>(i) - k_max_;
    }

    std::vector<int> indices() const {
        std::vector<int> ks(size());
        for (std::size_t i = 0; i < ks.size(); ++i) ks[i] = index(i);
        return ks;
    }

    double omega(std::size_t i) const { return index(i) * step_; }

    friend bool operator==(const FrequencyGrid& a, const FrequencyGrid& b) {
        return a.k_max_ == b.k_max_ && a.mask_ == b.mask_;
    }

  private:
    int k_max_;
    double step_;
    std::optional<std::vector<int>> mask_;
};

// Complex samples g_k on a FrequencyGrid, stored lowest k first
// (array index = k + k_max on a full grid).
struct Measurement {
    FrequencyGrid grid;
    std::vector<cplx> values;

    Measurement(FrequencyGrid g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != grid.size())
            throw std::invalid_argument("Measurement: value count does not match grid");
    }

    explicit Measurement(FrequencyGrid g) : grid(std::move(g)), values(grid.size(), cplx{}) {}

    cplx at_k(int k) const {
        if (grid.masked()) {
            const auto& m = grid.mask();
            auto it = std::lower_bound(m.begin(), m.end(), k);
            if (it == m.end() || *it != k)
                throw std::out_of_range("Measurement: index not in mask");
            return values[static_cast<std::size_t>(it - m.begin())];
        }
        if (k < -grid.k_max() || k > grid.k_max())
            throw std::out_of_range("Measurement: index out of range");
        return values[static_cast<std::size_t>(k + grid.k_max())];
    }

    double norm() const {
        double s = 0.0;
        for (const auto& v : values) s += std::norm(v);
        return std::sqrt(s);
    }
};

// Central restriction to [-k_low, k_low]; satisfies Q o G_H = G_L exactly
// since it only copies entries. Masked inputs keep the surviving indices.
inline Measurement downsample(const Measurement& high, int k_low) {
    if (k_low > high.grid.k_max())
        throw std::invalid_argument("downsample: k_low exceeds input grid");
    if (k_low < 0) throw std::invalid_argument("downsample: k_low must be >= 0");
    if (!high.grid.masked()) {
        std::vector<cplx> out;
        out.reserve(static_cast<std::size_t>(2 * k_low + 1));
        int off = high.grid.k_max() - k_low;
        for (int i = 0; i <= 2 * k_low; ++i)
            out.push_back(high.values[static_cast<std::size_t>(off + i)]);
        return Measurement(FrequencyGrid(k_low), std::move(out));
    }
    std::vector<int> kept;
    std::vector<cplx> out;
    for (std::size_t i = 0; i < high.grid.size(); ++i) {
        int k = high.grid.index(i);
        if (k >= -k_low && k <= k_low) {
            kept.push_back(k);
            out.push_back(high.values[i]);
        }
    }
    if (kept.empty())
        throw std::invalid_argument("downsample: no masked indices survive restriction");
    return Measurement(FrequencyGrid(k_low, kept), std::move(out));
}

// Entries at the masked indices, order preserving.
inline Measurement apply_mask(const Measurement& m, const std::vector<int>& mask) {
    if (mask.empty()) throw std::invalid_argument("apply_mask: empty mask");
    FrequencyGrid g(m.grid.k_max(), mask);
    std::vector<cplx> out;
    out.reserve(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out.push_back(m.at_k(g.index(i)));
    return Measurement(std::move(g), std::move(out));
}

// --- CSV round-trip (header "k,re,im", 17 significant digits) ---

inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline void write_measurement_csv(const Measurement& m, std::ostream& os) {
    os << "k,re,im\n";
    for (std::size_t i = 0; i < m.values.size(); ++i)
        os << m.grid.index(i) << ',' << format_g17(m.values[i].real()) << ','
           << format_g17(m.values[i].imag()) << '\n';
}

inline void write_measurement_csv(const Measurement& m, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_measurement_csv(m, f);
}

inline Measurement read_measurement_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("k,re,im", 0) != 0)
        throw std::runtime_error("measurement csv: missing 'k,re,im' header");
    std::vector<int> ks;
    std::vector<cplx> vals;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        int k;
        double re, im;
        if (!std::getline(ss, tok, ',')) throw std::runtime_error("measurement csv: bad row");
        k = std::stoi(tok);
        if (!std::getline(ss, tok, ',')) throw std::runtime_error("measurement csv: bad row");
        re = std::stod(tok);
        if (!std::getline(ss, tok, ',')) throw std::runtime_error("measurement csv: bad row");
        im = std::stod(tok);
        ks.push_back(k);
        vals.push_back(cplx(re, im));
    }
    if (ks.empty()) throw std::runtime_error("measurement csv: no rows");
    int k_max = 0;
    for (int k : ks) k_max = std::max(k_max, std::abs(k));
    bool full = ks.size() == static_cast<std::size_t>(2 * k_max + 1);
    if (full) {
        for (std::size_t i = 0; i < ks.size(); ++i)
            if (ks[i] != static_cast<int>(i) - k_max) { full = false; break; }
    }
    if (full) return Measurement(FrequencyGrid(k_max), std::move(vals));
    return Measurement(FrequencyGrid(k_max, ks), std::move(vals));
}

inline Measurement read_measurement_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    return read_measurement_csv(f);
}

}  // namespace modelsr
