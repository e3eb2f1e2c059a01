#include "qmeas/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "qmeas/errors.hpp"

namespace qmeas::io {

namespace {

double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(ErrorKind::Io, fmt::format("cannot parse number '{}'", s));
    }
    return v;
}

/// Value of the whitespace-separated `key=value` token in a header line.
std::string_view header_field(std::string_view line, std::string_view key) {
    std::size_t pos = 0;
    while (pos < line.size()) {
        const auto start = line.find_first_not_of(" \t#", pos);
        if (start == std::string_view::npos) break;
        auto end = line.find_first_of(" \t\r", start);
        if (end == std::string_view::npos) end = line.size();
        const auto token = line.substr(start, end - start);
        if (token.size() > key.size() && token.substr(0, key.size()) == key && token[key.size()] == '=') {
            return token.substr(key.size() + 1);
        }
        pos = end;
    }
    throw Error(ErrorKind::Io, fmt::format("distribution header lacks '{}'", key));
}

template <typename T>
void put_le(std::ostream& out, T value) {
    static_assert(std::is_integral_v<T>);
    std::array<char, sizeof(T)> bytes{};
    for (std::size_t k = 0; k < sizeof(T); ++k) {
        bytes[k] = static_cast<char>((value >> (8 * k)) & 0xff);
    }
    out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
    std::array<unsigned char, sizeof(T)> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
        throw Error(ErrorKind::Io, "truncated joint-state file");
    }
    T value = 0;
    for (std::size_t k = 0; k < sizeof(T); ++k) {
        value |= static_cast<T>(bytes[k]) << (8 * k);
    }
    return value;
}

void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

constexpr std::string_view kMagic = "QMO1";

}  // namespace

void write_distribution_csv(std::ostream& out, const GriddedDistribution& f) {
    out << fmt::format("# origin={:.17g} step={:.17g} n={}\n", f.origin(), f.step(), f.size());
    const auto v = f.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        out << fmt::format("{:.17g},{:.17g}\n", f.coordinate(i), v[i]);
    }
}

GriddedDistribution read_distribution_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("#", 0) != 0) {
        throw Error(ErrorKind::Io, "distribution CSV must start with a '# origin=... step=... n=...' line");
    }
    const double origin = parse_double(header_field(line, "origin"));
    const double step = parse_double(header_field(line, "step"));
    const auto n_field = header_field(line, "n");
    std::size_t n = 0;
    if (std::from_chars(n_field.data(), n_field.data() + n_field.size(), n).ec != std::errc{}) {
        throw Error(ErrorKind::Io, "bad sample count in distribution header");
    }
    std::vector<double> values;
    values.reserve(n);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw Error(ErrorKind::Io, fmt::format("malformed distribution row '{}'", line));
        }
        values.push_back(parse_double(std::string_view(line).substr(comma + 1)));
    }
    if (values.size() != n) {
        throw Error(ErrorKind::Io, fmt::format("header promises {} rows, found {}", n, values.size()));
    }
    return GriddedDistribution::make(origin, step, std::move(values));
}

void save_distribution_csv(const std::filesystem::path& path, const GriddedDistribution& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, fmt::format("cannot open {} for writing", path.string()));
    write_distribution_csv(out, f);
    if (!out) throw Error(ErrorKind::Io, fmt::format("failed writing {}", path.string()));
}

GriddedDistribution load_distribution_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open {}", path.string()));
    return read_distribution_csv(in);
}

std::vector<TrajectoryRow> trajectory_rows(const InteractionParams& params, std::span<const double> w_grid) {
    std::vector<TrajectoryRow> rows;
    for (const auto& pt : trajectory(params, w_grid)) {
        const auto b = evaluate_bounds(NormalizedMoments{pt.epsilon_tilde, pt.eta_tilde});
        rows.push_back({pt.w, pt.epsilon_tilde, pt.eta_tilde, b.hur_lhs, b.our_lhs, b.circle_lhs});
    }
    return rows;
}

void write_trajectory_csv(std::ostream& out, std::span<const TrajectoryRow> rows) {
    out << kTrajectoryHeader << '\n';
    for (const auto& r : rows) {
        out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.w, r.eps_tilde, r.eta_tilde,
                           r.hur_lhs, r.our_lhs, r.circle_lhs);
    }
}

std::vector<TrajectoryRow> read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kTrajectoryHeader) {
        throw Error(ErrorKind::Io, "trajectory CSV header mismatch");
    }
    std::vector<TrajectoryRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<double, 6> v{};
        std::string_view rest = line;
        for (std::size_t k = 0; k < v.size(); ++k) {
            const auto comma = rest.find(',');
            if ((comma == std::string_view::npos) != (k + 1 == v.size())) {
                throw Error(ErrorKind::Io, fmt::format("malformed trajectory row '{}'", line));
            }
            v[k] = parse_double(rest.substr(0, comma));
            if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
        }
        rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5]});
    }
    return rows;
}

void write_joint_binary(std::ostream& out, const JointWavefunction& joint) {
    out.write(kMagic.data(), kMagic.size());
    for (const Grid1D* axis : {&joint.object_axis(), &joint.probe_axis()}) {
        put_f64(out, axis->origin);
        put_f64(out, axis->step);
        put_le(out, static_cast<std::uint32_t>(axis->count));
    }
    for (const auto& z : joint.amplitudes()) {
        put_f64(out, z.real());
        put_f64(out, z.imag());
    }
    if (!out) throw Error(ErrorKind::Io, "failed writing joint state");
}

JointWavefunction read_joint_binary(std::istream& in, Basis basis) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || std::string_view(magic.data(), magic.size()) != kMagic) {
        throw Error(ErrorKind::Io, "not a QMO1 joint-state file");
    }
    std::array<Grid1D, 2> axes;
    for (auto& axis : axes) {
        axis.origin = get_f64(in);
        axis.step = get_f64(in);
        axis.count = get_le<std::uint32_t>(in);
    }
    std::vector<Complex> amps(axes[0].count * axes[1].count);
    for (auto& z : amps) {
        const double re = get_f64(in);
        const double im = get_f64(in);
        z = {re, im};
    }
    return JointWavefunction::make(axes[0], axes[1], std::move(amps), basis);
}

}  // namespace qmeas::io
