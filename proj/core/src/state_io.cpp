#include "gsa/state_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "gsa/errors.hpp"

namespace gsa {

namespace {

constexpr std::array<char, 8> kMagic{'G', 'S', 'A', 'D', 'U', 'M', 'P', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> bytes{};
    for (int i = 0; i < 8; ++i) bytes[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(bytes.data(), 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
    std::array<unsigned char, 8> bytes{};
    if (!in.read(reinterpret_cast<char*>(bytes.data()), 8)) throw ConfigError("state", "truncated state dump");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[static_cast<std::size_t>(i)];
    return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void write_state(std::ostream& out, const Basis& basis, const SystemState& state) {
    if (static_cast<std::size_t>(state.amplitudes.size()) != basis.size())
        throw ConfigError("state", "state dimension does not match the basis");
    out.write(kMagic.data(), kMagic.size());
    put_u64(out, basis.hash());
    put_f64(out, state.time);
    put_u64(out, static_cast<std::uint64_t>(state.amplitudes.size()));
    for (const auto& a : state.amplitudes) {
        put_f64(out, a.real());
        put_f64(out, a.imag());
    }
}

void write_state(const std::string& path, const Basis& basis, const SystemState& state) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("output", "cannot open '" + path + "' for writing");
    write_state(out, basis, state);
}

SystemState read_state(std::istream& in, const Basis& basis) {
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic)
        throw ConfigError("state", "not a state dump (bad magic)");
    if (get_u64(in) != basis.hash()) throw ConfigError("state", "state dump was written for a different basis");
    SystemState state;
    state.time = get_f64(in);
    const auto n = get_u64(in);
    if (n != basis.size()) throw ConfigError("state", "state dump length does not match the basis");
    state.amplitudes.resize(static_cast<Eigen::Index>(n));
    for (std::uint64_t i = 0; i < n; ++i) {
        const double re = get_f64(in);
        const double im = get_f64(in);
        state.amplitudes[static_cast<Eigen::Index>(i)] = {re, im};
    }
    return state;
}

SystemState read_state(const std::string& path, const Basis& basis) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("state", "cannot open '" + path + "'");
    return read_state(in, basis);
}

}  // namespace gsa
