#include "nsbesov/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "nsbesov/errors.hpp"

namespace nsbesov {

namespace {

constexpr char kMagic[4] = {'N', 'S', 'B', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_raw(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw io_error("short-read: truncated snapshot");
}

void save_components(const std::string& path, const Grid& grid,
                     const std::vector<const SpectralField*>& comps) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("io-error: cannot open '" + path + "' for writing");
    out.write(kMagic, 4);
    write_raw(out, kVersion);
    write_raw(out, static_cast<std::uint8_t>(grid.dim()));
    write_raw(out, static_cast<std::uint8_t>(comps.size()));
    write_raw(out, static_cast<std::uint64_t>(grid.points_per_axis()));
    write_raw(out, grid.box_length());
    for (const SpectralField* f : comps) {
        for (const cplx& z : f->coeffs()) {
            write_raw(out, z.real());
            write_raw(out, z.imag());
        }
    }
    if (!out) throw io_error("io-error: write failed for '" + path + "'");
}

}  // namespace

VectorField Snapshot::as_vector() const {
    if (!is_vector()) throw precondition_error("snapshot is not a vector field");
    VectorField v(grid, true);
    for (int d = 0; d < grid.dim(); ++d) v[d] = components[d];
    return v;
}

const SpectralField& Snapshot::as_scalar() const {
    if (components.empty()) throw precondition_error("snapshot is empty");
    return components[0];
}

void save_snapshot(const VectorField& field, const std::string& path) {
    std::vector<const SpectralField*> ptrs;
    for (int d = 0; d < field.ncomp(); ++d) ptrs.push_back(&field[d]);
    save_components(path, field.grid(), ptrs);
}

void save_snapshot(const SpectralField& field, const std::string& path) {
    save_components(path, field.grid(), {&field});
}

void save_snapshot(const Snapshot& snap, const std::string& path) {
    std::vector<const SpectralField*> ptrs;
    for (const auto& c : snap.components) ptrs.push_back(&c);
    save_components(path, snap.grid, ptrs);
}

Snapshot load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("io-error: cannot open '" + path + "'");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) throw io_error("bad-magic: not a snapshot file");
    std::uint32_t version = 0;
    read_raw(in, version);
    if (version != kVersion)
        throw io_error("version-mismatch: snapshot version " + std::to_string(version));
    std::uint8_t ndim = 0, ncomp = 0;
    read_raw(in, ndim);
    read_raw(in, ncomp);
    std::uint64_t N = 0;
    read_raw(in, N);
    double L = 0.0;
    read_raw(in, L);

    Snapshot snap;
    snap.grid = make_grid(ndim, static_cast<int>(N), L);
    if (ncomp == 0) throw io_error("bad-magic: snapshot carries no components");
    snap.components.reserve(ncomp);
    for (int c = 0; c < ncomp; ++c) {
        SpectralField f(snap.grid, true);
        for (cplx& z : f.coeffs()) {
            double re = 0.0, im = 0.0;
            read_raw(in, re);
            read_raw(in, im);
            z = cplx(re, im);
        }
        f.set_is_real(f.hermitian_within(1e-12));
        snap.components.push_back(std::move(f));
    }
    return snap;
}

}  // namespace nsbesov
