#pragma once

#include <string>
#include <vector>

#include "nsbesov/field.hpp"

namespace nsbesov {

// Binary snapshot format (little-endian), see docs/snapshot-format.md:
//   magic "NSBF" | u32 version=1 | u8 ndim | u8 ncomponents | u64 N | f64 L |
//   ncomponents x N^ndim complex coefficients, interleaved f64 (re, im),
//   row-major DFT wavenumber order (full spectrum; the Hermitian-redundant
//   half is stored as-is).

struct Snapshot {
    Grid grid;
    std::vector<SpectralField> components;

    bool is_vector() const { return static_cast<int>(components.size()) == grid.dim(); }
    bool is_scalar() const { return components.size() == 1; }

    VectorField as_vector() const;
    const SpectralField& as_scalar() const;
};

void save_snapshot(const VectorField& field, const std::string& path);
void save_snapshot(const SpectralField& field, const std::string& path);
void save_snapshot(const Snapshot& snap, const std::string& path);

Snapshot load_snapshot(const std::string& path);

}  // namespace nsbesov
