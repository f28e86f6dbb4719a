#pragma once

#include <filesystem>
#include <iosfwd>

#include "simopo/kernels.hpp"
#include "simopo/modes.hpp"

namespace simopo {

/// Binary container, little-endian, version 1:
///   8-byte magic ("SIMOPOK1" kernel, "SIMOPOD1" decomposition)
///   u32 version, u32 dimensionality, u32 grid space, u32 kernel space, u32 thin flag,
///   u32 points per axis, f64 extent, u64 id length, id bytes,
///   then the payload: kernel = u64 rows, u64 cols, row-major f64;
///   decomposition = f64 lambda_max, u64 count, eigenvalues, u64 rows, u64 cols,
///   row-major eigenvectors.
/// Readers throw DataError on a bad magic, version, header or truncated payload.
void write_kernel_binary(const KernelMatrix& kernel, std::ostream& out);
KernelMatrix read_kernel_binary(std::istream& in);

void write_decomposition_binary(const ModeDecomposition& decomp, std::ostream& out);
ModeDecomposition read_decomposition_binary(std::istream& in);

void save_kernel(const KernelMatrix& kernel, const std::filesystem::path& path);
KernelMatrix load_kernel(const std::filesystem::path& path);
void save_decomposition(const ModeDecomposition& decomp, const std::filesystem::path& path);
ModeDecomposition load_decomposition(const std::filesystem::path& path);

/// Kernel entries as CSV, one matrix row per line, %.17g.
void write_kernel_csv(const KernelMatrix& kernel, std::ostream& out);

/// Columns k, lambda, variance_minus, variance_plus.
void write_modes_csv(const ModeDecomposition& decomp, const ModeVariances& variances, std::ostream& out);

}  // namespace simopo
