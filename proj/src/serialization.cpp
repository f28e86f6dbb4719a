#include "simopo/serialization.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "simopo/errors.hpp"

namespace simopo {

static_assert(std::endian::native == std::endian::little, "binary container assumes a little-endian host");

namespace {

constexpr std::uint32_t kVersion = 1;
constexpr std::array<char, 8> kKernelMagic{'S', 'I', 'M', 'O', 'P', 'O', 'K', '1'};
constexpr std::array<char, 8> kDecompositionMagic{'S', 'I', 'M', 'O', 'P', 'O', 'D', '1'};
// Refuse absurd sizes before allocating.
constexpr std::uint64_t kMaxEntries = std::uint64_t{1} << 32;

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in, const char* what) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw DataError(fmt::format("truncated binary container while reading {}", what));
  }
  return value;
}

void put_doubles(std::ostream& out, const double* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
}

void get_doubles(std::istream& in, double* data, std::size_t count, const char* what) {
  if (!in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double)))) {
    throw DataError(fmt::format("truncated binary container while reading {}", what));
  }
}

struct Header {
  TransverseGrid grid;
  KernelSpace kernel_space;
  bool thin;
  std::string id;
};

void write_header(std::ostream& out, const std::array<char, 8>& magic, const TransverseGrid& grid,
                  KernelSpace kernel_space, bool thin, const std::string& id) {
  out.write(magic.data(), magic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(dimension_count(grid.dimensionality())));
  put<std::uint32_t>(out, grid.space() == Space::Position ? 0u : 1u);
  put<std::uint32_t>(out, kernel_space == KernelSpace::NearField ? 0u : 1u);
  put<std::uint32_t>(out, thin ? 1u : 0u);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.points_per_axis()));
  put<double>(out, grid.extent());
  put<std::uint64_t>(out, id.size());
  out.write(id.data(), static_cast<std::streamsize>(id.size()));
}

Header read_header(std::istream& in, const std::array<char, 8>& magic) {
  std::array<char, 8> seen{};
  if (!in.read(seen.data(), seen.size())) throw DataError("truncated binary container (no magic)");
  if (seen != magic) {
    throw DataError(fmt::format("bad magic '{}', expected '{}'", std::string(seen.data(), seen.size()),
                                std::string(magic.data(), magic.size())));
  }
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kVersion) throw DataError(fmt::format("unsupported container version {}", version));
  const auto dim = get<std::uint32_t>(in, "dimensionality");
  const auto space = get<std::uint32_t>(in, "grid space");
  const auto kspace = get<std::uint32_t>(in, "kernel space");
  const auto thin = get<std::uint32_t>(in, "thin flag");
  const auto n = get<std::uint32_t>(in, "points per axis");
  const auto extent = get<double>(in, "extent");
  const auto id_length = get<std::uint64_t>(in, "id length");
  if ((dim != 1 && dim != 2) || space > 1 || kspace > 1 || thin > 1 || n == 0 || n > (1u << 20) ||
      id_length > (1u << 16)) {
    throw DataError("corrupt binary container header");
  }
  std::string id(id_length, '\0');
  if (id_length > 0 && !in.read(id.data(), static_cast<std::streamsize>(id_length))) {
    throw DataError("truncated binary container while reading id");
  }
  try {
    TransverseGrid grid(dim == 1 ? Dimensionality::One : Dimensionality::Two, extent, static_cast<int>(n),
                        space == 0 ? Space::Position : Space::Wavevector);
    return {grid, kspace == 0 ? KernelSpace::NearField : KernelSpace::FarField, thin == 1, std::move(id)};
  } catch (const DomainError& e) {
    throw DataError(std::string("corrupt binary container grid: ") + e.what());
  }
}

std::pair<Eigen::Index, Eigen::Index> read_shape(std::istream& in, std::size_t expected) {
  const auto rows = get<std::uint64_t>(in, "rows");
  const auto cols = get<std::uint64_t>(in, "cols");
  if (rows != expected || cols != expected || rows * cols > kMaxEntries) {
    throw DataError(fmt::format("matrix shape {}x{} does not match the grid size {}", rows, cols, expected));
  }
  return {static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

void write_row_major(std::ostream& out, const Eigen::MatrixXd& m) {
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major = m;
  put_doubles(out, row_major.data(), static_cast<std::size_t>(row_major.size()));
}

Eigen::MatrixXd read_row_major(std::istream& in, std::size_t expected, const char* what) {
  const auto [rows, cols] = read_shape(in, expected);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major(rows, cols);
  get_doubles(in, row_major.data(), static_cast<std::size_t>(row_major.size()), what);
  return row_major;
}

void check_stream(const std::ostream& out, const char* what) {
  if (!out) throw DataError(fmt::format("failed to write {}", what));
}

template <typename Fn>
void with_output_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(fmt::format("cannot open '{}' for writing", path.string()));
  fn(out);
  out.flush();
  check_stream(out, path.string().c_str());
}

template <typename Fn>
auto with_input_file(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}' for reading", path.string()));
  return fn(in);
}

}  // namespace

void write_kernel_binary(const KernelMatrix& kernel, std::ostream& out) {
  write_header(out, kKernelMagic, kernel.grid, kernel.space, kernel.thin_crystal, kernel.id);
  write_row_major(out, kernel.entries);
  check_stream(out, "kernel");
}

KernelMatrix read_kernel_binary(std::istream& in) {
  Header h = read_header(in, kKernelMagic);
  Eigen::MatrixXd entries = read_row_major(in, h.grid.size(), "kernel entries");
  return {h.grid, h.kernel_space, std::move(entries), std::move(h.id), h.thin};
}

void write_decomposition_binary(const ModeDecomposition& decomp, std::ostream& out) {
  write_header(out, kDecompositionMagic, decomp.grid,
               decomp.grid.space() == Space::Position ? KernelSpace::NearField : KernelSpace::FarField, false,
               decomp.kernel_id);
  put<double>(out, decomp.lambda_max);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(decomp.eigenvalues.size()));
  put_doubles(out, decomp.eigenvalues.data(), static_cast<std::size_t>(decomp.eigenvalues.size()));
  write_row_major(out, decomp.eigenvectors);
  check_stream(out, "decomposition");
}

ModeDecomposition read_decomposition_binary(std::istream& in) {
  Header h = read_header(in, kDecompositionMagic);
  const auto lambda_max = get<double>(in, "lambda_max");
  const auto count = get<std::uint64_t>(in, "eigenvalue count");
  if (count != h.grid.size()) throw DataError("eigenvalue count does not match the grid size");
  Eigen::VectorXd values(static_cast<Eigen::Index>(count));
  get_doubles(in, values.data(), count, "eigenvalues");
  Eigen::MatrixXd vectors = read_row_major(in, h.grid.size(), "eigenvectors");
  return {std::move(h.id), h.grid, std::move(values), std::move(vectors), lambda_max};
}

void save_kernel(const KernelMatrix& kernel, const std::filesystem::path& path) {
  with_output_file(path, [&](std::ostream& out) { write_kernel_binary(kernel, out); });
}

KernelMatrix load_kernel(const std::filesystem::path& path) {
  return with_input_file(path, [](std::istream& in) { return read_kernel_binary(in); });
}

void save_decomposition(const ModeDecomposition& decomp, const std::filesystem::path& path) {
  with_output_file(path, [&](std::ostream& out) { write_decomposition_binary(decomp, out); });
}

ModeDecomposition load_decomposition(const std::filesystem::path& path) {
  return with_input_file(path, [](std::istream& in) { return read_decomposition_binary(in); });
}

void write_kernel_csv(const KernelMatrix& kernel, std::ostream& out) {
  fmt::memory_buffer line;
  for (Eigen::Index i = 0; i < kernel.entries.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < kernel.entries.cols(); ++j) {
      if (j > 0) line.push_back(',');
      fmt::format_to(std::back_inserter(line), "{:.17g}", kernel.entries(i, j));
    }
    line.push_back('\n');
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
  check_stream(out, "kernel CSV");
}

void write_modes_csv(const ModeDecomposition& decomp, const ModeVariances& variances, std::ostream& out) {
  if (variances.variance_minus.size() != decomp.eigenvalues.size()) {
    throw UsageError("mode variances do not match the decomposition");
  }
  out << "k,lambda,variance_minus,variance_plus\n";
  for (Eigen::Index k = 0; k < decomp.eigenvalues.size(); ++k) {
    out << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", k, decomp.eigenvalues(k), variances.variance_minus(k),
                       variances.variance_plus(k));
  }
  check_stream(out, "modes CSV");
}

}  // namespace simopo
