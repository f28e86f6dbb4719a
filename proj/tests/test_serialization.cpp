#include <doctest.h>

#include <random>
#include <sstream>

#include "simopo/errors.hpp"
#include "simopo/serialization.hpp"

using namespace simopo;

namespace {

KernelMatrix random_kernel(std::mt19937_64& rng, Dimensionality dim, int n) {
  const TransverseGrid g(dim, 1.3e-3, n, Space::Position);
  const auto m = static_cast<Eigen::Index>(g.size());
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = normal(rng);
  Eigen::MatrixXd s = a + a.transpose();
  return {g, KernelSpace::NearField, s, "random:" + std::to_string(n), n % 2 == 0};
}

}  // namespace

TEST_SUITE("serialization") {
  TEST_CASE("kernel round trip is exact") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 6; ++trial) {
      const KernelMatrix k = random_kernel(rng, trial % 2 ? Dimensionality::Two : Dimensionality::One, 3 + trial);
      std::stringstream buf;
      write_kernel_binary(k, buf);
      const KernelMatrix back = read_kernel_binary(buf);
      CHECK(back.grid == k.grid);
      CHECK(back.space == k.space);
      CHECK(back.id == k.id);
      CHECK(back.thin_crystal == k.thin_crystal);
      CHECK((back.entries.array() == k.entries.array()).all());
    }
  }

  TEST_CASE("decomposition round trip is exact") {
    std::mt19937_64 rng(11);
    const KernelMatrix k = random_kernel(rng, Dimensionality::One, 9);
    const ModeDecomposition d = eigendecompose(k);
    std::stringstream buf;
    write_decomposition_binary(d, buf);
    const ModeDecomposition back = read_decomposition_binary(buf);
    CHECK(back.kernel_id == d.kernel_id);
    CHECK(back.lambda_max == d.lambda_max);
    CHECK((back.eigenvalues.array() == d.eigenvalues.array()).all());
    CHECK((back.eigenvectors.array() == d.eigenvectors.array()).all());
  }

  TEST_CASE("corrupt containers are data errors") {
    std::mt19937_64 rng(3);
    const KernelMatrix k = random_kernel(rng, Dimensionality::One, 5);
    std::stringstream buf;
    write_kernel_binary(k, buf);
    const std::string bytes = buf.str();

    std::string bad_magic = bytes;
    bad_magic[3] = 'X';
    std::istringstream a(bad_magic);
    CHECK_THROWS_AS(read_kernel_binary(a), DataError);

    std::string bad_version = bytes;
    bad_version[8] = 9;
    std::istringstream b(bad_version);
    CHECK_THROWS_AS(read_kernel_binary(b), DataError);

    for (std::size_t cut : {std::size_t{4}, std::size_t{20}, bytes.size() - 1}) {
      std::istringstream c(bytes.substr(0, cut));
      CHECK_THROWS_AS(read_kernel_binary(c), DataError);
    }

    std::istringstream wrong_kind(bytes);
    CHECK_THROWS_AS(read_decomposition_binary(wrong_kind), DataError);
  }

  TEST_CASE("kernel CSV keeps full precision") {
    const TransverseGrid g(Dimensionality::One, 1.0, 2, Space::Position);
    Eigen::MatrixXd m(2, 2);
    m << 0.1, 1.0 / 3.0, 1.0 / 3.0, -2e-300;
    std::ostringstream out;
    write_kernel_csv({g, KernelSpace::NearField, m, "x", false}, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    const auto comma = line.find(',');
    CHECK(std::stod(line.substr(comma + 1)) == 1.0 / 3.0);
  }

  TEST_CASE("modes CSV header") {
    const TransverseGrid g(Dimensionality::One, 1.0, 2, Space::Position);
    const ModeDecomposition d = eigendecompose(Eigen::MatrixXd::Identity(2, 2), g);
    std::ostringstream out;
    write_modes_csv(d, mode_variances(d, 0.5), out);
    CHECK(out.str().rfind("k,lambda,variance_minus,variance_plus\n", 0) == 0);
  }
}
