#include "topoproj/som.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "io_binary.hpp"
#include "topoproj/rng.hpp"

namespace topoproj {

Scalar SomConfig::effective_radius_start() const {
  if (radius_start > 0.0) return radius_start;
  return static_cast<Scalar>(std::max(rows, cols)) / 2.0;
}

void SomConfig::validate() const {
  if (rows < 2 || cols < 2) throw std::invalid_argument("SomConfig: rows and cols must be >= 2");
  if (!(lr_end > 0.0 && lr_end <= lr_start))
    throw std::invalid_argument("SomConfig: need 0 < lr_end <= lr_start");
  if (!(radius_end > 0.0 && radius_end <= effective_radius_start()))
    throw std::invalid_argument("SomConfig: need 0 < radius_end <= radius_start");
  if (iterations < 1) throw std::invalid_argument("SomConfig: iterations must be positive");
}

Som train_som(const Eigen::Ref<const Matrix>& x, const SomConfig& config) {
  config.validate();
  if (x.rows() < 1) throw std::invalid_argument("train_som: empty dataset");
  if (!x.allFinite()) throw std::invalid_argument("train_som: non-finite input");

  const Index n_units = config.rows * config.cols;
  const Index dim = x.cols();
  Rng rng(config.seed);

  Som som;
  som.config = config;
  som.dim = dim;
  som.codebook.resize(n_units, dim);

  const RowVector lo = x.colwise().minCoeff();
  const RowVector hi = x.colwise().maxCoeff();
  for (Index u = 0; u < n_units; ++u)
    for (Index f = 0; f < dim; ++f) som.codebook(u, f) = rng.uniform(lo(f), hi(f));

  // Integer grid coordinates per unit, used for the neighborhood kernel.
  Vector grid_r(n_units), grid_c(n_units);
  for (Index u = 0; u < n_units; ++u) {
    grid_r(u) = static_cast<Scalar>(u / config.cols);
    grid_c(u) = static_cast<Scalar>(u % config.cols);
  }

  const Scalar lr0 = config.lr_start, lr1 = config.lr_end;
  const Scalar rad0 = config.effective_radius_start(), rad1 = config.radius_end;
  const Scalar steps = static_cast<Scalar>(std::max<Index>(config.iterations - 1, 1));

  Vector dist2(n_units), gain(n_units);
  for (Index t = 0; t < config.iterations; ++t) {
    const Scalar frac = static_cast<Scalar>(t) / steps;
    const Scalar lr = lr0 + (lr1 - lr0) * frac;
    const Scalar radius = rad0 + (rad1 - rad0) * frac;

    const Index i = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(x.rows())));
    const auto sample = x.row(i);

    dist2 = (som.codebook.rowwise() - sample).rowwise().squaredNorm();
    Index best = 0;
    dist2.minCoeff(&best);

    gain = (-((grid_r.array() - grid_r(best)).square() + (grid_c.array() - grid_c(best)).square()) /
            (2.0 * radius * radius))
               .exp() *
           lr;
    som.codebook += gain.asDiagonal() * ((-som.codebook).rowwise() + sample);
  }
  return som;
}

Index bmu(const Som& som, const Eigen::Ref<const RowVector>& x) {
  if (x.size() != som.dim)
    throw std::invalid_argument("bmu: expected " + std::to_string(som.dim) + " features, got " +
                                std::to_string(x.size()));
  if (!x.allFinite()) throw std::invalid_argument("bmu: non-finite query");
  Index best = 0;
  (som.codebook.rowwise() - x).rowwise().squaredNorm().minCoeff(&best);
  return best;
}

std::vector<Index> bmu_rows(const Som& som, const Eigen::Ref<const Matrix>& x) {
  std::vector<Index> out(static_cast<std::size_t>(x.rows()));
  for (Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = bmu(som, x.row(i));
  return out;
}

Scalar quantization_error(const Som& som, const Eigen::Ref<const Matrix>& x) {
  if (x.rows() < 1) throw std::invalid_argument("quantization_error: empty dataset");
  Scalar total = 0.0;
  for (Index i = 0; i < x.rows(); ++i)
    total += (som.codebook.row(bmu(som, x.row(i))) - x.row(i)).norm();
  return total / static_cast<Scalar>(x.rows());
}

namespace {
constexpr char kSomMagic[5] = "TPSM";
constexpr std::uint32_t kSomVersion = 1;
}  // namespace

void write_som(std::ostream& out, const Som& som) {
  using namespace detail;
  out.write(kSomMagic, 4);
  write_u32(out, kSomVersion);
  write_i64(out, som.config.rows);
  write_i64(out, som.config.cols);
  write_f64(out, som.config.lr_start);
  write_f64(out, som.config.lr_end);
  write_f64(out, som.config.radius_start);
  write_f64(out, som.config.radius_end);
  write_i64(out, som.config.iterations);
  write_u64(out, som.config.seed);
  write_i64(out, som.dim);
  write_matrix(out, som.codebook);
}

Som read_som(std::istream& in) {
  using namespace detail;
  expect_magic(in, kSomMagic, "map");
  const std::uint32_t version = read_u32(in);
  if (version != kSomVersion)
    throw std::runtime_error("unsupported map file version " + std::to_string(version));
  Som som;
  som.config.rows = read_i64(in);
  som.config.cols = read_i64(in);
  som.config.lr_start = read_f64(in);
  som.config.lr_end = read_f64(in);
  som.config.radius_start = read_f64(in);
  som.config.radius_end = read_f64(in);
  som.config.iterations = read_i64(in);
  som.config.seed = read_u64(in);
  som.dim = read_i64(in);
  som.codebook = read_matrix(in);
  if (som.codebook.rows() != som.config.rows * som.config.cols || som.codebook.cols() != som.dim)
    throw std::runtime_error("map file codebook shape does not match its header");
  return som;
}

void save_som(const Som& som, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_som(out, som);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

Som load_som(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return read_som(in);
}

}  // namespace topoproj
