#pragma once

// Spiked tensor instances Y = lambda x^{(x)p} + G, spike priors, and the dense
// tensor contractions used by the power-method and unfolding baselines.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "kikuchi/combinat.hpp"
#include "kikuchi/spectral.hpp"

namespace kikuchi::model {

/// Entries Y_E for every p-subset E of [n], stored in colex rank order. The
/// Kikuchi algorithms never look at anything else.
struct SubsetTensor {
  std::uint32_t n = 0;
  std::uint32_t p = 0;
  std::vector<double> entries;

  static SubsetTensor zeros(std::uint32_t n, std::uint32_t p);

  std::size_t size() const { return entries.size(); }
  double at(std::span<const std::uint32_t> e) const;
};

/// Full n^p array in row-major order (last index fastest). Symmetric when it
/// comes out of `generate`; the odd-order certifier also uses it for
/// asymmetric tensors.
class DenseTensor {
public:
  DenseTensor() = default;
  DenseTensor(std::uint32_t n, std::uint32_t p, std::uint64_t cap_bytes = kDefaultCapBytes);

  static constexpr std::uint64_t kDefaultCapBytes = 2ULL << 30;

  std::uint32_t n() const { return n_; }
  std::uint32_t p() const { return p_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](std::size_t flat) { return values_[flat]; }
  double operator[](std::size_t flat) const { return values_[flat]; }
  double at(std::span<const std::uint32_t> index) const;
  std::size_t flat_index(std::span<const std::uint32_t> index) const;

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

private:
  std::uint32_t n_ = 0;
  std::uint32_t p_ = 0;
  std::vector<double> values_;
};

using DenseSymmetricTensor = DenseTensor;

class SpikePrior {
public:
  enum class Kind : std::uint8_t { Rademacher = 0, SphereUniform = 1, IidScaled = 2 };

  static SpikePrior rademacher();
  /// Uniform on the sphere of radius sqrt(n).
  static SpikePrior sphere_uniform();
  /// i.i.d. entries from a finite distribution; requires E[pi^2] = 1 within
  /// 1e-12 and probabilities summing to 1.
  static SpikePrior iid_scaled(std::vector<double> support, std::vector<double> probabilities);
  /// Same, after rescaling the support to unit second moment.
  static SpikePrior iid_normalized(std::vector<double> support, std::vector<double> probabilities);

  Kind kind() const { return kind_; }
  std::span<const double> support() const { return support_; }
  std::span<const double> probabilities() const { return probabilities_; }
  double second_moment() const;

  std::vector<double> sample(std::uint32_t n, std::uint64_t seed) const;

private:
  SpikePrior(Kind kind, std::vector<double> support, std::vector<double> probabilities)
      : kind_(kind), support_(std::move(support)), probabilities_(std::move(probabilities)) {}

  Kind kind_;
  std::vector<double> support_;
  std::vector<double> probabilities_;
};

struct Instance {
  std::vector<double> spike;
  SubsetTensor tensor;
  std::optional<DenseTensor> dense;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  SpikePrior::Kind prior = SpikePrior::Kind::Rademacher;
};

struct GenerateOptions {
  bool dense = false;
  std::uint64_t dense_cap_bytes = DenseTensor::kDefaultCapBytes;
};

/// Draws x from `prior` and Y_E = lambda x^E + G_E with G_E i.i.d. N(0, 1).
/// With `dense`, the noise is the symmetrization (1/sqrt(p!)) sum_pi G~^pi of
/// an i.i.d. Gaussian array, and the distinct-index entries of the dense
/// tensor are copied into the subset view.
Instance generate(std::uint32_t n, std::uint32_t p, double lambda, const SpikePrior& prior,
                  std::uint64_t seed, const GenerateOptions& options = {});

/// |<a, b>| / (||a|| ||b||).
double correlation(std::span<const double> a, std::span<const double> b);

/// Y{u}_i = sum Y_{i j_1 ... j_{p-1}} u_{j_1} ... u_{j_{p-1}}, in O(n^p).
std::vector<double> contract(const DenseTensor& y, std::span<const double> u);

/// One tensor power-method step from a warm start: x^ = Y{u}.
std::vector<double> boost(const Instance& instance, std::span<const double> u);

/// u <- Y{u} repeated `iters` times, normalized after every step.
std::vector<double> tensor_power_method(const DenseTensor& y, std::span<const double> u0,
                                        unsigned iters);

/// Leading eigenvector of M M^T for the n x n^2 flattening M_{i,jk} = Y_ijk.
/// Sign fixed so that the largest-magnitude coordinate is positive.
std::vector<double> tensor_unfold(const DenseTensor& y, const spectral::EigOptions& opts = {});

/// Rank-one tensor x^{(x)p} (dense).
DenseTensor rank_one(std::span<const double> x, std::uint32_t p);

/// Flip the sign of a vector so its largest-magnitude coordinate is positive.
void canonicalize_sign(std::span<double> v);

// ---------------------------------------------------------------------------
// Binary formats (little-endian).
//
// Instance:  "KIKT" u32 version | u32 n | u32 p | f64 lambda | u64 seed |
//            u8 prior tag | u8 flags (bit 0: spike appended) |
//            C(n,p) x f64 entries in colex rank order | [n x f64 spike]
// Dense:     "KIKD" u32 version | u32 n | u32 p | n^p x f64 row-major

inline constexpr std::uint32_t kFormatVersion = 1;

void write_instance(std::ostream& out, const Instance& instance, bool with_spike);
Instance read_instance(std::istream& in);
void write_instance_file(const std::filesystem::path& path, const Instance& instance,
                         bool with_spike);
Instance read_instance_file(const std::filesystem::path& path);

void write_dense(std::ostream& out, const DenseTensor& tensor);
DenseTensor read_dense(std::istream& in);
void write_dense_file(const std::filesystem::path& path, const DenseTensor& tensor);
DenseTensor read_dense_file(const std::filesystem::path& path);

}  // namespace kikuchi::model
