#pragma once

// Supercharge family Q(phi) = sum_{|n|<=Nc} psi_n (x) e_{-n} + (phi/2pi) psi_0 (x) 1 on the
// spinor module times the truncated Fock space, its spectral flow around the circle,
// and the resulting nontriviality certificate.

#include "gerbeflow/eigen.hpp"
#include "gerbeflow/fock.hpp"
#include "gerbeflow/numbers.hpp"
#include "gerbeflow/sparse.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gerbeflow::spectral {

struct SuperchargeConfig {
  fock::ModeWindow window{-4, 4};
  int cutoff = 2;                      // Nc
  std::optional<int> max_excitation;  // Fock basis truncation; full window when empty
  std::size_t grid = 64;               // intervals over [0, 2pi]
  int rank = 1;                        // block-diagonal copies
  std::optional<int> guard;            // compression margin, defaults to cutoff

  int margin() const { return guard.value_or(cutoff); }
  void validate() const;  // throws std::invalid_argument
};

// Connected component of the compressed operator. Sealed blocks are closed under the
// untruncated Q, so their spectrum is exact.
struct Block {
  std::vector<std::size_t> states;  // indices into the compressed space, ascending
  int charge = 0;
  int copy = 0;  // which of the rank copies
  bool sealed = false;
};

class SuperchargeModel {
 public:
  explicit SuperchargeModel(SuperchargeConfig cfg);

  const SuperchargeConfig& config() const { return cfg_; }
  const fock::FockBasis& fock_basis() const { return *fock_; }
  std::shared_ptr<const fock::FockBasis> fock_basis_ptr() const { return fock_; }
  const fock::SpinorBasis& spinor_basis() const { return spinor_; }

  // Product index s * fock_size + f, before compression and without rank copies.
  std::size_t full_dim() const { return spinor_.size() * fock_->size(); }
  // Compressed index -> product index, for one copy.
  const std::vector<std::size_t>& safe_states() const { return safe_; }
  std::size_t dim() const { return safe_.size() * static_cast<std::size_t>(cfg_.rank); }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t sealed_dim() const;

  // Window-truncated operators on the full product space (one copy).
  const SparseOperator& full_kinetic() const { return kinetic_full_; }
  const SparseOperator& full_grading() const { return grading_full_; }
  SparseOperator full_supercharge(const Rational& u) const;  // u = phi / 2pi

  // Compressed Q(phi) including rank copies.
  SparseOperator supercharge(const Rational& u) const;
  ComplexSparse supercharge(double phi) const;
  // Restriction of Q(phi) to one block.
  eigen::DenseMatrix block_matrix(const Block& b, double phi) const;
  eigen::DenseMatrix block_grading(const Block& b) const;

  std::string state_label(std::size_t compressed) const;
  // Window-independent identity of a block: its sorted state labels.
  std::string block_key(const Block& b) const;

 private:
  SuperchargeConfig cfg_;
  std::shared_ptr<const fock::FockBasis> fock_;
  fock::SpinorBasis spinor_;
  SparseOperator kinetic_full_, grading_full_;
  std::vector<std::size_t> safe_;
  std::vector<long long> compressed_of_;  // product index -> compressed index or -1
  ComplexSparse kinetic_, grading_;       // compressed, one copy
  std::vector<Block> blocks_;
};

// Compressed Q(phi) as an exact operator; u = phi / 2pi.
SparseOperator assemble_supercharge(const SuperchargeConfig& cfg, const Rational& u);

// Spinor identity times a Fock operator, without Koszul signs: the gauge
// transformations act on the Fock factor only.
SparseOperator lift_fock_operator(const SuperchargeModel& m, const SparseOperator& fock_op);

struct ConjugationCheck {
  std::size_t columns = 0;  // doubly-safe columns compared
  bool exact = false;       // exact Gaussian-rational equality
  double max_deviation = 0;
};

// g Q(phi) g^{-1} against Q(phi - 2pi) with g = 1 (x) i^N S, on product states whose
// Fock part has margin Nc + 1.
ConjugationCheck check_conjugation(const SuperchargeModel& m, const Rational& u);

// A -> A / sqrt(1 + A^2) on the spectrum.
double sign_map(double lambda);
double sign_map_inverse(double x);  // |x| < 1
eigen::DenseMatrix approximated_sign(const eigen::DenseMatrix& h);

inline constexpr double kZeroLevel = 1e-9;  // eigenvalue counts as positive iff > kZeroLevel
inline constexpr double kCrossingTolerance = 1e-6;
inline constexpr double kPeriodicityTolerance = 1e-9;
inline constexpr int kMaxRefinements = 6;

struct Track {
  std::size_t block = 0;
  std::size_t index = 0;       // position in the block's sorted spectrum
  std::vector<double> values;  // one per grid point
};

struct Crossing {
  double phi = 0;  // localized to kCrossingTolerance
  int direction = 0;
  std::size_t block = 0;
  std::size_t index = 0;
  int charge = 0;
  std::string sector;  // block_key of the block
};

struct BlockPair {
  std::size_t block = 0;
  std::size_t image = 0;  // sealed block holding the S-image of every state
  double defect = 0;      // max |spec Q(2pi)|block - spec Q(0)|image|
};

struct SpectralFlowReport {
  std::size_t grid = 0;  // after refinement
  int refinements = 0;
  std::vector<double> phis;
  std::vector<Track> tracks;  // sealed blocks only
  std::vector<Crossing> crossings;
  int net_flow = 0;
  double periodicity_defect = 0;  // infinity if no block pair is available
  std::vector<BlockPair> periodic_pairs;
  bool lipschitz_ok = true;
  double max_residual = 0;
  std::size_t sealed_blocks = 0;
  std::size_t unsealed_blocks = 0;
};

class UnresolvedCrossing : public std::runtime_error {
 public:
  UnresolvedCrossing(const std::string& what, double lo, double hi)
      : std::runtime_error(what), phi_lo(lo), phi_hi(hi) {}
  double phi_lo, phi_hi;
};

// Throws UnresolvedCrossing if a crossing stays within half a Lipschitz step of a
// neighbouring eigenvalue after kMaxRefinements grid doublings.
SpectralFlowReport spectral_flow(const SuperchargeModel& m);
SpectralFlowReport spectral_flow(const SuperchargeConfig& cfg);

// An explicit Hermitian family, treated as one block. It stands for one sector of a
// tower whose spectrum at 2pi equals its spectrum at 0 shifted by tower_shift.
struct ExplicitFamily {
  std::function<eigen::DenseMatrix(double)> at;
  int tower_shift = 0;
};

SpectralFlowReport spectral_flow(const ExplicitFamily& family, std::size_t grid);

struct ObstructionCertificate {
  std::string verdict;  // "nontrivial" or "inconclusive"
  std::string implication;
  SpectralFlowReport evidence;
};

// Net flow of r counted only over blocks that are also sealed in other.
int shared_sector_flow(const SpectralFlowReport& r, const SuperchargeModel& other);

ObstructionCertificate certify(const SpectralFlowReport& r);
ObstructionCertificate certify_nontriviality(const SuperchargeConfig& cfg);

}  // namespace gerbeflow::spectral
